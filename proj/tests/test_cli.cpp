#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("BRIDGEKIT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "BRIDGEKIT_CLI must point at the binary");
  return p;
}

int run(const std::string& args) {
  const int rc = std::system((cli_path() + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const char* name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string tiny_config(const fs::path& out_dir) {
  return std::string(R"({
  "seed": 3,
  "output_dir": ")") + out_dir.string() + R"(",
  "schedule": {"kind": "constant", "a": 1.0, "T": 1.0},
  "domain": {"components": [{"kind": "finite", "atoms": [0.0, 1.0]}]},
  "bridge": {"base": "brownian", "init": "delta", "init_point": 0.0},
  "nn": {"hidden_layers": 1, "width": 8},
  "grid": {"K": 10, "kind": "uniform"},
  "train": {"epochs": 2, "batch_size": 8, "steps_per_epoch": 2, "lr": 0.003},
  "eval": {"n_mc": 8, "k_importance": 2, "exact_kl": true, "n_samples": 500},
  "data": {"kind": "pmf", "pmf": [0.5, 0.5], "n": 64}
})";
}

}  // namespace

TEST_CASE("selftest passes") { CHECK(run("selftest") == 0); }

TEST_CASE("config errors exit with code 2") {
  TmpDir dir("bridgekit_cli_cfg");
  write_file(dir.path / "bad.json", R"({"unknown_block": 1})");
  CHECK(run("train --config " + (dir.path / "bad.json").string()) == 2);
  write_file(dir.path / "notjson.json", "hello");
  CHECK(run("train --config " + (dir.path / "notjson.json").string()) == 2);
}

TEST_CASE("io errors exit with code 4") {
  CHECK(run("train --config /no/such/config.json") == 4);
}

TEST_CASE("train, sample, eval produce their artifacts") {
  TmpDir dir("bridgekit_cli_run");
  const fs::path out = dir.path / "out";
  const fs::path cfg = dir.path / "cfg.json";
  write_file(cfg, tiny_config(out));

  REQUIRE(run("train --config " + cfg.string()) == 0);
  CHECK(fs::exists(out / "config_echo.json"));
  CHECK(fs::exists(out / "params.bin"));
  CHECK(fs::exists(out / "loss_trace.csv"));
  CHECK(fs::exists(out / "loss_curve.csv"));
  CHECK(fs::exists(out / "loss_curve.gp"));

  REQUIRE(run("sample --config " + cfg.string() + " --params " +
              (out / "params.bin").string() + " --n 50 --trajectories") == 0);
  CHECK(fs::exists(out / "samples.csv"));
  CHECK(fs::exists(out / "trajectory_bundle.csv"));

  REQUIRE(run("eval --config " + cfg.string() + " --params " +
              (out / "params.bin").string() + " --n-mc 4") == 0);
  CHECK(fs::exists(out / "eval_report.csv"));
  CHECK(fs::exists(out / "pmf_bar.csv"));

  // Missing params file is an I/O failure.
  CHECK(run("eval --config " + cfg.string() + " --params " +
            (out / "missing.bin").string()) == 4);
}

TEST_CASE("rate subcommand writes the sweep table") {
  TmpDir dir("bridgekit_cli_rate");
  const fs::path out = dir.path / "out";
  const fs::path cfg = dir.path / "cfg.json";
  write_file(cfg, tiny_config(out));
  REQUIRE(run("rate --config " + cfg.string() +
              " --n-list 16 --eps-list 0.1 --seeds 1") == 0);
  CHECK(fs::exists(out / "rate_table.csv"));
  CHECK(fs::exists(out / "rate_curve.csv"));
  CHECK(fs::exists(out / "rate_curve.gp"));
}
