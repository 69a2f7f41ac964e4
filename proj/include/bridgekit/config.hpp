#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bridgekit/bridges.hpp"
#include "bridgekit/eval.hpp"
#include "bridgekit/train.hpp"

namespace bridgekit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSpec {
  // "pmf": n draws from a pmf over the finite domain's atoms;
  // "points": inline list; "csv": one point per row.
  std::string kind = "pmf";
  std::vector<double> pmf;
  std::size_t n = 10000;
  std::vector<std::vector<double>> points;
  std::string csv_path;
};

struct EvalSpec {
  std::size_t n_mc = 1000;
  std::size_t k_importance = 1;
  bool exact_kl = false;
  std::size_t n_samples = 100000;
};

struct RateSpec {
  std::vector<std::size_t> n_list;
  std::vector<double> eps_list;
  std::vector<std::uint64_t> seeds;
  std::vector<double> target_pmf;
};

// One fully validated experiment: every block checked against its module's
// constructors before any computation starts; unknown keys are errors.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  BridgeSpec spec;
  std::size_t grid_steps = 100;
  TrainConfig train;
  EvalSpec eval;
  DataSpec data;
  std::optional<RateSpec> rate;

  // Canonical JSON echo; re-parsing it yields an identical normalized form.
  std::string normalized_json() const;
};

ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Materialize the dataset described by the data block (pmf draws use the
// stream (seed, "dataset")).
std::vector<std::vector<double>> make_dataset(const ExperimentConfig& cfg);

}  // namespace bridgekit
