#include "bridgekit/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bridgekit {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_num(const json& obj, const std::string& where, const std::string& key,
               std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in " + where);
  }
  if (!obj[key].is_number())
    throw ConfigError("key '" + key + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& where,
                    const std::string& key, std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in " + where);
  }
  if (!obj[key].is_string())
    throw ConfigError("key '" + key + "' in " + where + " must be a string");
  return obj[key].get<std::string>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean())
    throw ConfigError("key '" + key + "' in " + where + " must be a bool");
  return obj[key].get<bool>();
}

std::vector<double> get_vec(const json& obj, const std::string& where,
                            const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_array())
    throw ConfigError("key '" + key + "' in " + where + " must be an array");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number())
      throw ConfigError("array '" + key + "' in " + where + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Schedule parse_schedule(const json& j) {
  check_keys(j, "schedule", {"kind", "a", "b", "T"});
  const std::string kind = get_str(j, "schedule", "kind", "constant");
  const double a = get_num(j, "schedule", "a", 1.0);
  const double horizon = get_num(j, "schedule", "T", 1.0);
  try {
    if (kind == "constant") return Schedule::constant(a, horizon);
    if (kind == "decay_a")
      return Schedule::decay_a(a, get_num(j, "schedule", "b", std::nullopt), horizon);
    if (kind == "decay_b") return Schedule::decay_b(a, horizon);
    if (kind == "decay_c")
      return Schedule::decay_c(a, get_num(j, "schedule", "b", std::nullopt), horizon);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  throw ConfigError("schedule.kind must be one of constant|decay_a|decay_b|decay_c");
}

Domain parse_domain(const json& j) {
  check_keys(j, "domain", {"components"});
  if (!j.contains("components") || !j["components"].is_array() ||
      j["components"].empty())
    throw ConfigError("domain.components must be a nonempty array");
  std::vector<DomainComponent> comps;
  std::size_t i = 0;
  for (const auto& c : j["components"]) {
    const std::string where = "domain.components[" + std::to_string(i++) + "]";
    const std::string kind = get_str(c, where, "kind", std::nullopt);
    try {
      if (kind == "real") {
        check_keys(c, where, {"kind"});
        comps.push_back(DomainComponent::real());
      } else if (kind == "interval") {
        check_keys(c, where, {"kind", "a", "b"});
        comps.push_back(DomainComponent::interval(get_num(c, where, "a", std::nullopt),
                                                  get_num(c, where, "b", std::nullopt)));
      } else if (kind == "finite") {
        check_keys(c, where, {"kind", "atoms"});
        comps.push_back(DomainComponent::finite(get_vec(c, where, "atoms")));
      } else if (kind == "int_range") {
        check_keys(c, where, {"kind", "lo", "hi"});
        const auto lo = static_cast<long long>(get_num(c, where, "lo", std::nullopt));
        const auto hi = static_cast<long long>(get_num(c, where, "hi", std::nullopt));
        if (hi < lo) throw ConfigError(where + ": need lo <= hi");
        std::vector<double> atoms;
        for (long long v = lo; v <= hi; ++v) atoms.push_back(static_cast<double>(v));
        comps.push_back(DomainComponent::finite(std::move(atoms)));
      } else {
        throw ConfigError(where + ".kind must be real|interval|finite|int_range");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return Domain(std::move(comps));
}

std::vector<double> point_or_broadcast(const json& obj, const std::string& where,
                                       const std::string& key, std::size_t dim) {
  if (!obj.contains(key)) return std::vector<double>(dim, 0.0);
  if (obj[key].is_number())
    return std::vector<double>(dim, obj[key].get<double>());
  auto v = get_vec(obj, where, key);
  if (v.size() != dim)
    throw ConfigError(key + " in " + where + " must have domain dimension entries");
  return v;
}

BridgeSpec parse_bridge(const json& j, Schedule schedule, Domain domain) {
  check_keys(j, "bridge",
             {"base", "ou_rate", "init", "init_point", "init_var", "preset"});
  BridgeSpec spec;
  spec.base.schedule = schedule;
  spec.domain = std::move(domain);

  const std::string preset = get_str(j, "bridge", "preset", "");
  const std::string base = get_str(j, "bridge", "base", "brownian");
  if (preset == "vp") {
    // Variance-preserving coupling alpha = sigma^2 / 2; constant rate only.
    if (schedule.kind != ScheduleKind::Constant)
      throw ConfigError("bridge.preset=vp requires a constant schedule");
    spec.base.ou_rate = schedule.a / 2.0;
  } else if (!preset.empty()) {
    throw ConfigError("bridge.preset must be \"vp\" when present");
  } else if (base == "brownian") {
    spec.base.ou_rate = 0.0;
  } else if (base == "ou") {
    spec.base.ou_rate = get_num(j, "bridge", "ou_rate", std::nullopt);
    if (!std::isfinite(spec.base.ou_rate))
      throw ConfigError("bridge.ou_rate must be finite");
  } else {
    throw ConfigError("bridge.base must be brownian|ou");
  }
  if (spec.domain.has_constrained() && !spec.base.is_brownian())
    throw ConfigError("constrained domains require a Brownian baseline");

  const std::string init = get_str(j, "bridge", "init", "delta");
  const std::size_t dim = spec.domain.dim();
  try {
    if (init == "smld") {
      spec.init = InitRule::smld();
    } else if (init == "delta") {
      spec.init = InitRule::delta(point_or_broadcast(j, "bridge", "init_point", dim));
    } else if (init == "gaussian") {
      spec.init = InitRule::gaussian(point_or_broadcast(j, "bridge", "init_point", dim),
                                     get_num(j, "bridge", "init_var", 0.0));
    } else {
      throw ConfigError("bridge.init must be smld|delta|gaussian");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bridge: ") + e.what());
  }
  return spec;
}

TrainConfig parse_train(const json& j, const json& nn, std::size_t grid_steps,
                        std::uint64_t seed) {
  check_keys(j, "train",
             {"epochs", "batch_size", "lr", "lr_decay", "optimizer",
              "time_sampling", "freeze_init", "drift_clamp", "steps_per_epoch"});
  check_keys(nn, "nn", {"hidden_layers", "width"});
  TrainConfig tc;
  tc.n_epochs = static_cast<std::size_t>(get_num(j, "train", "epochs", 200.0));
  tc.batch_size = static_cast<std::size_t>(get_num(j, "train", "batch_size", 128.0));
  tc.learning_rate = get_num(j, "train", "lr", 1e-3);
  tc.lr_decay = get_num(j, "train", "lr_decay", 0.0);
  const std::string opt = get_str(j, "train", "optimizer", "adam");
  if (opt == "adam")
    tc.optimizer = Optimizer::Adam;
  else if (opt == "sgd")
    tc.optimizer = Optimizer::Sgd;
  else
    throw ConfigError("train.optimizer must be adam|sgd");
  const std::string ts = get_str(j, "train", "time_sampling", "iid_uniform");
  if (ts == "iid_uniform")
    tc.time_sampling = TimeSampling::IidUniform;
  else if (ts == "deterministic_grid")
    tc.time_sampling = TimeSampling::DeterministicGrid;
  else
    throw ConfigError("train.time_sampling must be iid_uniform|deterministic_grid");
  tc.freeze_init = get_bool(j, "train", "freeze_init", true);
  tc.drift_clamp = get_num(j, "train", "drift_clamp", kDefaultDriftClamp);
  tc.steps_per_epoch =
      static_cast<std::size_t>(get_num(j, "train", "steps_per_epoch", 0.0));
  tc.grid_steps = grid_steps;
  tc.seed = seed;
  tc.hidden_layers = static_cast<std::size_t>(get_num(nn, "nn", "hidden_layers", 3.0));
  tc.width = static_cast<std::size_t>(get_num(nn, "nn", "width", 64.0));
  if (tc.grid_steps < 2) throw ConfigError("grid.K must be >= 2");
  if (tc.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  return tc;
}

DataSpec parse_data(const json& j, const BridgeSpec& spec) {
  check_keys(j, "data", {"kind", "pmf", "n", "points", "path"});
  DataSpec d;
  d.kind = get_str(j, "data", "kind", "pmf");
  if (d.kind == "pmf") {
    d.pmf = get_vec(j, "data", "pmf");
    d.n = static_cast<std::size_t>(get_num(j, "data", "n", 10000.0));
    if (!spec.domain.all_finite())
      throw ConfigError("data.kind=pmf requires a fully finite domain");
    const auto atoms = enumerate_atoms(spec.domain);
    if (d.pmf.size() != atoms.size())
      throw ConfigError("data.pmf must have one entry per domain atom");
    double total = 0.0;
    for (double p : d.pmf) {
      if (p < 0.0) throw ConfigError("data.pmf entries must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ConfigError("data.pmf must sum to 1");
    if (d.n < 1) throw ConfigError("data.n must be >= 1");
  } else if (d.kind == "points") {
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
      throw ConfigError("data.points must be a nonempty array of points");
    for (const auto& p : j["points"]) {
      std::vector<double> point;
      if (p.is_number()) {
        point = {p.get<double>()};
      } else if (p.is_array()) {
        for (const auto& v : p) point.push_back(v.get<double>());
      } else {
        throw ConfigError("data.points entries must be numbers or arrays");
      }
      if (point.size() != spec.domain.dim())
        throw ConfigError("data.points entries must have domain dimension");
      d.points.push_back(std::move(point));
    }
  } else if (d.kind == "csv") {
    d.csv_path = get_str(j, "data", "path", std::nullopt);
  } else {
    throw ConfigError("data.kind must be pmf|points|csv");
  }
  return d;
}

RateSpec parse_rate(const json& j, const BridgeSpec& spec) {
  check_keys(j, "rate", {"n_list", "eps_list", "seeds", "target_pmf"});
  RateSpec r;
  for (double v : get_vec(j, "rate", "n_list"))
    r.n_list.push_back(static_cast<std::size_t>(v));
  r.eps_list = get_vec(j, "rate", "eps_list");
  for (double v : get_vec(j, "rate", "seeds"))
    r.seeds.push_back(static_cast<std::uint64_t>(v));
  r.target_pmf = get_vec(j, "rate", "target_pmf");
  if (spec.domain.dim() != 1 || !spec.domain.all_finite())
    throw ConfigError("rate block requires a 1-D finite domain");
  return r;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_keys(j, "config",
             {"seed", "output_dir", "schedule", "domain", "bridge", "nn", "grid",
              "train", "eval", "data", "rate"});
  ExperimentConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(get_num(j, "config", "seed", 0.0));
  cfg.output_dir = get_str(j, "config", "output_dir", "out");

  const json empty = json::object();
  const Schedule schedule =
      parse_schedule(j.contains("schedule") ? j["schedule"] : empty);
  if (!j.contains("domain")) throw ConfigError("missing domain block");
  Domain domain = parse_domain(j["domain"]);
  cfg.spec = parse_bridge(j.contains("bridge") ? j["bridge"] : empty, schedule,
                          std::move(domain));

  const json& grid = j.contains("grid") ? j["grid"] : empty;
  check_keys(grid, "grid", {"K", "kind"});
  if (get_str(grid, "grid", "kind", "uniform") != "uniform")
    throw ConfigError("grid.kind must be uniform");
  cfg.grid_steps = static_cast<std::size_t>(get_num(grid, "grid", "K", 100.0));

  cfg.train = parse_train(j.contains("train") ? j["train"] : empty,
                          j.contains("nn") ? j["nn"] : empty, cfg.grid_steps,
                          cfg.seed);

  const json& ev = j.contains("eval") ? j["eval"] : empty;
  check_keys(ev, "eval", {"n_mc", "k_importance", "exact_kl", "n_samples"});
  cfg.eval.n_mc = static_cast<std::size_t>(get_num(ev, "eval", "n_mc", 1000.0));
  cfg.eval.k_importance =
      static_cast<std::size_t>(get_num(ev, "eval", "k_importance", 1.0));
  cfg.eval.exact_kl = get_bool(ev, "eval", "exact_kl", false);
  cfg.eval.n_samples =
      static_cast<std::size_t>(get_num(ev, "eval", "n_samples", 100000.0));

  if (j.contains("data")) cfg.data = parse_data(j["data"], cfg.spec);
  if (j.contains("rate")) cfg.rate = parse_rate(j["rate"], cfg.spec);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string ExperimentConfig::normalized_json() const {
  json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  const Schedule& s = spec.base.schedule;
  json sched{{"a", s.a}, {"T", s.horizon}};
  switch (s.kind) {
    case ScheduleKind::Constant: sched["kind"] = "constant"; break;
    case ScheduleKind::DecayA: sched["kind"] = "decay_a"; sched["b"] = s.b; break;
    case ScheduleKind::DecayB: sched["kind"] = "decay_b"; break;
    case ScheduleKind::DecayC: sched["kind"] = "decay_c"; sched["b"] = s.b; break;
  }
  j["schedule"] = sched;
  json comps = json::array();
  for (const auto& c : spec.domain.components) {
    if (c.is_real()) {
      comps.push_back({{"kind", "real"}});
    } else if (c.is_interval()) {
      comps.push_back({{"kind", "interval"},
                       {"a", c.as_interval().lower},
                       {"b", c.as_interval().upper}});
    } else {
      comps.push_back({{"kind", "finite"}, {"atoms", c.as_finite().atoms}});
    }
  }
  j["domain"] = {{"components", comps}};
  json bridge;
  bridge["base"] = spec.base.is_brownian() ? "brownian" : "ou";
  if (!spec.base.is_brownian()) bridge["ou_rate"] = spec.base.ou_rate;
  switch (spec.init.kind) {
    case InitKind::Smld: bridge["init"] = "smld"; break;
    case InitKind::Delta:
      bridge["init"] = "delta";
      bridge["init_point"] = spec.init.point;
      break;
    case InitKind::Gaussian:
      bridge["init"] = "gaussian";
      bridge["init_point"] = spec.init.point;
      bridge["init_var"] = spec.init.var;
      break;
  }
  j["bridge"] = bridge;
  j["nn"] = {{"hidden_layers", train.hidden_layers}, {"width", train.width}};
  j["grid"] = {{"K", grid_steps}, {"kind", "uniform"}};
  j["train"] = {
      {"epochs", train.n_epochs},
      {"batch_size", train.batch_size},
      {"lr", train.learning_rate},
      {"lr_decay", train.lr_decay},
      {"optimizer", train.optimizer == Optimizer::Adam ? "adam" : "sgd"},
      {"time_sampling", train.time_sampling == TimeSampling::IidUniform
                            ? "iid_uniform"
                            : "deterministic_grid"},
      {"freeze_init", train.freeze_init},
      {"drift_clamp", train.drift_clamp},
      {"steps_per_epoch", train.steps_per_epoch}};
  j["eval"] = {{"n_mc", eval.n_mc},
               {"k_importance", eval.k_importance},
               {"exact_kl", eval.exact_kl},
               {"n_samples", eval.n_samples}};
  json data;
  data["kind"] = this->data.kind;
  if (this->data.kind == "pmf") {
    data["pmf"] = this->data.pmf;
    data["n"] = this->data.n;
  } else if (this->data.kind == "points") {
    data["points"] = this->data.points;
  } else {
    data["path"] = this->data.csv_path;
  }
  j["data"] = data;
  if (rate) {
    j["rate"] = {{"n_list", rate->n_list},
                 {"eps_list", rate->eps_list},
                 {"seeds", rate->seeds},
                 {"target_pmf", rate->target_pmf}};
  }
  return j.dump(2) + "\n";
}

std::vector<std::vector<double>> make_dataset(const ExperimentConfig& cfg) {
  if (cfg.data.kind == "points") return cfg.data.points;
  if (cfg.data.kind == "csv") {
    std::ifstream in(cfg.data.csv_path);
    if (!in) throw IoError("cannot open data csv: " + cfg.data.csv_path);
    std::vector<std::vector<double>> points;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (first) {
        first = false;
        // Skip a header row if the first cell is not numeric.
        char* end = nullptr;
        (void)std::strtod(line.c_str(), &end);
        if (end == line.c_str()) continue;
      }
      std::vector<double> point;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) point.push_back(std::stod(cell));
      if (point.size() != cfg.spec.domain.dim())
        throw ConfigError("data csv row has wrong dimension");
      points.push_back(std::move(point));
    }
    if (points.empty()) throw ConfigError("data csv is empty");
    return points;
  }
  // pmf draws over the enumerated atoms
  const auto atoms = enumerate_atoms(cfg.spec.domain);
  std::vector<double> cdf(cfg.data.pmf.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += cfg.data.pmf[i];
    cdf[i] = acc;
  }
  Rng rng = make_stream(cfg.seed, "dataset");
  std::vector<std::vector<double>> points(cfg.data.n);
  for (auto& p : points) {
    const double u = rng.uniform();
    std::size_t idx = 0;
    while (idx + 1 < cdf.size() && u >= cdf[idx]) ++idx;
    p = atoms[idx];
  }
  return points;
}

}  // namespace bridgekit
