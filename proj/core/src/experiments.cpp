#include "eden/experiments.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "eden/analysis.hpp"
#include "eden/capacity.hpp"
#include "eden/csv.hpp"
#include "eden/dynamics.hpp"
#include "eden/energy.hpp"
#include "eden/log.hpp"
#include "eden/patterns.hpp"
#include "eden/version.hpp"

using nlohmann::json;

namespace eden {

// ---------------------------------------------------------------------------
// logging

LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("EDEN_SIM_LOG");
    if (!env) return LogLevel::warn;
    const std::string v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    if (v == "warn") return LogLevel::warn;
    if (v == "error") return LogLevel::error;
    if (v == "quiet") return LogLevel::quiet;
    return LogLevel::warn;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& msg) {
  static const char* names[] = {"debug", "info", "warn", "error"};
  if (level >= log_threshold() && level != LogLevel::quiet) {
    std::cerr << "[eden:" << names[static_cast<int>(level)] << "] " << msg << "\n";
  }
}

// ---------------------------------------------------------------------------
// config

namespace {

enum class KeyType { number, integer, boolean, string, number_array, integer_array };

const std::map<std::string, KeyType>& key_types() {
  static const std::map<std::string, KeyType> table = {
      {"experiment", KeyType::string},
      {"output_dir", KeyType::string},
      {"seed", KeyType::integer},
      {"jobs", KeyType::integer},
      {"model", KeyType::string},
      {"n_features", KeyType::integer},
      {"n_memories", KeyType::integer},
      {"pattern_seed", KeyType::integer},
      {"alpha_s", KeyType::number},
      {"alpha_c", KeyType::number},
      {"tau_f", KeyType::number},
      {"tau_d", KeyType::number},
      {"dt", KeyType::number},
      {"t_max", KeyType::number},
      {"record_stride", KeyType::integer},
      {"init_v", KeyType::string},
      {"init_v_index", KeyType::integer},
      {"init_s", KeyType::string},
      {"init_s_index", KeyType::integer},
      {"init_s_scale", KeyType::number},
      {"include_v_columns", KeyType::boolean},
      {"ratio_alpha_grid", KeyType::number_array},
      {"ratio_tau_grid", KeyType::number_array},
      {"simulate_cells", KeyType::boolean},
      {"cell_seed_pool", KeyType::integer},
      {"t_max_cell", KeyType::number},
      {"t_max_cap", KeyType::number},
      {"alpha", KeyType::number},
      {"r", KeyType::number},
      {"epsilon", KeyType::number},
      {"delta", KeyType::number},
      {"trials", KeyType::integer},
      {"p_cap", KeyType::integer},
      {"n_grid", KeyType::integer_array},
      {"track_stride", KeyType::integer},
      {"fp_tol", KeyType::number},
      {"fp_max_iter", KeyType::integer},
  };
  return table;
}

const std::map<std::string, std::set<std::string>>& experiment_keys() {
  static const std::set<std::string> common = {"experiment", "output_dir", "seed",
                                               "jobs", "model"};
  static const std::set<std::string> sim = {
      "n_features", "n_memories", "pattern_seed", "alpha_s", "alpha_c",
      "tau_f", "tau_d", "dt", "t_max", "record_stride", "init_v",
      "init_v_index", "init_s", "init_s_index", "init_s_scale",
      "include_v_columns"};
  static const std::map<std::string, std::set<std::string>> table = [] {
    auto with = [](std::set<std::string> base, std::set<std::string> extra) {
      base.insert(common.begin(), common.end());
      base.insert(extra.begin(), extra.end());
      return base;
    };
    std::map<std::string, std::set<std::string>> t;
    t["simulate"] = with(sim, {});
    t["escape"] = with(sim, {});
    t["fixed-points"] = with(sim, {"track_stride", "fp_tol", "fp_max_iter"});
    t["phase"] = with({"n_features", "n_memories", "alpha_c", "tau_f", "dt"},
                      {"ratio_alpha_grid", "ratio_tau_grid", "simulate_cells",
                       "cell_seed_pool", "t_max_cell", "t_max_cap"});
    t["capacity"] = with({"n_features"},
                         {"alpha", "r", "epsilon", "delta", "trials", "p_cap",
                          "n_grid"});
    return t;
  }();
  return table;
}

void check_key(const std::string& experiment, const std::string& key,
               const json& value) {
  const auto& allowed = experiment_keys();
  const auto exp_it = allowed.find(experiment);
  if (exp_it == allowed.end()) {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  if (!exp_it->second.count(key)) {
    throw std::invalid_argument("unknown config key '" + key + "' for experiment '" +
                                experiment + "'");
  }
  switch (key_types().at(key)) {
    case KeyType::number:
      if (!value.is_number()) {
        throw std::invalid_argument("config key '" + key + "' must be a number");
      }
      break;
    case KeyType::integer:
      if (!value.is_number_integer()) {
        throw std::invalid_argument("config key '" + key + "' must be an integer");
      }
      break;
    case KeyType::boolean:
      if (!value.is_boolean()) {
        throw std::invalid_argument("config key '" + key + "' must be a boolean");
      }
      break;
    case KeyType::string:
      if (!value.is_string()) {
        throw std::invalid_argument("config key '" + key + "' must be a string");
      }
      break;
    case KeyType::number_array:
      if (!value.is_array()) {
        throw std::invalid_argument("config key '" + key + "' must be an array");
      }
      for (const auto& v : value) {
        if (!v.is_number()) {
          throw std::invalid_argument("config key '" + key +
                                      "' must contain only numbers");
        }
      }
      break;
    case KeyType::integer_array:
      if (!value.is_array()) {
        throw std::invalid_argument("config key '" + key + "' must be an array");
      }
      for (const auto& v : value) {
        if (!v.is_number_integer()) {
          throw std::invalid_argument("config key '" + key +
                                      "' must contain only integers");
        }
      }
      break;
  }
}

json number_or_repr(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

ExperimentConfig::ExperimentConfig() : data_(new json(json::object())) {}
ExperimentConfig::~ExperimentConfig() { delete data_; }
ExperimentConfig::ExperimentConfig(ExperimentConfig&& other) noexcept
    : experiment_(std::move(other.experiment_)), data_(other.data_) {
  other.data_ = nullptr;
}
ExperimentConfig& ExperimentConfig::operator=(ExperimentConfig&& other) noexcept {
  if (this != &other) {
    delete data_;
    experiment_ = std::move(other.experiment_);
    data_ = other.data_;
    other.data_ = nullptr;
  }
  return *this;
}
ExperimentConfig::ExperimentConfig(const ExperimentConfig& other)
    : experiment_(other.experiment_), data_(new json(*other.data_)) {}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment_ = experiment;
  (*c.data_)["experiment"] = experiment;
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& experiment) {
  json parsed = json::parse(text);
  if (!parsed.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  // A metadata file embeds the config it ran with; accept it directly.
  if (parsed.contains("resolved_config")) parsed = parsed["resolved_config"];

  ExperimentConfig c;
  std::string exp = experiment;
  if (parsed.contains("experiment")) {
    const std::string file_exp = parsed["experiment"].get<std::string>();
    if (exp.empty()) {
      exp = file_exp;
    } else if (file_exp != exp) {
      throw std::invalid_argument("config is for experiment '" + file_exp +
                                  "', not '" + exp + "'");
    }
  }
  if (exp.empty()) {
    throw std::invalid_argument("config does not name an experiment");
  }
  c.experiment_ = exp;
  *c.data_ = std::move(parsed);
  (*c.data_)["experiment"] = exp;
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path,
                                             const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text, experiment);
}

void ExperimentConfig::override_value(const std::string& key,
                                      const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // bare strings like --model=eden
  }
  check_key(experiment_, key, parsed);
  (*data_)[key] = parsed;
}

void ExperimentConfig::validate() const {
  for (const auto& [key, value] : data_->items()) {
    check_key(experiment_, key, value);
  }
}

const json& ExperimentConfig::raw_json() const { return *data_; }

bool ExperimentConfig::has(const std::string& key) const {
  return data_->contains(key);
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  return data_->contains(key) ? (*data_)[key].get<double>() : fallback;
}

long long ExperimentConfig::integer(const std::string& key, long long fallback) const {
  return data_->contains(key) ? (*data_)[key].get<long long>() : fallback;
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  return data_->contains(key) ? (*data_)[key].get<bool>() : fallback;
}

std::string ExperimentConfig::text(const std::string& key,
                                   const std::string& fallback) const {
  return data_->contains(key) ? (*data_)[key].get<std::string>() : fallback;
}

std::vector<double> ExperimentConfig::number_list(const std::string& key) const {
  std::vector<double> out;
  if (data_->contains(key)) {
    for (const auto& v : (*data_)[key]) out.push_back(v.get<double>());
  }
  return out;
}

std::vector<long long> ExperimentConfig::integer_list(const std::string& key) const {
  std::vector<long long> out;
  if (data_->contains(key)) {
    for (const auto& v : (*data_)[key]) out.push_back(v.get<long long>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// shared pieces

namespace {

struct SimSetup {
  MemorySequence mems;
  EdenParams params;
  NetworkState initial;
  Model model = Model::eden;
  int record_stride = 10;
  std::uint64_t seed = 1;
};

Model parse_model(const ExperimentConfig& cfg) {
  const std::string m = cfg.text("model", "eden");
  if (m == "eden") return Model::eden;
  if (m == "reference") return Model::reference;
  throw std::invalid_argument("config key 'model' must be 'eden' or 'reference'");
}

int checked_int(const ExperimentConfig& cfg, const char* key, long long fallback,
                long long lo, long long hi) {
  const long long v = cfg.integer(key, fallback);
  if (v < lo || v > hi) {
    throw std::invalid_argument(std::string("config key '") + key +
                                "' out of range");
  }
  return static_cast<int>(v);
}

SimSetup make_sim_setup(const ExperimentConfig& cfg) {
  SimSetup s;
  s.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  const auto pattern_seed =
      static_cast<std::uint64_t>(cfg.integer("pattern_seed",
                                             static_cast<long long>(s.seed)));
  const int n = checked_int(cfg, "n_features", 100, 1, 1 << 24);
  const int p = checked_int(cfg, "n_memories", 5, 1, 1 << 24);
  s.mems = generate_rademacher_memories(n, p, pattern_seed);

  s.params.alpha_s = cfg.number("alpha_s", 0.98);
  s.params.alpha_c = cfg.number("alpha_c", 1.0);
  s.params.tau_f = cfg.number("tau_f", 1.0);
  s.params.tau_d = cfg.number("tau_d", 20.0);
  s.params.dt = cfg.number("dt", 0.01);
  s.params.t_max = cfg.number("t_max", 600.0);
  s.params.validate();
  s.record_stride = checked_int(cfg, "record_stride", 10, 1, 1 << 30);
  s.model = parse_model(cfg);

  const std::string init_v = cfg.text("init_v", "memory");
  if (init_v == "memory") {
    const int idx = checked_int(cfg, "init_v_index", 1, 1, p);
    s.initial.v = s.mems.pattern(idx - 1);
  } else if (init_v == "zeros") {
    s.initial.v = Vector::Zero(n);
  } else {
    throw std::invalid_argument("config key 'init_v' must be 'memory' or 'zeros'");
  }

  const std::string init_s = cfg.text("init_s", "zeros");
  if (init_s == "zeros") {
    s.initial.s = Vector::Zero(n);
  } else if (init_s == "memory" || init_s == "scaled_memory") {
    const int idx = checked_int(cfg, "init_s_index", 1, 1, p);
    const double scale =
        init_s == "memory" ? 1.0 : cfg.number("init_s_scale", 1.0);
    s.initial.s = scale * s.mems.pattern(idx - 1);
  } else {
    throw std::invalid_argument(
        "config key 'init_s' must be 'zeros', 'memory' or 'scaled_memory'");
  }
  s.initial.t = 0.0;
  return s;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          bool include_v) {
  CsvWriter csv(path);
  const int p = traj.n_memories;
  const int n = traj.n_features;
  std::vector<std::string> cols = {"t"};
  if (include_v) {
    for (int i = 1; i <= n; ++i) cols.push_back("v_" + std::to_string(i));
  }
  for (int m = 1; m <= p; ++m) cols.push_back("m_v_" + std::to_string(m));
  for (int m = 1; m <= p; ++m) cols.push_back("m_s_" + std::to_string(m));
  const bool with_energy = traj.model == Model::eden;
  if (with_energy) {
    cols.push_back("E");
    cols.push_back("F");
    cols.push_back("S");
  }
  cols.push_back("argmax");
  csv.header(cols);

  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& sample = traj.samples[i];
    const auto& obs = traj.observables[i];
    csv.field(sample.t);
    if (include_v) {
      for (int j = 0; j < n; ++j) csv.field(sample.v[j]);
    }
    for (int m = 0; m < p; ++m) csv.field(obs.m_v[m]);
    for (int m = 0; m < p; ++m) csv.field(obs.m_s[m]);
    if (with_energy) {
      csv.field(obs.energy).field(obs.rate_fast).field(obs.rate_slow);
    }
    csv.field(static_cast<long long>(obs.argmax + 1));
    csv.end_row();
  }
}

void write_hidden_activity_csv(const std::string& path, const Trajectory& traj) {
  CsvWriter csv(path);
  std::vector<std::string> cols = {"t"};
  for (int m = 1; m <= traj.n_memories; ++m) cols.push_back("p_" + std::to_string(m));
  csv.header(cols);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    csv.field(traj.samples[i].t);
    for (int m = 0; m < traj.n_memories; ++m) {
      csv.field(traj.observables[i].probs[m]);
    }
    csv.end_row();
  }
}

class MetadataWriter {
 public:
  MetadataWriter(const ExperimentConfig& cfg, const std::filesystem::path& dir)
      : cfg_(cfg), dir_(dir), start_(std::chrono::steady_clock::now()) {}

  std::string finish(const std::vector<std::string>& outputs,
                     const json& extra = json::object()) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    json meta;
    meta["experiment"] = cfg_.experiment();
    meta["library_version"] = library_version;
    meta["generator"] = MemorySequence::generator_id;
    meta["resolved_config"] = cfg_.raw_json();
    meta["outputs"] = outputs;
    meta["duration_seconds"] = secs;
    if (!extra.empty()) meta["summary"] = extra;
    const auto path = dir_ / "metadata.json";
    std::ofstream out(path, std::ios::binary);
    out << meta.dump(2) << "\n";
    return path.string();
  }

 private:
  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
  std::chrono::steady_clock::time_point start_;
};

json resolved_config_with_defaults(const ExperimentConfig& cfg, const SimSetup& s,
                                   bool include_v) {
  json j = cfg.raw_json();
  j["experiment"] = cfg.experiment();
  j["n_features"] = s.mems.n_features;
  j["n_memories"] = s.mems.n_memories;
  j["pattern_seed"] = s.mems.seed;
  j["seed"] = s.seed;
  j["alpha_s"] = s.params.alpha_s;
  j["alpha_c"] = s.params.alpha_c;
  j["tau_f"] = s.params.tau_f;
  j["tau_d"] = s.params.tau_d;
  j["dt"] = s.params.dt;
  j["t_max"] = s.params.t_max;
  j["record_stride"] = s.record_stride;
  j["model"] = s.model == Model::eden ? "eden" : "reference";
  j["include_v_columns"] = include_v;
  return j;
}

ExperimentConfig with_resolved(const ExperimentConfig& cfg, const json& resolved) {
  return ExperimentConfig::from_json_text(resolved.dump(), cfg.experiment());
}

}  // namespace

// ---------------------------------------------------------------------------
// runners

ExperimentResult run_simulate(const ExperimentConfig& cfg,
                              const std::string& out_dir) {
  const auto dir = prepare_out_dir(out_dir);
  const SimSetup s = make_sim_setup(cfg);
  const bool include_v = cfg.flag("include_v_columns", false);
  const auto resolved = with_resolved(cfg, resolved_config_with_defaults(cfg, s, include_v));
  MetadataWriter meta(resolved, dir);

  log_info("simulate: N=" + std::to_string(s.mems.n_features) +
           " P=" + std::to_string(s.mems.n_memories) +
           " t_max=" + std::to_string(s.params.t_max));
  const Trajectory traj = integrate(s.initial, s.mems, s.params, s.record_stride,
                                    s.model);

  ExperimentResult res;
  const auto traj_path = (dir / "trajectory.csv").string();
  write_trajectory_csv(traj_path, traj, include_v);
  res.output_files.push_back(traj_path);
  if (s.model == Model::eden) {
    const auto hid_path = (dir / "hidden_activity.csv").string();
    write_hidden_activity_csv(hid_path, traj);
    res.output_files.push_back(hid_path);
  }
  res.output_files.push_back(meta.finish(res.output_files));
  return res;
}

ExperimentResult run_escape(const ExperimentConfig& cfg,
                            const std::string& out_dir) {
  const auto dir = prepare_out_dir(out_dir);
  const SimSetup s = make_sim_setup(cfg);
  if (s.model != Model::eden) {
    throw std::invalid_argument("escape: only the eden model has escape-time theory");
  }
  const auto resolved = with_resolved(cfg, resolved_config_with_defaults(cfg, s, false));
  MetadataWriter meta(resolved, dir);

  const Trajectory traj = integrate(s.initial, s.mems, s.params, s.record_stride);
  const EscapeSummary sum = summarize_escapes(traj, s.mems);
  const double analytic = analytic_escape_time(s.params.alpha_s, s.params.alpha_c,
                                               s.params.tau_d, s.params.tau_f);

  ExperimentResult res;
  const auto esc_path = (dir / "escapes.csv").string();
  {
    CsvWriter csv(esc_path);
    csv.header({"memory_index", "enter_time", "exit_time", "duration"});
    for (const auto& r : sum.records) {
      csv.field(static_cast<long long>(r.memory_index + 1))
          .field(r.enter_time)
          .field(r.exit_time)
          .field(r.duration);
      csv.end_row();
    }
  }
  res.output_files.push_back(esc_path);

  json summary;
  summary["n_switches"] = sum.n_switches;
  summary["n_complete"] = sum.n_complete;
  summary["censored"] = sum.censored;
  summary["mean_duration"] = number_or_repr(sum.mean_duration);
  summary["analytic_te"] = number_or_repr(analytic);
  summary["regime"] =
      s.params.alpha_s / s.params.alpha_c >= 1.0 ? "static" : "dynamic";
  summary["abs_error"] = number_or_repr(
      sum.censored || std::isinf(analytic)
          ? std::numeric_limits<double>::quiet_NaN()
          : std::abs(sum.mean_duration - analytic));
  const auto sum_path = (dir / "summary.json").string();
  {
    std::ofstream out(sum_path, std::ios::binary);
    out << summary.dump(2) << "\n";
  }
  res.output_files.push_back(sum_path);
  res.summary_json = summary.dump(2);
  res.output_files.push_back(meta.finish(res.output_files, summary));
  return res;
}

ExperimentResult run_phase(const ExperimentConfig& cfg,
                           const std::string& out_dir) {
  const auto dir = prepare_out_dir(out_dir);
  PhaseOptions opt;
  opt.n_features = checked_int(cfg, "n_features", 100, 1, 1 << 24);
  opt.n_memories = checked_int(cfg, "n_memories", 5, 1, 1 << 24);
  opt.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  opt.seed_pool = checked_int(cfg, "cell_seed_pool", 1, 1, 1 << 20);
  opt.alpha_c = cfg.number("alpha_c", 1.0);
  opt.tau_f = cfg.number("tau_f", 1.0);
  opt.dt = cfg.number("dt", 0.01);
  opt.simulate = cfg.flag("simulate_cells", true);
  opt.t_max_override = cfg.number("t_max_cell", 0.0);
  opt.t_max_cap = cfg.number("t_max_cap", 1e5);
  opt.jobs = checked_int(cfg, "jobs", 0, 0, 4096);
  const auto ra = cfg.number_list("ratio_alpha_grid");
  const auto rt = cfg.number_list("ratio_tau_grid");
  if (ra.empty() || rt.empty()) {
    throw std::invalid_argument(
        "phase: 'ratio_alpha_grid' and 'ratio_tau_grid' must be non-empty");
  }

  json resolved_json = cfg.raw_json();
  resolved_json["seed"] = opt.seed;
  resolved_json["cell_seed_pool"] = opt.seed_pool;
  resolved_json["simulate_cells"] = opt.simulate;
  const auto resolved = with_resolved(cfg, resolved_json);
  MetadataWriter meta(resolved, dir);

  const auto cells = phase_diagram(ra, rt, opt);

  ExperimentResult res;
  const auto path = (dir / "phase.csv").string();
  {
    CsvWriter csv(path);
    csv.header({"ratio_alpha", "ratio_tau", "analytic_te", "empirical_te",
                "n_transitions", "censored", "static", "diverged"});
    for (const auto& c : cells) {
      csv.field(c.ratio_alpha)
          .field(c.ratio_tau)
          .field(c.analytic_te)
          .field(c.empirical_te)
          .field(static_cast<long long>(c.n_transitions))
          .field(c.censored)
          .field(c.is_static)
          .field(c.diverged);
      csv.end_row();
    }
  }
  res.output_files.push_back(path);
  res.output_files.push_back(meta.finish(res.output_files));
  return res;
}

ExperimentResult run_capacity(const ExperimentConfig& cfg,
                              const std::string& out_dir) {
  const auto dir = prepare_out_dir(out_dir);
  const Model model = parse_model(cfg);
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  const int jobs = checked_int(cfg, "jobs", 0, 0, 4096);

  CapacitySpec base;
  base.alpha = cfg.number("alpha", 2.0);
  base.r = cfg.number("r", 0.999);
  base.epsilon = cfg.number("epsilon", 1e-3);
  base.delta = cfg.number("delta", 1e-3);
  base.trials = checked_int(cfg, "trials", 100, 1, 1 << 24);
  base.p_cap = cfg.integer("p_cap", 1000000);

  std::vector<long long> n_grid = cfg.integer_list("n_grid");
  if (n_grid.empty()) n_grid.push_back(cfg.integer("n_features", 20));

  json resolved_json = cfg.raw_json();
  resolved_json["seed"] = seed;
  resolved_json["n_grid"] = n_grid;
  resolved_json["model"] = model == Model::eden ? "eden" : "reference";
  const auto resolved = with_resolved(cfg, resolved_json);
  MetadataWriter meta(resolved, dir);

  ExperimentResult res;
  const auto curve_path = (dir / "capacity.csv").string();
  CsvWriter csv(curve_path);
  csv.header({"N", "P", "error_prob", "stderr", "n_trials", "nonconverged"});

  json per_n = json::array();
  std::vector<double> log10_caps;
  std::vector<double> ns;
  for (const long long n : n_grid) {
    CapacitySpec spec = base;
    spec.n_features = static_cast<int>(n);
    spec.validate();
    log_info("capacity: N=" + std::to_string(n));
    const CapacityEstimate est = empirical_capacity(spec, seed, model, jobs);
    for (const auto& e : est.curve) {
      csv.field(n)
          .field(e.p)
          .field(e.probability)
          .field(e.std_error)
          .field(static_cast<long long>(spec.trials))
          .field(static_cast<long long>(e.nonconverged));
      csv.end_row();
    }
    json entry;
    entry["N"] = n;
    entry["capacity"] = est.capacity;
    entry["saturated"] = est.saturated;
    entry["analytic_capacity"] = number_or_repr(est.analytic_capacity);
    per_n.push_back(entry);
    if (est.capacity >= 1) {
      ns.push_back(static_cast<double>(n));
      log10_caps.push_back(std::log10(static_cast<double>(est.capacity)));
    }
  }
  csv.flush();
  res.output_files.push_back(curve_path);

  json summary;
  summary["per_n"] = per_n;
  summary["gamma"] = capacity_growth_base(base.alpha, base.r);
  summary["log10_gamma"] = std::log10(capacity_growth_base(base.alpha, base.r));
  if (ns.size() >= 2) {  // least-squares slope of log10(capacity) vs N
    const double n_count = static_cast<double>(ns.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      mx += ns[i];
      my += log10_caps[i];
    }
    mx /= n_count;
    my /= n_count;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      num += (ns[i] - mx) * (log10_caps[i] - my);
      den += (ns[i] - mx) * (ns[i] - mx);
    }
    summary["log10_capacity_slope"] = den > 0 ? num / den : 0.0;
  }
  const auto sum_path = (dir / "summary.json").string();
  {
    std::ofstream out(sum_path, std::ios::binary);
    out << summary.dump(2) << "\n";
  }
  res.output_files.push_back(sum_path);
  res.summary_json = summary.dump(2);
  res.output_files.push_back(meta.finish(res.output_files, summary));
  return res;
}

ExperimentResult run_fixed_points(const ExperimentConfig& cfg,
                                  const std::string& out_dir) {
  const auto dir = prepare_out_dir(out_dir);
  const SimSetup s = make_sim_setup(cfg);
  if (s.model != Model::eden) {
    throw std::invalid_argument("fixed-points: only the eden model has an energy surface");
  }
  const int track_stride = checked_int(cfg, "track_stride", 10, 1, 1 << 30);
  const double fp_tol = cfg.number("fp_tol", 1e-8);
  const int fp_max_iter = checked_int(cfg, "fp_max_iter", 10000, 1, 1 << 30);
  const int jobs = checked_int(cfg, "jobs", 0, 0, 4096);

  json resolved_json = resolved_config_with_defaults(cfg, s, false);
  resolved_json["track_stride"] = track_stride;
  resolved_json["fp_tol"] = fp_tol;
  resolved_json["fp_max_iter"] = fp_max_iter;
  const auto resolved = with_resolved(cfg, resolved_json);
  MetadataWriter meta(resolved, dir);

  const Trajectory traj = integrate(s.initial, s.mems, s.params, s.record_stride);
  const auto track =
      track_fixed_points(traj, s.mems, s.params, track_stride, fp_tol, fp_max_iter, jobs);

  std::vector<Vector> points;
  points.reserve(track.size());
  for (const auto& fp : track) points.push_back(fp.v_star);
  std::vector<double> scores(track.size(), 0.0);
  if (points.size() >= 2) scores = principal_component_1(points).scores;

  ExperimentResult res;
  const auto traj_path = (dir / "trajectory.csv").string();
  write_trajectory_csv(traj_path, traj, false);
  res.output_files.push_back(traj_path);

  const auto fp_path = (dir / "fixed_points.csv").string();
  {
    CsvWriter csv(fp_path);
    csv.header({"t", "residual", "converged", "nearest_memory", "pc1_score"});
    for (std::size_t i = 0; i < track.size(); ++i) {
      csv.field(track[i].t)
          .field(track[i].residual)
          .field(track[i].converged)
          .field(static_cast<long long>(track[i].nearest_memory + 1))
          .field(scores[i]);
      csv.end_row();
    }
  }
  res.output_files.push_back(fp_path);
  res.output_files.push_back(meta.finish(res.output_files));
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  const std::string& exp = cfg.experiment();
  if (exp == "simulate") return run_simulate(cfg, out_dir);
  if (exp == "escape") return run_escape(cfg, out_dir);
  if (exp == "phase") return run_phase(cfg, out_dir);
  if (exp == "capacity") return run_capacity(cfg, out_dir);
  if (exp == "fixed-points") return run_fixed_points(cfg, out_dir);
  throw std::invalid_argument("unknown experiment '" + exp + "'");
}

}  // namespace eden
