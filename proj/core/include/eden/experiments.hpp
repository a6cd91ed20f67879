#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace eden {

/// Declarative experiment description: a flat JSON object (file or inline)
/// plus --key=value overrides. Every key is validated against the known set
/// before any computation starts; unknown keys are rejected by name.
class ExperimentConfig {
 public:
  static ExperimentConfig from_file(const std::string& path,
                                    const std::string& experiment);
  static ExperimentConfig from_json_text(const std::string& text,
                                         const std::string& experiment);
  static ExperimentConfig defaults(const std::string& experiment);

  /// Applies one "--key=value" style override (value parsed as JSON when
  /// possible, else as a string).
  void override_value(const std::string& key, const std::string& value);

  void validate() const;

  const nlohmann::json& raw_json() const;
  const std::string& experiment() const { return experiment_; }

  // typed getters with defaults
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> number_list(const std::string& key) const;
  std::vector<long long> integer_list(const std::string& key) const;
  bool has(const std::string& key) const;

  ~ExperimentConfig();
  ExperimentConfig(ExperimentConfig&&) noexcept;
  ExperimentConfig& operator=(ExperimentConfig&&) noexcept;
  ExperimentConfig(const ExperimentConfig&);

 private:
  ExperimentConfig();
  std::string experiment_;
  nlohmann::json* data_;
};

struct ExperimentResult {
  std::vector<std::string> output_files;
  std::string summary_json;  // empty when the experiment has no summary
};

/// Runners behind the CLI subcommands. Each writes its CSV outputs plus a
/// metadata.json carrying the fully resolved config; re-running from that
/// metadata reproduces the CSVs byte for byte.
ExperimentResult run_simulate(const ExperimentConfig& config,
                              const std::string& out_dir);
ExperimentResult run_escape(const ExperimentConfig& config,
                            const std::string& out_dir);
ExperimentResult run_phase(const ExperimentConfig& config,
                           const std::string& out_dir);
ExperimentResult run_capacity(const ExperimentConfig& config,
                              const std::string& out_dir);
ExperimentResult run_fixed_points(const ExperimentConfig& config,
                                  const std::string& out_dir);

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir);

}  // namespace eden
