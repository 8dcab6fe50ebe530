#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wishlab {

enum class ExperimentKind {
  nielsen_decay,
  uniform_decay,
  pi_dist,
  clt_check,
  quadrature_report,
  persistence,
  concentration,
};

ExperimentKind experiment_from_name(const std::string& name);  // ConfigError
std::string experiment_name(ExperimentKind kind);

enum class MRuleKind { none, fixed_ratio, offset, explicit_list };

// How the larger dimension m is derived from n:
//   fixed_ratio:   m = round(c * n)
//   offset:        m = n + ceil(gap_C * sqrt(n log n))
//   explicit_list: m paired with n_values entry by entry
struct MRule {
  MRuleKind kind = MRuleKind::none;
  double c = 1.0;
  double gap_C = 0.0;
  std::vector<std::size_t> m_list;
};

std::size_t resolve_m(const MRule& rule, std::size_t n, std::size_t index);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::nielsen_decay;
  std::vector<std::size_t> n_values;
  MRule m_rule;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  double eps = 0.3;         // concentration band half-width
  double threshold_t = 1.0; // persistence threshold
  std::string driver = "gaussian";  // persistence: gaussian | exponential-difference
  std::string scaling = "raw";      // clt-check: raw | shifted | normalised | centered
  std::size_t quad_N = 256;         // quadrature resolution
  bool validate_sampler = false;    // force the dense sampler everywhere

  std::string out_path;   // summary JSON ("" = stdout only)
  std::string trial_csv;  // optional per-trial CSV
  std::string plot_csv;   // optional plot-ready CSV
};

// Flat CLI override set; unset fields keep the file (or default) values.
struct CliOverrides {
  std::optional<std::string> experiment;
  std::optional<std::vector<std::size_t>> n_values;
  std::optional<double> c;
  std::optional<double> gap_C;
  std::optional<std::vector<std::size_t>> m_list;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<double> eps;
  std::optional<double> threshold_t;
  std::optional<std::string> driver;
  std::optional<std::string> scaling;
  std::optional<std::size_t> quad_N;
  std::optional<bool> validate_sampler;
  std::optional<std::string> out_path;
  std::optional<std::string> trial_csv;
  std::optional<std::string> plot_csv;
};

// Parse a config JSON document (ConfigError on malformed input or unknown
// keys).  Validation is deferred to load_config so file and flag entry share
// one validation path.
ExperimentConfig parse_config_json(const std::string& text);

// Defaults -> optional JSON file -> CLI overrides -> validate.
ExperimentConfig load_config(const std::optional<std::string>& json_path,
                             const CliOverrides& overrides);

// The single validation gate: ranges, experiment/m-rule consistency, driver
// and scaling vocabulary.  Fills in the default m-rule for matrix experiments.
void validate_config(ExperimentConfig& config);

}  // namespace wishlab
