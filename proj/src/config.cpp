#include "wishlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wishlab/errors.hpp"

namespace wishlab {

namespace {

using nlohmann::json;

bool is_matrix_experiment(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nielsen_decay:
    case ExperimentKind::pi_dist:
    case ExperimentKind::clt_check:
    case ExperimentKind::concentration:
      return true;
    default:
      return false;
  }
}

std::vector<std::size_t> size_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config: \"" + key + "\" must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned())
      throw ConfigError("config: \"" + key + "\" entries must be nonnegative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

}  // namespace

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "nielsen-decay") return ExperimentKind::nielsen_decay;
  if (name == "uniform-decay") return ExperimentKind::uniform_decay;
  if (name == "pi-dist") return ExperimentKind::pi_dist;
  if (name == "clt-check") return ExperimentKind::clt_check;
  if (name == "quadrature-report") return ExperimentKind::quadrature_report;
  if (name == "persistence") return ExperimentKind::persistence;
  if (name == "concentration") return ExperimentKind::concentration;
  throw ConfigError("unknown experiment \"" + name + "\"");
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nielsen_decay: return "nielsen-decay";
    case ExperimentKind::uniform_decay: return "uniform-decay";
    case ExperimentKind::pi_dist: return "pi-dist";
    case ExperimentKind::clt_check: return "clt-check";
    case ExperimentKind::quadrature_report: return "quadrature-report";
    case ExperimentKind::persistence: return "persistence";
    case ExperimentKind::concentration: return "concentration";
  }
  throw ConfigError("unknown experiment kind");
}

std::size_t resolve_m(const MRule& rule, std::size_t n, std::size_t index) {
  switch (rule.kind) {
    case MRuleKind::fixed_ratio:
      return static_cast<std::size_t>(
          std::llround(rule.c * static_cast<double>(n)));
    case MRuleKind::offset: {
      const double g = rule.gap_C * std::sqrt(static_cast<double>(n) *
                                              std::log(static_cast<double>(n)));
      return n + static_cast<std::size_t>(std::ceil(g));
    }
    case MRuleKind::explicit_list:
      if (index >= rule.m_list.size())
        throw ConfigError("explicit m list shorter than n list");
      return rule.m_list[index];
    case MRuleKind::none:
      break;
  }
  throw ConfigError("experiment has no m rule to resolve");
}

ExperimentConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config JSON root must be an object");

  ExperimentConfig cfg;
  bool have_experiment = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "experiment") {
      cfg.experiment = experiment_from_name(value.get<std::string>());
      have_experiment = true;
    } else if (key == "n") {
      cfg.n_values = size_list(value, "n");
    } else if (key == "m_rule") {
      if (!value.is_object()) throw ConfigError("config: \"m_rule\" must be an object");
      const std::string kind = value.value("kind", "");
      if (kind == "fixed-ratio") {
        cfg.m_rule.kind = MRuleKind::fixed_ratio;
        cfg.m_rule.c = value.value("c", 1.0);
      } else if (kind == "offset") {
        cfg.m_rule.kind = MRuleKind::offset;
        cfg.m_rule.gap_C = value.value("gap_C", 0.0);
      } else if (kind == "explicit") {
        cfg.m_rule.kind = MRuleKind::explicit_list;
        if (!value.contains("m"))
          throw ConfigError("config: explicit m_rule needs an \"m\" array");
        cfg.m_rule.m_list = size_list(value["m"], "m");
      } else {
        throw ConfigError("config: m_rule kind must be fixed-ratio, offset, or explicit");
      }
    } else if (key == "trials") {
      cfg.trials = value.get<std::size_t>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "workers") {
      cfg.workers = value.get<std::size_t>();
    } else if (key == "eps") {
      cfg.eps = value.get<double>();
    } else if (key == "t") {
      cfg.threshold_t = value.get<double>();
    } else if (key == "driver") {
      cfg.driver = value.get<std::string>();
    } else if (key == "scaling") {
      cfg.scaling = value.get<std::string>();
    } else if (key == "quad_N") {
      cfg.quad_N = value.get<std::size_t>();
    } else if (key == "validate_sampler") {
      cfg.validate_sampler = value.get<bool>();
    } else if (key == "out") {
      cfg.out_path = value.get<std::string>();
    } else if (key == "trial_csv") {
      cfg.trial_csv = value.get<std::string>();
    } else if (key == "plot_csv") {
      cfg.plot_csv = value.get<std::string>();
    } else {
      throw ConfigError("config: unknown key \"" + key + "\"");
    }
  }
  if (!have_experiment) throw ConfigError("config: missing \"experiment\"");
  return cfg;
}

ExperimentConfig load_config(const std::optional<std::string>& json_path,
                             const CliOverrides& overrides) {
  ExperimentConfig cfg;
  bool have_experiment = false;
  if (json_path) {
    std::ifstream in(*json_path);
    if (!in) throw IoError("cannot open config file " + *json_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    cfg = parse_config_json(buf.str());
    have_experiment = true;
  }

  if (overrides.experiment) {
    cfg.experiment = experiment_from_name(*overrides.experiment);
    have_experiment = true;
  }
  if (!have_experiment) throw ConfigError("no experiment selected");
  if (overrides.n_values) cfg.n_values = *overrides.n_values;
  if (overrides.c) {
    cfg.m_rule.kind = MRuleKind::fixed_ratio;
    cfg.m_rule.c = *overrides.c;
  }
  if (overrides.gap_C) {
    cfg.m_rule.kind = MRuleKind::offset;
    cfg.m_rule.gap_C = *overrides.gap_C;
  }
  if (overrides.m_list) {
    cfg.m_rule.kind = MRuleKind::explicit_list;
    cfg.m_rule.m_list = *overrides.m_list;
  }
  if (overrides.trials) cfg.trials = *overrides.trials;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.workers) cfg.workers = *overrides.workers;
  if (overrides.eps) cfg.eps = *overrides.eps;
  if (overrides.threshold_t) cfg.threshold_t = *overrides.threshold_t;
  if (overrides.driver) cfg.driver = *overrides.driver;
  if (overrides.scaling) cfg.scaling = *overrides.scaling;
  if (overrides.quad_N) cfg.quad_N = *overrides.quad_N;
  if (overrides.validate_sampler) cfg.validate_sampler = *overrides.validate_sampler;
  if (overrides.out_path) cfg.out_path = *overrides.out_path;
  if (overrides.trial_csv) cfg.trial_csv = *overrides.trial_csv;
  if (overrides.plot_csv) cfg.plot_csv = *overrides.plot_csv;

  validate_config(cfg);
  return cfg;
}

void validate_config(ExperimentConfig& config) {
  if (config.n_values.empty() &&
      config.experiment != ExperimentKind::quadrature_report)
    throw ConfigError("config: \"n\" must be a non-empty list");
  if (config.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (config.workers < 1) throw ConfigError("config: workers must be >= 1");
  if (config.workers > 64) throw ConfigError("config: workers must be <= 64");

  const bool matrix = is_matrix_experiment(config.experiment);
  if (matrix) {
    if (config.m_rule.kind == MRuleKind::none)
      config.m_rule = MRule{MRuleKind::fixed_ratio, 1.0, 0.0, {}};
    if (config.m_rule.kind == MRuleKind::fixed_ratio && !(config.m_rule.c >= 1.0))
      throw ConfigError("config: fixed-ratio c must be >= 1");
    if (config.m_rule.kind == MRuleKind::offset && !(config.m_rule.gap_C >= 0.0))
      throw ConfigError("config: offset gap_C must be >= 0");
    if (config.m_rule.kind == MRuleKind::explicit_list &&
        config.m_rule.m_list.size() != config.n_values.size())
      throw ConfigError("config: explicit m list must pair with the n list");
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
      const std::size_t n = config.n_values[i];
      if (n < 1) throw ConfigError("config: n values must be >= 1");
      const std::size_t m = resolve_m(config.m_rule, n, i);
      if (m < n)
        throw ConfigError("config: resolved m < n (samplers need m >= n)");
    }
  } else {
    if (config.m_rule.kind != MRuleKind::none)
      throw ConfigError("config: experiment \"" +
                        experiment_name(config.experiment) +
                        "\" takes no m rule");
    for (std::size_t n : config.n_values)
      if (n < 1) throw ConfigError("config: n values must be >= 1");
  }

  if (config.experiment == ExperimentKind::persistence) {
    for (std::size_t i = 0; i + 1 < config.n_values.size(); ++i)
      if (config.n_values[i] >= config.n_values[i + 1])
        throw ConfigError("config: persistence N values must be strictly increasing");
    if (config.driver != "gaussian" && config.driver != "exponential-difference")
      throw ConfigError("config: driver must be gaussian or exponential-difference");
  }
  if (config.experiment == ExperimentKind::concentration &&
      !(config.eps > 0.0 && config.eps < 1.0))
    throw ConfigError("config: eps must lie in (0, 1)");
  if (config.experiment == ExperimentKind::clt_check) {
    if (config.scaling != "raw" && config.scaling != "shifted" &&
        config.scaling != "normalised" && config.scaling != "centered")
      throw ConfigError("config: scaling must be raw, shifted, normalised, or centered");
  }
  if (config.quad_N < 4) throw ConfigError("config: quad_N must be >= 4");
  if (config.experiment == ExperimentKind::quadrature_report &&
      !config.trial_csv.empty())
    throw ConfigError("config: quadrature-report keeps no per-trial records");
}

}  // namespace wishlab
