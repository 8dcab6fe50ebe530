#include "wishlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wishlab/ensembles.hpp"
#include "wishlab/errors.hpp"
#include "wishlab/limitlaws.hpp"
#include "wishlab/majorization.hpp"
#include "wishlab/rng.hpp"
#include "wishlab/stats.hpp"

namespace wishlab {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// The config echo excludes worker count and output paths: everything that can
// change the numbers is in, everything that only changes where or how fast is
// out.  The run id is a stable fingerprint of that echo.
json m_rule_echo(const MRule& rule) {
  json j = json::object();
  switch (rule.kind) {
    case MRuleKind::none:
      j["kind"] = "none";
      break;
    case MRuleKind::fixed_ratio:
      j["kind"] = "fixed-ratio";
      j["c"] = rule.c;
      break;
    case MRuleKind::offset:
      j["kind"] = "offset";
      j["gap_C"] = rule.gap_C;
      break;
    case MRuleKind::explicit_list:
      j["kind"] = "explicit";
      j["m"] = rule.m_list;
      break;
  }
  return j;
}

json config_echo(const ExperimentConfig& cfg) {
  json j = json::object();
  j["experiment"] = experiment_name(cfg.experiment);
  j["n"] = cfg.n_values;
  j["m_rule"] = m_rule_echo(cfg.m_rule);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["eps"] = cfg.eps;
  j["t"] = cfg.threshold_t;
  j["driver"] = cfg.driver;
  j["scaling"] = cfg.scaling;
  j["quad_N"] = cfg.quad_N;
  j["validate_sampler"] = cfg.validate_sampler;
  return j;
}

std::string run_id_of(const json& echo) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(echo.dump())));
  return buf;
}

double binom_se(double p, std::size_t trials) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

// Deterministic work-stealing loop: every trial writes its preassigned slot,
// so scheduling order never reaches the results.  The first failure wins the
// race to be reported and carries the global trial index, which doubles as
// the substream index needed to replay the trial alone.
template <typename Result, typename Body>
std::vector<Result> run_parallel(std::size_t count, std::size_t workers,
                                 const Body& body) {
  std::vector<Result> slots(count);
  if (count == 0) return slots;
  const std::size_t n_workers = std::min(std::max<std::size_t>(workers, 1), count);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex fail_mutex;
  std::string fail_what;
  std::size_t fail_index = 0;

  auto loop = [&]() {
    constexpr std::size_t chunk = 16;
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t start = next.fetch_add(chunk);
      if (start >= count) return;
      const std::size_t end = std::min(count, start + chunk);
      for (std::size_t g = start; g < end; ++g) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          slots[g] = body(g);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(fail_mutex);
          if (!failed.exchange(true)) {
            fail_what = e.what();
            fail_index = g;
          }
          return;
        }
      }
    }
  };

  if (n_workers <= 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
  }
  if (failed.load())
    throw AccuracyError("trial " + std::to_string(fail_index) +
                        " failed (replay via substream index " +
                        std::to_string(fail_index) + "): " + fail_what);
  return slots;
}

// The O(n^2) sampler takes over at n >= 64; below that the dense path is at
// least as fast and doubles as a reference.  --validate-sampler forces dense
// everywhere so any fast-path discrepancy shows up as a config-only diff.
WishartSample draw_wishart(const EnsembleParams& p, RngStream& rng,
                           bool force_dense) {
  if (!force_dense && p.n >= 64 && p.m >= p.n)
    return wishart_spectrum_fast(p, rng);
  return wishart_spectrum_dense(p, rng);
}

std::vector<std::size_t> resolve_all_m(const ExperimentConfig& cfg) {
  std::vector<std::size_t> ms(cfg.n_values.size(), 0);
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
    ms[i] = resolve_m(cfg.m_rule, cfg.n_values[i], i);
  return ms;
}

json fit_to_json(const PowerLawFit& fit) {
  json j = json::object();
  j["theta"] = fit.theta;
  j["std_error"] = fit.std_error;
  j["r_squared"] = fit.r_squared;
  j["log_amplitude"] = fit.log_amplitude;
  j["excluded"] = fit.excluded;
  return j;
}

// Power-law fit of a probability column, or null when there are not enough
// usable points (fewer than three rows, or too many exact zeros).
json maybe_fit(const std::vector<double>& ns, const std::vector<double>& ps,
               const std::vector<double>& ses) {
  if (ns.size() >= 3) {
    try {
      return fit_to_json(fit_power_law(ns, ps, ses));
    } catch (const ValidationError&) {
    }
  }
  return json(nullptr);
}

// Fitted value for the plot CSV; falls back to the empirical point when no
// fit exists so the column is always populated.
double fit_value(const json& fitj, double n, double fallback) {
  if (fitj.is_null()) return fallback;
  const double la = fitj["log_amplitude"].get<double>();
  const double theta = fitj["theta"].get<double>();
  return std::exp(la) * std::pow(n, -theta);
}

SummaryRecord finish(const ExperimentConfig& cfg, json results) {
  SummaryRecord rec;
  const json echo = config_echo(cfg);
  rec.summary = json::object();
  rec.summary["config"] = echo;
  rec.summary["run_id"] = run_id_of(echo);
  rec.summary["results"] = std::move(results);
  return rec;
}

// ---------------------------------------------------------------------------
// Dominance decay (Wishart pairs or flat simplex pairs)

struct DecayTrial {
  unsigned char dom0 = 0;
  unsigned char dom12 = 0;
};

SummaryRecord run_decay(const ExperimentConfig& cfg) {
  const bool wishart = cfg.experiment == ExperimentKind::nielsen_decay;
  const std::vector<std::size_t>& ns = cfg.n_values;
  const std::vector<std::size_t> ms =
      wishart ? resolve_all_m(cfg) : std::vector<std::size_t>(ns.size(), 0);
  const std::size_t T = cfg.trials;

  const auto slots = run_parallel<DecayTrial>(
      ns.size() * T, cfg.workers, [&](std::size_t g) {
        const std::size_t row = g / T;
        RngStream rng = derive_substream(cfg.seed, static_cast<std::uint64_t>(g));
        SimplexVector x, y;
        if (wishart) {
          const EnsembleParams params{ns[row], ms[row]};
          const WishartSample a = draw_wishart(params, rng, cfg.validate_sampler);
          const WishartSample b = draw_wishart(params, rng, cfg.validate_sampler);
          x = trace_normalise(a);
          y = trace_normalise(b);
        } else {
          x = sorted_uniform_simplex_renyi(ns[row], rng);
          y = sorted_uniform_simplex_renyi(ns[row], rng);
        }
        DecayTrial out;
        out.dom0 = tails_dominated(x, y, 0.0).dominated ? 1 : 0;
        out.dom12 = tails_dominated(x, y, 1e-12).dominated ? 1 : 0;
        return out;
      });

  SummaryRecord rec;
  rec.trial_csv_header = wishart
                             ? "experiment,n,m,trial,dominated_tol0,dominated_tol12"
                             : "experiment,n,trial,dominated_tol0,dominated_tol12";
  const std::string name = experiment_name(cfg.experiment);
  json rows = json::array();
  std::vector<double> nv, p0v, se0v, p12v, se12v;
  for (std::size_t r = 0; r < ns.size(); ++r) {
    std::size_t c0 = 0, c12 = 0;
    for (std::size_t j = 0; j < T; ++j) {
      const DecayTrial& tr = slots[r * T + j];
      c0 += tr.dom0;
      c12 += tr.dom12;
      std::string line = name + "," + std::to_string(ns[r]) + ",";
      if (wishart) line += std::to_string(ms[r]) + ",";
      line += std::to_string(j) + "," + std::to_string(int(tr.dom0)) + "," +
              std::to_string(int(tr.dom12));
      rec.trial_csv_rows.push_back(std::move(line));
    }
    const double p0 = static_cast<double>(c0) / static_cast<double>(T);
    const double p12 = static_cast<double>(c12) / static_cast<double>(T);
    nv.push_back(static_cast<double>(ns[r]));
    p0v.push_back(p0);
    se0v.push_back(binom_se(p0, T));
    p12v.push_back(p12);
    se12v.push_back(binom_se(p12, T));
    json row = json::object();
    row["n"] = ns[r];
    if (wishart) row["m"] = ms[r];
    row["trials"] = T;
    row["p_tol0"] = p0;
    row["se_tol0"] = se0v.back();
    row["p_tol12"] = p12;
    row["se_tol12"] = se12v.back();
    rows.push_back(std::move(row));
  }

  const json fit0 = maybe_fit(nv, p0v, se0v);
  const json fit12 = maybe_fit(nv, p12v, se12v);
  rec.has_plot = true;
  for (std::size_t r = 0; r < nv.size(); ++r)
    rec.plot_rows.push_back(std::to_string(ns[r]) + "," + fmt(p0v[r]) + "," +
                            fmt(se0v[r]) + "," +
                            fmt(fit_value(fit0, nv[r], p0v[r])));

  json results = json::object();
  results["rows"] = std::move(rows);
  results["fit_tol0"] = fit0;
  results["fit_tol12"] = fit12;
  SummaryRecord out = finish(cfg, std::move(results));
  out.trial_csv_header = std::move(rec.trial_csv_header);
  out.trial_csv_rows = std::move(rec.trial_csv_rows);
  out.plot_rows = std::move(rec.plot_rows);
  out.has_plot = true;
  return out;
}

// ---------------------------------------------------------------------------
// Conversion-probability distribution

SummaryRecord run_pi_dist(const ExperimentConfig& cfg) {
  const std::vector<std::size_t>& ns = cfg.n_values;
  const std::vector<std::size_t> ms = resolve_all_m(cfg);
  const std::size_t T = cfg.trials;

  const auto slots =
      run_parallel<double>(ns.size() * T, cfg.workers, [&](std::size_t g) {
        const std::size_t row = g / T;
        RngStream rng = derive_substream(cfg.seed, static_cast<std::uint64_t>(g));
        const EnsembleParams params{ns[row], ms[row]};
        const WishartSample a = draw_wishart(params, rng, cfg.validate_sampler);
        const WishartSample b = draw_wishart(params, rng, cfg.validate_sampler);
        return vidal_pi(trace_normalise(a), trace_normalise(b));
      });

  SummaryRecord rec;
  rec.trial_csv_header = "experiment,n,m,trial,pi";
  const std::string name = experiment_name(cfg.experiment);
  constexpr std::size_t kBins = 20;
  json rows = json::array();
  for (std::size_t r = 0; r < ns.size(); ++r) {
    double sum = 0.0;
    std::size_t below = 0;
    std::vector<std::size_t> hist(kBins, 0);
    for (std::size_t j = 0; j < T; ++j) {
      const double pi = slots[r * T + j];
      sum += pi;
      if (pi < 0.9) ++below;
      const auto bin = std::min<std::size_t>(
          kBins - 1, static_cast<std::size_t>(pi * static_cast<double>(kBins)));
      ++hist[bin];
      rec.trial_csv_rows.push_back(name + "," + std::to_string(ns[r]) + "," +
                                   std::to_string(ms[r]) + "," +
                                   std::to_string(j) + "," + fmt(pi));
    }
    const double mean = sum / static_cast<double>(T);
    double m2 = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
      const double d = slots[r * T + j] - mean;
      m2 += d * d;
    }
    const double var = (T >= 2) ? m2 / static_cast<double>(T - 1) : 0.0;
    const double p_below = static_cast<double>(below) / static_cast<double>(T);

    json row = json::object();
    row["n"] = ns[r];
    row["m"] = ms[r];
    row["trials"] = T;
    row["mean_pi"] = mean;
    row["se_mean"] = std::sqrt(var / static_cast<double>(T));
    row["variance"] = var;
    row["prob_below_0p9"] = p_below;
    row["se_below_0p9"] = binom_se(p_below, T);
    row["histogram"] = hist;
    rows.push_back(std::move(row));
  }

  json results = json::object();
  results["bins"] = kBins;
  results["rows"] = std::move(rows);
  SummaryRecord out = finish(cfg, std::move(results));
  out.trial_csv_header = std::move(rec.trial_csv_header);
  out.trial_csv_rows = std::move(rec.trial_csv_rows);
  return out;
}

// ---------------------------------------------------------------------------
// Linear-statistic fluctuations

ScalingMode scaling_mode_for(const std::string& scaling, std::size_t m) {
  if (scaling == "raw") return ScalingMode::raw();
  if (scaling == "shifted") return ScalingMode::shifted(static_cast<double>(m));
  if (scaling == "normalised") return ScalingMode::normalised();
  return ScalingMode::centered();  // vocabulary enforced at config validation
}

double binomial_coefficient(unsigned k, unsigned j) {
  double v = 1.0;
  for (unsigned i = 0; i < j; ++i)
    v = v * static_cast<double>(k - i) / static_cast<double>(i + 1);
  return v;
}

// Monomial-basis coefficients of the test family actually measured:
// raw uses f_k(x) = x^k, shifted uses f_k(x) = ((x - c) / (2 sqrt c))^k with
// x the eigenvalue over n.  Expanding in monomials keeps the covariance
// targets on the exact divided-difference path.
std::vector<std::vector<double>> family_coefficients(const std::string& scaling,
                                                     double c, unsigned kmax) {
  std::vector<std::vector<double>> a(kmax + 1,
                                     std::vector<double>(kmax + 1, 0.0));
  if (scaling == "raw") {
    for (unsigned k = 0; k <= kmax; ++k) a[k][k] = 1.0;
    return a;
  }
  const double s = 1.0 / (2.0 * std::sqrt(c));
  for (unsigned k = 0; k <= kmax; ++k)
    for (unsigned j = 0; j <= k; ++j)
      a[k][j] = binomial_coefficient(k, j) * std::pow(s, k) *
                std::pow(-c, static_cast<double>(k - j));
  return a;
}

// Limit predictions for the measured family: means n * integral f_k d(MP_c)
// and the covariance bilinear form in both prefactor conventions.  Only the
// raw and shifted scalings have clean limits; the others return null.
json clt_targets(const std::string& scaling, double c, std::size_t n,
                 const std::vector<unsigned>& degrees, std::size_t quad_N) {
  if (scaling != "raw" && scaling != "shifted") return json(nullptr);
  const unsigned kmax = *std::max_element(degrees.begin(), degrees.end());
  const auto coeff = family_coefficients(scaling, c, kmax);

  std::vector<double> mp_moment(kmax + 1, 0.0);
  for (unsigned j = 0; j <= kmax; ++j)
    mp_moment[j] = gamma_mp(TestFunction::monomial(j), c, quad_N);

  std::vector<std::vector<double>> g_aw(kmax + 1, std::vector<double>(kmax + 1, 0.0));
  std::vector<std::vector<double>> g_cal = g_aw;
  for (unsigned j = 1; j <= kmax; ++j)
    for (unsigned i = j; i <= kmax; ++i) {
      const TestFunction fj = TestFunction::monomial(j);
      const TestFunction fi = TestFunction::monomial(i);
      g_aw[j][i] = g_aw[i][j] =
          big_gamma_c(fj, fi, c, quad_N, BigGammaMode::as_written);
      g_cal[j][i] = g_cal[i][j] =
          big_gamma_c(fj, fi, c, quad_N, BigGammaMode::clt_calibrated);
    }

  const std::size_t d = degrees.size();
  std::vector<double> means(d, 0.0);
  std::vector<double> cov_aw(d * d, 0.0), cov_cal(d * d, 0.0);
  for (std::size_t a_idx = 0; a_idx < d; ++a_idx) {
    const unsigned k = degrees[a_idx];
    for (unsigned j = 0; j <= k; ++j)
      means[a_idx] += coeff[k][j] * mp_moment[j];
    means[a_idx] *= static_cast<double>(n);
    for (std::size_t b_idx = 0; b_idx < d; ++b_idx) {
      const unsigned l = degrees[b_idx];
      double aw = 0.0, cal = 0.0;
      for (unsigned j = 1; j <= k; ++j)
        for (unsigned i = 1; i <= l; ++i) {
          aw += coeff[k][j] * coeff[l][i] * g_aw[j][i];
          cal += coeff[k][j] * coeff[l][i] * g_cal[j][i];
        }
      cov_aw[a_idx * d + b_idx] = aw;
      cov_cal[a_idx * d + b_idx] = cal;
    }
  }

  json t = json::object();
  t["means"] = means;
  t["cov_as_written"] = cov_aw;
  t["cov_calibrated"] = cov_cal;
  return t;
}

SummaryRecord run_clt(const ExperimentConfig& cfg) {
  const std::vector<std::size_t>& ns = cfg.n_values;
  const std::vector<std::size_t> ms = resolve_all_m(cfg);
  const std::size_t T = cfg.trials;
  const std::vector<unsigned> degrees{1, 2, 3, 4};
  std::vector<TestFunction> fs;
  fs.reserve(degrees.size());
  for (unsigned k : degrees) fs.push_back(TestFunction::monomial(k));

  const auto slots = run_parallel<std::vector<double>>(
      ns.size() * T, cfg.workers, [&](std::size_t g) {
        const std::size_t row = g / T;
        RngStream rng = derive_substream(cfg.seed, static_cast<std::uint64_t>(g));
        const EnsembleParams params{ns[row], ms[row]};
        const WishartSample w = draw_wishart(params, rng, cfg.validate_sampler);
        return linear_statistics(w.spectrum, fs,
                                 scaling_mode_for(cfg.scaling, ms[row]));
      });

  SummaryRecord rec;
  rec.trial_csv_header = "experiment,n,m,trial,x1,x2,x3,x4";
  const std::string name = experiment_name(cfg.experiment);
  const std::size_t d = degrees.size();
  json rows = json::array();
  for (std::size_t r = 0; r < ns.size(); ++r) {
    MomentSummary moments;
    std::vector<std::vector<double>> samples;
    samples.reserve(T);
    for (std::size_t j = 0; j < T; ++j) {
      const std::vector<double>& obs = slots[r * T + j];
      accumulate_moments(moments, obs);
      samples.push_back(obs);
      std::string line = name + "," + std::to_string(ns[r]) + "," +
                         std::to_string(ms[r]) + "," + std::to_string(j);
      for (double v : obs) line += "," + fmt(v);
      rec.trial_csv_rows.push_back(std::move(line));
    }

    const double c_row =
        static_cast<double>(ms[r]) / static_cast<double>(ns[r]);
    const json targets =
        clt_targets(cfg.scaling, c_row, ns[r], degrees, cfg.quad_N);

    json row = json::object();
    row["n"] = ns[r];
    row["m"] = ms[r];
    row["trials"] = T;
    row["degrees"] = degrees;
    row["mean"] = moments.mean;
    row["covariance"] = moments.covariance_matrix();
    row["targets"] = targets;
    if (T >= 1000) {
      std::vector<double> target_cov;
      if (!targets.is_null())
        target_cov = targets["cov_calibrated"].get<std::vector<double>>();
      const CltDiagnostic diag = clt_diagnostic(moments, samples, target_cov);
      json dj = json::object();
      std::vector<double> skew(d), exkurt(d), ks_stat(d), ks_p(d);
      std::vector<bool> degen(d);
      for (std::size_t i = 0; i < d; ++i) {
        skew[i] = diag.coords[i].skewness;
        exkurt[i] = diag.coords[i].excess_kurtosis;
        ks_stat[i] = diag.coords[i].ks_stat;
        ks_p[i] = diag.coords[i].ks_pvalue;
        degen[i] = diag.coords[i].degenerate;
      }
      dj["skewness"] = skew;
      dj["excess_kurtosis"] = exkurt;
      dj["ks_stat"] = ks_stat;
      dj["ks_pvalue"] = ks_p;
      dj["degenerate"] = degen;
      if (!target_cov.empty()) dj["max_cov_rel_err"] = diag.max_cov_rel_err;
      row["diagnostics"] = std::move(dj);
    } else {
      row["diagnostics"] = json(nullptr);
    }
    rows.push_back(std::move(row));
  }

  json results = json::object();
  results["rows"] = std::move(rows);
  SummaryRecord out = finish(cfg, std::move(results));
  out.trial_csv_header = std::move(rec.trial_csv_header);
  out.trial_csv_rows = std::move(rec.trial_csv_rows);
  return out;
}

// ---------------------------------------------------------------------------
// Integrated-walk persistence

SummaryRecord run_persistence(const ExperimentConfig& cfg) {
  const std::vector<std::size_t>& cutoffs = cfg.n_values;
  const std::size_t n_max = cutoffs.back();
  const PersistenceDriver driver = (cfg.driver == "gaussian")
                                       ? PersistenceDriver::gaussian
                                       : PersistenceDriver::exponential_difference;
  const std::size_t T = cfg.trials;

  const auto slots =
      run_parallel<std::size_t>(T, cfg.workers, [&](std::size_t g) {
        RngStream rng = derive_substream(cfg.seed, static_cast<std::uint64_t>(g));
        return persistence_first_fail(rng, n_max, cfg.threshold_t, driver);
      });

  SummaryRecord rec;
  rec.trial_csv_header = "experiment,trial,first_fail";
  const std::string name = experiment_name(cfg.experiment);
  for (std::size_t j = 0; j < T; ++j)
    rec.trial_csv_rows.push_back(name + "," + std::to_string(j) + "," +
                                 std::to_string(slots[j]));

  json rows = json::array();
  std::vector<double> nv, pv, sev;
  for (const std::size_t N : cutoffs) {
    std::size_t survived = 0;
    for (std::size_t j = 0; j < T; ++j)
      if (slots[j] > N) ++survived;
    const double p = static_cast<double>(survived) / static_cast<double>(T);
    nv.push_back(static_cast<double>(N));
    pv.push_back(p);
    sev.push_back(binom_se(p, T));
    json row = json::object();
    row["N"] = N;
    row["trials"] = T;
    row["p"] = p;
    row["se"] = sev.back();
    rows.push_back(std::move(row));
  }

  const json fit = maybe_fit(nv, pv, sev);
  rec.has_plot = true;
  for (std::size_t r = 0; r < nv.size(); ++r)
    rec.plot_rows.push_back(std::to_string(cutoffs[r]) + "," + fmt(pv[r]) + "," +
                            fmt(sev[r]) + "," +
                            fmt(fit_value(fit, nv[r], pv[r])));

  json results = json::object();
  results["rows"] = std::move(rows);
  results["fit"] = fit;
  SummaryRecord out = finish(cfg, std::move(results));
  out.trial_csv_header = std::move(rec.trial_csv_header);
  out.trial_csv_rows = std::move(rec.trial_csv_rows);
  out.plot_rows = std::move(rec.plot_rows);
  out.has_plot = true;
  return out;
}

// ---------------------------------------------------------------------------
// Entrywise spectral concentration

SummaryRecord run_concentration(const ExperimentConfig& cfg) {
  const std::vector<std::size_t>& ns = cfg.n_values;
  const std::vector<std::size_t> ms = resolve_all_m(cfg);
  const std::size_t T = cfg.trials;
  const double eps = cfg.eps;

  const auto slots = run_parallel<unsigned char>(
      ns.size() * T, cfg.workers, [&](std::size_t g) {
        const std::size_t row = g / T;
        RngStream rng = derive_substream(cfg.seed, static_cast<std::uint64_t>(g));
        const EnsembleParams params{ns[row], ms[row]};
        const WishartSample a = draw_wishart(params, rng, cfg.validate_sampler);
        const WishartSample b = draw_wishart(params, rng, cfg.validate_sampler);
        for (std::size_t k = 0; k < a.spectrum.values.size(); ++k) {
          const double lo = (1.0 - eps) * b.spectrum.values[k];
          const double hi = (1.0 + eps) * b.spectrum.values[k];
          if (a.spectrum.values[k] < lo || a.spectrum.values[k] > hi)
            return static_cast<unsigned char>(0);
        }
        return static_cast<unsigned char>(1);
      });

  SummaryRecord rec;
  rec.trial_csv_header = "experiment,n,m,trial,within_band";
  const std::string name = experiment_name(cfg.experiment);
  json rows = json::array();
  std::vector<double> nv, pv, sev;
  for (std::size_t r = 0; r < ns.size(); ++r) {
    std::size_t hits = 0;
    for (std::size_t j = 0; j < T; ++j) {
      hits += slots[r * T + j];
      rec.trial_csv_rows.push_back(name + "," + std::to_string(ns[r]) + "," +
                                   std::to_string(ms[r]) + "," +
                                   std::to_string(j) + "," +
                                   std::to_string(int(slots[r * T + j])));
    }
    const double p = static_cast<double>(hits) / static_cast<double>(T);
    nv.push_back(static_cast<double>(ns[r]));
    pv.push_back(p);
    sev.push_back(binom_se(p, T));
    json row = json::object();
    row["n"] = ns[r];
    row["m"] = ms[r];
    row["trials"] = T;
    row["p"] = p;
    row["se"] = sev.back();
    rows.push_back(std::move(row));
  }

  const json fit = maybe_fit(nv, pv, sev);
  rec.has_plot = true;
  for (std::size_t r = 0; r < nv.size(); ++r)
    rec.plot_rows.push_back(std::to_string(ns[r]) + "," + fmt(pv[r]) + "," +
                            fmt(sev[r]) + "," +
                            fmt(fit_value(fit, nv[r], pv[r])));

  json results = json::object();
  results["rows"] = std::move(rows);
  results["fit"] = fit;
  SummaryRecord out = finish(cfg, std::move(results));
  out.trial_csv_header = std::move(rec.trial_csv_header);
  out.trial_csv_rows = std::move(rec.trial_csv_rows);
  out.plot_rows = std::move(rec.plot_rows);
  out.has_plot = true;
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature self-audit (no sampling)

SummaryRecord run_quadrature_report(const ExperimentConfig& cfg) {
  const std::size_t N = cfg.quad_N;
  const double pi = 3.14159265358979323846;
  json res = json::object();
  res["kernel_mass"] = kernel_mass(N);

  {
    json semi = json::object();
    for (const auto mode : {GammaMode::density, GammaMode::as_written}) {
      json tbl = json::object();
      for (unsigned j = 0; j <= 4; ++j)
        tbl["x^" + std::to_string(j)] =
            gamma_semicircle(TestFunction::monomial(j), N, mode);
      semi[mode == GammaMode::density ? "density" : "as_written"] = tbl;
    }
    res["semicircle_gamma"] = semi;
  }

  const std::vector<double> c_set{1.0, 2.0, 4.0};
  {
    json mp = json::array();
    for (const double c : c_set) {
      json row = json::object();
      row["c"] = c;
      json tbl = json::object();
      for (unsigned j = 0; j <= 3; ++j)
        tbl["x^" + std::to_string(j)] = gamma_mp(TestFunction::monomial(j), c, N);
      row["moments"] = tbl;
      mp.push_back(std::move(row));
    }
    res["mp_gamma"] = mp;
  }

  {
    json cov = json::object();
    const TestFunction x1 = TestFunction::monomial(1);
    const TestFunction x2 = TestFunction::monomial(2);
    const TestFunction x3 = TestFunction::monomial(3);
    for (const auto mode : {BigGammaMode::as_written, BigGammaMode::clt_calibrated}) {
      json tbl = json::object();
      tbl["x,x"] = big_gamma(x1, x1, N, mode);
      tbl["x^2,x^2"] = big_gamma(x2, x2, N, mode);
      tbl["x,x^3"] = big_gamma(x1, x3, N, mode);
      cov[mode == BigGammaMode::as_written ? "as_written" : "calibrated"] = tbl;
    }
    res["covariance_semicircle"] = cov;

    json cov_c = json::array();
    for (const double c : c_set) {
      json row = json::object();
      row["c"] = c;
      row["x,x_as_written"] = big_gamma_c(x1, x1, c, N, BigGammaMode::as_written);
      row["x,x_calibrated"] =
          big_gamma_c(x1, x1, c, N, BigGammaMode::clt_calibrated);
      cov_c.push_back(std::move(row));
    }
    res["covariance_mp"] = cov_c;
  }

  {
    json soft = json::array();
    const std::size_t k_edge = 10000;
    const std::size_t N_edge = std::max<std::size_t>(N, 2048);
    for (const double c : c_set) {
      const MPParams p = mp_params(c);
      const TestFunction h = TestFunction::scaled_monomial(k_edge, p.a_plus);
      const double scaled =
          std::pow(static_cast<double>(k_edge), 1.5) * gamma_mp(h, c, N_edge);
      const double limit = c_limit_constant(c);
      json row = json::object();
      row["c"] = c;
      row["k"] = k_edge;
      row["scaled_gamma"] = scaled;
      row["limit_constant"] = limit;
      row["rel_dev"] = std::abs(scaled - limit) / limit;
      soft.push_back(std::move(row));
    }
    res["soft_edge"] = soft;
  }

  {
    const LimitConstants lim =
        estimate_limit_constants({100, 200, 400}, {1.0, 4.0}, N);
    if (!lim.alpha_converged || !lim.alpha_c_converged)
      throw AccuracyError("covariance limit estimates did not converge");
    json limj = json::object();
    limj["alpha"] = lim.alpha;
    limj["alpha_ref"] = 2.0 / pi;
    limj["alpha_rel_dev"] = lim.alpha_limit_rel_dev;
    limj["alpha_c"] = lim.alpha_c;
    limj["alpha_c_ref"] = 1.0 / pi;
    limj["alpha_c_rel_dev"] = lim.alpha_c_limit_rel_dev;
    limj["C_1"] = lim.C_c;
    json table = json::array();
    for (const auto& [A, I] : lim.I_of_A) {
      json row = json::object();
      row["A"] = A;
      row["I"] = I;
      row["closed_form"] = 4.0 * pi * std::sqrt(A) / (1.0 + A);
      table.push_back(std::move(row));
    }
    limj["I_of_A"] = table;
    res["limit_constants"] = limj;
  }

  return finish(cfg, std::move(res));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

SummaryRecord run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::nielsen_decay:
    case ExperimentKind::uniform_decay:
      return run_decay(cfg);
    case ExperimentKind::pi_dist:
      return run_pi_dist(cfg);
    case ExperimentKind::clt_check:
      return run_clt(cfg);
    case ExperimentKind::persistence:
      return run_persistence(cfg);
    case ExperimentKind::concentration:
      return run_concentration(cfg);
    case ExperimentKind::quadrature_report:
      return run_quadrature_report(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

std::string render_summary(const SummaryRecord& record, bool with_timestamp) {
  json doc = record.summary;
  if (with_timestamp) {
    char buf[40];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    doc["timestamp"] = buf;
  }
  return doc.dump(2) + "\n";
}

void emit_outputs(const SummaryRecord& record, const ExperimentConfig& config) {
  const std::string text = render_summary(record, true);
  std::fwrite(text.data(), 1, text.size(), stdout);
  std::fflush(stdout);

  if (!config.out_path.empty()) write_text_file(config.out_path, text);
  if (!config.trial_csv.empty()) {
    if (record.trial_csv_header.empty())
      throw ConfigError("this experiment keeps no per-trial records");
    std::string csv = record.trial_csv_header + "\n";
    for (const std::string& row : record.trial_csv_rows) {
      csv += row;
      csv += '\n';
    }
    write_text_file(config.trial_csv, csv);
  }
  if (!config.plot_csv.empty()) {
    std::string csv = "n,probability,stderr,fit\n";
    for (const std::string& row : record.plot_rows) {
      csv += row;
      csv += '\n';
    }
    write_text_file(config.plot_csv, csv);
  }
}

}  // namespace wishlab
