#include "wishlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wishlab/errors.hpp"
#include "wishlab/rng.hpp"

namespace wishlab {

namespace {

std::vector<double> apply_functions(const std::vector<double>& scaled,
                                    const std::vector<TestFunction>& fs) {
  std::vector<double> out(fs.size(), 0.0);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    double s = 0.0;
    for (double x : scaled) s += fs[i](x);
    out[i] = s;
  }
  return out;
}

}  // namespace

std::vector<double> linear_statistics(const SpectrumRaw& spectrum,
                                      const std::vector<TestFunction>& fs,
                                      const ScalingMode& mode) {
  if (spectrum.values.empty())
    throw ValidationError("linear_statistics: empty spectrum");
  const double n = static_cast<double>(spectrum.n);
  std::vector<double> scaled;
  scaled.reserve(spectrum.values.size());
  switch (mode.kind) {
    case ScalingKind::raw:
      for (double mu : spectrum.values) scaled.push_back(mu / n);
      break;
    case ScalingKind::shifted: {
      if (!(mode.shift_m > 0.0))
        throw ValidationError("shifted scaling needs a positive m");
      if (mode.shift_m != static_cast<double>(spectrum.m))
        throw ValidationError("shifted scaling m disagrees with the spectrum");
      const double denom = 2.0 * std::sqrt(mode.shift_m * n);
      for (double mu : spectrum.values) scaled.push_back((mu - mode.shift_m) / denom);
      break;
    }
    case ScalingKind::normalised:
    case ScalingKind::centered: {
      WishartSample wrapped;
      wrapped.spectrum = spectrum;
      wrapped.trace = std::accumulate(spectrum.values.begin(),
                                      spectrum.values.end(), 0.0);
      const SimplexVector lambda = trace_normalise(wrapped);
      return linear_statistics(lambda, fs, mode);
    }
  }
  return apply_functions(scaled, fs);
}

std::vector<double> linear_statistics(const SimplexVector& lambda,
                                      const std::vector<TestFunction>& fs,
                                      const ScalingMode& mode) {
  if (lambda.values.empty())
    throw ValidationError("linear_statistics: empty spectrum");
  if (mode.kind == ScalingKind::raw || mode.kind == ScalingKind::shifted)
    throw ValidationError("simplex spectra carry no unnormalised scale");
  std::vector<double> scaled = lambda.values;
  if (mode.kind == ScalingKind::centered) {
    const double inv_n = 1.0 / static_cast<double>(scaled.size());
    for (double& v : scaled) v -= inv_n;
  }
  return apply_functions(scaled, fs);
}

std::vector<double> cor_normalized_statistic(std::size_t n,
                                             const std::vector<unsigned>& degrees,
                                             const std::vector<double>& y,
                                             double mean_x1,
                                             const std::vector<double>& mean_xi) {
  if (degrees.size() != y.size() || degrees.size() != mean_xi.size())
    throw ValidationError("cor_normalized_statistic: length mismatch");
  if (n == 0) throw ValidationError("cor_normalized_statistic: n must be positive");
  std::vector<double> out(degrees.size(), 0.0);
  for (std::size_t j = 0; j < degrees.size(); ++j) {
    if (mean_xi[j] == 0.0)
      throw DegenerateSampleError("cor_normalized_statistic: zero denominator");
    const double num = y[j] * std::pow(mean_x1, static_cast<double>(degrees[j]));
    out[j] = static_cast<double>(n) * (num / mean_xi[j] - 1.0);
  }
  return out;
}

double MomentSummary::covariance(std::size_t i, std::size_t j) const {
  if (count < 2) return 0.0;
  return m2[i * dim() + j] / static_cast<double>(count - 1);
}

std::vector<double> MomentSummary::covariance_matrix() const {
  const std::size_t d = dim();
  std::vector<double> cov(d * d, 0.0);
  if (count >= 2)
    for (std::size_t k = 0; k < d * d; ++k)
      cov[k] = m2[k] / static_cast<double>(count - 1);
  return cov;
}

void accumulate_moments(MomentSummary& summary, const std::vector<double>& obs) {
  const std::size_t d = summary.dim();
  if (d == 0) {
    summary.mean.assign(obs.size(), 0.0);
    summary.m2.assign(obs.size() * obs.size(), 0.0);
  } else if (obs.size() != d) {
    throw ValidationError("accumulate_moments: dimension mismatch");
  }
  const std::size_t dd = summary.dim();
  summary.count += 1;
  const double inv = 1.0 / static_cast<double>(summary.count);
  std::vector<double> delta(dd), delta2(dd);
  for (std::size_t i = 0; i < dd; ++i) delta[i] = obs[i] - summary.mean[i];
  for (std::size_t i = 0; i < dd; ++i) summary.mean[i] += delta[i] * inv;
  for (std::size_t i = 0; i < dd; ++i) delta2[i] = obs[i] - summary.mean[i];
  // fill the upper triangle and mirror so the co-moment stays exactly symmetric
  for (std::size_t i = 0; i < dd; ++i)
    for (std::size_t j = i; j < dd; ++j) {
      const double v = delta[i] * delta2[j];
      summary.m2[i * dd + j] += v;
      if (j != i) summary.m2[j * dd + i] += v;
    }
}

MomentSummary merge_moments(const MomentSummary& a, const MomentSummary& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  if (a.dim() != b.dim())
    throw ValidationError("merge_moments: dimension mismatch");
  const std::size_t d = a.dim();
  MomentSummary out(d);
  out.count = a.count + b.count;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  const double nt = na + nb;
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = b.mean[i] - a.mean[i];
  for (std::size_t i = 0; i < d; ++i)
    out.mean[i] = a.mean[i] + delta[i] * (nb / nt);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double v = a.m2[i * d + j] + b.m2[i * d + j] +
                       delta[i] * delta[j] * (na * nb / nt);
      out.m2[i * d + j] = v;
      out.m2[j * d + i] = v;
    }
  return out;
}

double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf) {
  if (values.empty()) throw ValidationError("ks_statistic: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double ks_pvalue(double stat, std::size_t count) {
  if (count == 0) throw ValidationError("ks_pvalue: empty sample");
  const double sn = std::sqrt(static_cast<double>(count));
  const double lambda = (sn + 0.12 + 0.11 / sn) * stat;
  double p = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    p += 2.0 * sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, p));
}

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

CltDiagnostic clt_diagnostic(const MomentSummary& summary,
                             const std::vector<std::vector<double>>& samples,
                             const std::vector<double>& target_cov) {
  const std::size_t d = summary.dim();
  if (d == 0) throw ValidationError("clt_diagnostic: empty summary");
  if (samples.size() < 1000)
    throw ValidationError("clt_diagnostic needs at least 1000 stored samples");
  for (const auto& s : samples)
    if (s.size() != d) throw ValidationError("clt_diagnostic: dimension mismatch");
  if (!target_cov.empty() && target_cov.size() != d * d)
    throw ValidationError("clt_diagnostic: target covariance has wrong shape");

  CltDiagnostic out;
  out.coords.resize(d);
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < d; ++i) {
    CoordinateDiagnostic& cd = out.coords[i];
    const double mu = summary.mean[i];
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (const auto& s : samples) {
      const double dev = s[i] - mu;
      s2 += dev * dev;
      s3 += dev * dev * dev;
      s4 += dev * dev * dev * dev;
    }
    s2 /= n;
    s3 /= n;
    s4 /= n;
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
      cd.degenerate = true;
      continue;
    }
    cd.skewness = s3 / std::pow(s2, 1.5);
    cd.excess_kurtosis = s4 / (s2 * s2) - 3.0;
    const double sd = std::sqrt(s2);
    std::vector<double> z;
    z.reserve(samples.size());
    for (const auto& s : samples) z.push_back((s[i] - mu) / sd);
    cd.ks_stat = ks_statistic(std::move(z), standard_normal_cdf);
    cd.ks_pvalue = ks_pvalue(cd.ks_stat, samples.size());
  }

  if (!target_cov.empty()) {
    out.cov_rel_err.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double got = summary.covariance(i, j);
        const double want = target_cov[i * d + j];
        const double err = (std::abs(want) > 1e-12)
                               ? std::abs(got - want) / std::abs(want)
                               : std::abs(got - want);
        out.cov_rel_err[i * d + j] = err;
        out.max_cov_rel_err = std::max(out.max_cov_rel_err, err);
      }
  }
  return out;
}

std::vector<double> iterated_partial_sums(const std::vector<double>& w) {
  std::vector<double> s(w.size(), 0.0);
  double prefix = 0.0, total = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    prefix += w[q];
    total += prefix;
    s[q] = total;
  }
  return s;
}

std::size_t persistence_first_fail(RngStream& rng, std::size_t n_max, double t,
                                   PersistenceDriver driver) {
  double prefix = 0.0, s = 0.0;
  for (std::size_t q = 1; q <= n_max; ++q) {
    const double w = (driver == PersistenceDriver::gaussian)
                         ? rng.next_normal()
                         : rng.next_exponential() - rng.next_exponential();
    prefix += w;
    s += prefix;
    if (!(s < t)) return q;
  }
  return n_max + 1;
}

PersistenceResult persistence_probability(const std::vector<std::size_t>& N_values,
                                          std::size_t trials, double t,
                                          PersistenceDriver driver,
                                          std::uint64_t seed) {
  if (N_values.empty()) throw ValidationError("persistence: empty N list");
  for (std::size_t i = 0; i + 1 < N_values.size(); ++i)
    if (N_values[i] >= N_values[i + 1])
      throw ValidationError("persistence: N values must be strictly increasing");
  if (N_values.front() == 0)
    throw ValidationError("persistence: N values must be positive");
  if (trials < 1000) throw ValidationError("persistence needs at least 1000 trials");

  const std::size_t n_max = N_values.back();
  std::vector<std::size_t> survived(N_values.size(), 0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RngStream rng = derive_substream(seed, trial);
    const std::size_t first_fail = persistence_first_fail(rng, n_max, t, driver);
    for (std::size_t i = 0; i < N_values.size(); ++i)
      if (first_fail > N_values[i]) survived[i] += 1;
  }

  PersistenceResult out;
  out.N_values = N_values;
  out.threshold = t;
  const double tr = static_cast<double>(trials);
  for (std::size_t i = 0; i < N_values.size(); ++i) {
    const double p = static_cast<double>(survived[i]) / tr;
    out.probabilities.push_back(p);
    out.stderrs.push_back(std::sqrt(p * (1.0 - p) / tr));
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& n_values,
                          const std::vector<double>& probabilities,
                          const std::vector<double>& stderrs) {
  if (n_values.size() != probabilities.size() || n_values.size() != stderrs.size())
    throw ValidationError("fit_power_law: length mismatch");
  std::vector<double> x, ylog, wgt;
  PowerLawFit fit;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (!(n_values[i] > 0.0))
      throw ValidationError("fit_power_law: n values must be positive");
    if (probabilities[i] <= 0.0) {
      fit.excluded += 1;
      continue;
    }
    if (!(stderrs[i] > 0.0))
      throw ValidationError("fit_power_law: standard errors must be positive");
    x.push_back(std::log(n_values[i]));
    ylog.push_back(std::log(probabilities[i]));
    const double rel = stderrs[i] / probabilities[i];
    wgt.push_back(1.0 / (rel * rel));
  }
  if (x.size() < 3)
    throw ValidationError("fit_power_law needs at least 3 usable points");

  const double wsum = std::accumulate(wgt.begin(), wgt.end(), 0.0);
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xbar += wgt[i] * x[i];
    ybar += wgt[i] * ylog[i];
  }
  xbar /= wsum;
  ybar /= wsum;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += wgt[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += wgt[i] * (x[i] - xbar) * (ylog[i] - ybar);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_power_law: degenerate abscissae");
  const double slope = sxy / sxx;
  fit.theta = -slope;
  fit.std_error = std::sqrt(1.0 / sxx);
  fit.log_amplitude = ybar - slope * xbar;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = ybar + slope * (x[i] - xbar);
    ss_res += wgt[i] * (ylog[i] - pred) * (ylog[i] - pred);
    ss_tot += wgt[i] * (ylog[i] - ybar) * (ylog[i] - ybar);
  }
  fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  fit.r_squared = std::min(1.0, std::max(0.0, fit.r_squared));
  return fit;
}

TraceTailReport trace_tail_probe(std::size_t n, std::size_t m,
                                 const std::vector<double>& t_values,
                                 std::size_t trials, std::uint64_t seed) {
  if (n == 0 || m == 0) throw ValidationError("trace_tail_probe: empty shape");
  if (trials < 1000) throw ValidationError("trace_tail_probe needs >= 1000 trials");
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  RngStream rng(seed, 0);
  std::vector<double> devs(trials);
  double mean = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double tr = rng.next_gamma(mn);  // sum of mn unit exponentials
    devs[i] = std::abs(tr - mn);
    mean += tr;
  }
  mean /= static_cast<double>(trials);

  TraceTailReport report;
  report.empirical_mean = mean;
  report.trials = trials;
  for (double t : t_values) {
    TraceTailRow row;
    row.t = t;
    std::size_t count = 0;
    for (double d : devs)
      if (d > t) ++count;
    row.exceedance = static_cast<double>(count) / static_cast<double>(trials);
    row.std_err = std::sqrt(row.exceedance * (1.0 - row.exceedance) /
                            static_cast<double>(trials));
    row.bernstein_bound =
        2.0 * std::exp(-std::min(t * t / (4.0 * mn), t / 4.0));
    report.rows.push_back(row);
  }
  return report;
}

ConcentrationResult eigenvalue_concentration_probe(std::size_t n, std::size_t m,
                                                   double eps, std::size_t trials,
                                                   std::uint64_t seed) {
  if (m < n) throw ValidationError("concentration probe requires m >= n");
  if (!(eps > 0.0 && eps < 1.0))
    throw ValidationError("concentration probe needs eps in (0, 1)");
  if (trials == 0) throw ValidationError("concentration probe needs trials >= 1");

  const EnsembleParams params{n, m};
  std::size_t hits = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RngStream ra = derive_substream(seed, 2 * trial);
    RngStream rb = derive_substream(seed, 2 * trial + 1);
    const WishartSample a = wishart_spectrum_fast(params, ra);
    const WishartSample b = wishart_spectrum_fast(params, rb);
    bool all_in = true;
    for (std::size_t k = 0; k < a.spectrum.values.size(); ++k) {
      const double lo = (1.0 - eps) * b.spectrum.values[k];
      const double hi = (1.0 + eps) * b.spectrum.values[k];
      if (a.spectrum.values[k] < lo || a.spectrum.values[k] > hi) {
        all_in = false;
        break;
      }
    }
    if (all_in) ++hits;
  }
  ConcentrationResult out;
  out.trials = trials;
  out.probability = static_cast<double>(hits) / static_cast<double>(trials);
  out.std_err = std::sqrt(out.probability * (1.0 - out.probability) /
                          static_cast<double>(trials));
  return out;
}

SingularBoundReport singular_lower_bound_probe(std::size_t n, std::size_t m,
                                               std::size_t trials,
                                               std::uint64_t seed) {
  if (m < n) throw ValidationError("singular bound probe requires m >= n");
  if (trials == 0) throw ValidationError("singular bound probe needs trials >= 1");

  const EnsembleParams params{n, m};
  SingularBoundReport report;
  report.lower_ref = std::sqrt(static_cast<double>(m)) -
                     std::sqrt(static_cast<double>(n) - 1.0);
  report.upper_ref =
      std::sqrt(static_cast<double>(m)) + 4.0 * std::sqrt(static_cast<double>(n));

  std::vector<double> scaled_min;
  scaled_min.reserve(trials);
  double sum_min = 0.0, sum_max = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RngStream rng = derive_substream(seed, trial);
    const WishartSample s = wishart_spectrum_fast(params, rng);
    const double mu_max = s.spectrum.values.front();
    const double mu_min = s.spectrum.values.back();
    sum_max += std::sqrt(mu_max);
    sum_min += std::sqrt(mu_min);
    if (n == m) scaled_min.push_back(static_cast<double>(n) * mu_min);
  }
  report.mean_sigma_min = sum_min / static_cast<double>(trials);
  report.mean_sigma_max = sum_max / static_cast<double>(trials);

  if (n == m) {
    report.exponential_checked = true;
    const double mean =
        std::accumulate(scaled_min.begin(), scaled_min.end(), 0.0) /
        static_cast<double>(trials);
    report.exp_rate = (mean > 0.0) ? 1.0 / mean : 0.0;
    report.ks_stat = ks_statistic(
        scaled_min, [](double x) { return 1.0 - std::exp(-std::max(0.0, x)); });
    report.ks_pvalue = ks_pvalue(report.ks_stat, trials);
  }
  return report;
}

}  // namespace wishlab
