#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wishlab/ensembles.hpp"
#include "wishlab/limitlaws.hpp"

namespace wishlab {

// How an eigenvalue is mapped before a test function is applied.
//   raw:        mu_k / n                 (unnormalised spectrum)
//   shifted:    (mu_k - m) / (2 sqrt(mn)) (unnormalised, centred at the mean)
//   normalised: lambda_k                 (trace-normalised spectrum)
//   centered:   lambda_k - 1/n
enum class ScalingKind { raw, shifted, normalised, centered };

struct ScalingMode {
  ScalingKind kind = ScalingKind::normalised;
  double shift_m = 0.0;  // shifted mode only: the larger matrix dimension

  static ScalingMode raw() { return {ScalingKind::raw, 0.0}; }
  static ScalingMode shifted(double m) { return {ScalingKind::shifted, m}; }
  static ScalingMode normalised() { return {ScalingKind::normalised, 0.0}; }
  static ScalingMode centered() { return {ScalingKind::centered, 0.0}; }
};

// Sum of f_i over the scaled eigenvalues, one entry per test function.
// The shifted mode validates its m against the spectrum's m; normalised and
// centered modes trace-normalise internally (degenerate if the trace is 0).
std::vector<double> linear_statistics(const SpectrumRaw& spectrum,
                                      const std::vector<TestFunction>& fs,
                                      const ScalingMode& mode);

// Simplex inputs carry no unnormalised scale: raw and shifted modes are
// rejected as a mode/parameter mismatch.
std::vector<double> linear_statistics(const SimplexVector& lambda,
                                      const std::vector<TestFunction>& fs,
                                      const ScalingMode& mode);

// n (Y_i (E X_1)^i / (E X_i) - 1) for each requested power i, where Y_i is a
// trace-normalised power sum and the E X_i are plug-in estimates (empirical
// means of the raw-mode statistics from a calibration run).
std::vector<double> cor_normalized_statistic(std::size_t n,
                                             const std::vector<unsigned>& degrees,
                                             const std::vector<double>& y,
                                             double mean_x1,
                                             const std::vector<double>& mean_xi);

// One-pass mean / co-moment accumulator with an order-independent merge.
// covariance uses divisor count - 1.
struct MomentSummary {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;  // d x d row-major sum of outer products of deviations

  MomentSummary() = default;
  explicit MomentSummary(std::size_t dim) : mean(dim, 0.0), m2(dim * dim, 0.0) {}

  std::size_t dim() const { return mean.size(); }
  double covariance(std::size_t i, std::size_t j) const;
  std::vector<double> covariance_matrix() const;
};

void accumulate_moments(MomentSummary& summary, const std::vector<double>& obs);
MomentSummary merge_moments(const MomentSummary& a, const MomentSummary& b);

// Kolmogorov-Smirnov distance between a sample and a continuous CDF, and the
// asymptotic two-sided p-value for that distance.
double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf);
double ks_pvalue(double stat, std::size_t count);
double standard_normal_cdf(double x);

struct CoordinateDiagnostic {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_stat = 0.0;
  double ks_pvalue = 0.0;
  bool degenerate = false;  // vanishing variance: moments above are meaningless
};

struct CltDiagnostic {
  std::vector<CoordinateDiagnostic> coords;
  std::vector<double> cov_rel_err;  // d x d, empty if no target was supplied
  double max_cov_rel_err = 0.0;
};

// Per-coordinate shape diagnostics of the stored observations after
// studentisation with the summary's mean and variance, plus an entrywise
// relative comparison of the summary covariance against target_cov (row-major
// d x d; pass empty to skip).  Requires at least 1000 stored samples.
CltDiagnostic clt_diagnostic(const MomentSummary& summary,
                             const std::vector<std::vector<double>>& samples,
                             const std::vector<double>& target_cov);

// S_q = sum_{j<=q} sum_{i<=j} w_i for q = 1..N, by running prefix sums.
std::vector<double> iterated_partial_sums(const std::vector<double>& w);

enum class PersistenceDriver { gaussian, exponential_difference };

struct PersistenceResult {
  std::vector<std::size_t> N_values;
  std::vector<double> probabilities;
  std::vector<double> stderrs;
  double threshold = 0.0;
};

// Walk one iterated-partial-sum path until S_q >= t or q reaches n_max;
// returns the first failing q, or n_max + 1 if the whole path survives.
std::size_t persistence_first_fail(RngStream& rng, std::size_t n_max, double t,
                                   PersistenceDriver driver);

// Survival probability Pr[S_q < t for all q <= N] for each N in N_values,
// estimated on one path per trial with all cutoffs nested (the increments are
// shared across N, which the per-path indicators account for).  Drivers:
// standard normal steps, or differences of two unit exponentials.  Trial i
// walks the substream derive_substream(seed, i).
PersistenceResult persistence_probability(const std::vector<std::size_t>& N_values,
                                          std::size_t trials, double t,
                                          PersistenceDriver driver,
                                          std::uint64_t seed);

struct PowerLawFit {
  double theta = 0.0;      // p ~ n^{-theta}
  double std_error = 0.0;  // weighted-least-squares standard error of theta
  double r_squared = 0.0;
  double log_amplitude = 0.0;  // intercept: fitted p(n) = exp(log_amplitude) * n^{-theta}
  std::size_t excluded = 0;    // points dropped for zero probability
};

// Weighted least squares of log p against log n with delta-method weights
// (p/stderr)^2.  Zero-probability points are excluded and counted; at least
// three usable points are required.
PowerLawFit fit_power_law(const std::vector<double>& n_values,
                          const std::vector<double>& probabilities,
                          const std::vector<double>& stderrs);

struct TraceTailRow {
  double t = 0.0;
  double exceedance = 0.0;  // empirical Pr[|tr - mn| > t]
  double std_err = 0.0;
  double bernstein_bound = 0.0;  // 2 exp(-min(t^2 / (4mn), t / 4))
};

struct TraceTailReport {
  std::vector<TraceTailRow> rows;
  double empirical_mean = 0.0;
  std::size_t trials = 0;
};

// Tail probabilities of the Wishart trace about its mean mn.  The trace is a
// sum of mn unit exponentials, so it is drawn directly as Gamma(mn, 1).
TraceTailReport trace_tail_probe(std::size_t n, std::size_t m,
                                 const std::vector<double>& t_values,
                                 std::size_t trials, std::uint64_t seed);

struct ConcentrationResult {
  double probability = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
};

// Probability that every index k of two independent spectra satisfies
// mu_k^(1) in [(1-eps) mu_k^(2), (1+eps) mu_k^(2)].  Requires m >= n.
ConcentrationResult eigenvalue_concentration_probe(std::size_t n, std::size_t m,
                                                   double eps, std::size_t trials,
                                                   std::uint64_t seed);

struct SingularBoundReport {
  double mean_sigma_min = 0.0;  // E sqrt(mu_n)
  double mean_sigma_max = 0.0;  // E sqrt(mu_1)
  double lower_ref = 0.0;       // sqrt(m) - sqrt(n - 1)
  double upper_ref = 0.0;       // sqrt(m) + 4 sqrt(n)
  bool exponential_checked = false;  // set when n == m
  double exp_rate = 0.0;             // 1 / mean of n mu_n
  double ks_stat = 0.0;              // KS of n mu_n against rate-1 exponential
  double ks_pvalue = 0.0;
};

// Extreme singular values of the n x m Gaussian factor against the
// sqrt(m) +- O(sqrt(n)) brackets; for square shapes the smallest eigenvalue
// is additionally tested for the exponential law of n mu_n.  Requires m >= n.
SingularBoundReport singular_lower_bound_probe(std::size_t n, std::size_t m,
                                               std::size_t trials,
                                               std::uint64_t seed);

}  // namespace wishlab
