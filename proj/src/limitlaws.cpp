#include "wishlab/limitlaws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wishlab/errors.hpp"
#include "wishlab/quadrature.hpp"

namespace wishlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool near_diagonal(double x, double y) {
  return std::abs(x - y) < 1e-7 * (1.0 + std::abs(x) + std::abs(y));
}

// Power sum x^{k-1} + x^{k-2} y + ... + y^{k-1}, the exact divided
// difference of t^k.  Used near the diagonal where the quotient cancels.
double monomial_power_sum(std::size_t k, double x, double y) {
  if (k == 0) return 0.0;
  if (x == y) return static_cast<double>(k) * std::pow(x, static_cast<double>(k - 1));
  if (x == 0.0) return std::pow(y, static_cast<double>(k - 1));
  if (y == 0.0) return std::pow(x, static_cast<double>(k - 1));
  double big = x, small = y;
  if (std::abs(big) < std::abs(small)) std::swap(big, small);
  const double r = small / big;  // |r| <= 1 keeps the terms bounded
  double term = std::pow(big, static_cast<double>(k - 1));
  double sum = term;
  for (std::size_t j = 1; j < k; ++j) {
    term *= r;
    sum += term;
  }
  return sum;
}

double monomial_dd(std::size_t k, double x, double y) {
  if (k == 0) return 0.0;
  if (near_diagonal(x, y)) return monomial_power_sum(k, x, y);
  return (std::pow(x, static_cast<double>(k)) - std::pow(y, static_cast<double>(k))) /
         (x - y);
}

}  // namespace

MPParams mp_params(double c) {
  if (!(c >= 1.0)) throw ValidationError("ratio parameter c must be >= 1");
  MPParams p;
  p.c = c;
  const double sc = std::sqrt(c);
  p.a_minus = (1.0 - sc) * (1.0 - sc);
  p.a_plus = (1.0 + sc) * (1.0 + sc);
  p.beta = 2.0 * sc / p.a_plus;
  return p;
}

TestFunction TestFunction::monomial(std::size_t degree) {
  TestFunction t;
  t.kind_ = Kind::monomial;
  t.degree_ = degree;
  return t;
}

TestFunction TestFunction::scaled_monomial(std::size_t degree, double scale) {
  if (!(scale > 0.0)) throw ValidationError("scaled monomial needs scale > 0");
  TestFunction t;
  t.kind_ = Kind::scaled_monomial;
  t.degree_ = degree;
  t.scale_ = scale;
  return t;
}

TestFunction TestFunction::generic(std::function<double(double)> f,
                                   std::function<double(double)> df) {
  if (!f || !df) throw ValidationError("generic test function needs f and df");
  TestFunction t;
  t.kind_ = Kind::generic;
  t.f_ = std::move(f);
  t.df_ = std::move(df);
  return t;
}

double TestFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::monomial:
      return std::pow(x, static_cast<double>(degree_));
    case Kind::scaled_monomial:
      return std::pow(x / scale_, static_cast<double>(degree_));
    case Kind::generic:
      return f_(x);
  }
  return 0.0;
}

double TestFunction::derivative(double x) const {
  switch (kind_) {
    case Kind::monomial:
      if (degree_ == 0) return 0.0;
      return static_cast<double>(degree_) * std::pow(x, static_cast<double>(degree_ - 1));
    case Kind::scaled_monomial:
      if (degree_ == 0) return 0.0;
      return static_cast<double>(degree_) / scale_ *
             std::pow(x / scale_, static_cast<double>(degree_ - 1));
    case Kind::generic:
      return df_(x);
  }
  return 0.0;
}

double divided_difference(const TestFunction& f, double x, double y) {
  switch (f.kind()) {
    case TestFunction::Kind::monomial:
      return monomial_dd(f.degree(), x, y);
    case TestFunction::Kind::scaled_monomial:
      // ((x/a)^k - (y/a)^k) / (x - y) = power-sum(x/a, y/a) / a
      return monomial_dd(f.degree(), x / f.scale(), y / f.scale()) / f.scale();
    case TestFunction::Kind::generic:
      if (near_diagonal(x, y)) return f.derivative(0.5 * (x + y));
      return (f(x) - f(y)) / (x - y);
  }
  return 0.0;
}

double kernel_mass(std::size_t N) {
  if (N < 4) throw ValidationError("kernel_mass needs N >= 4");
  const QuadratureGrid g = chebyshev1_grid(N);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) sum += 1.0 - g.nodes[i] * g.nodes[j];
  // weights are pi/N each and the prefactor is 1/pi^2
  return sum / (static_cast<double>(N) * static_cast<double>(N));
}

double gamma_semicircle(const TestFunction& f, std::size_t N, GammaMode mode) {
  if (N < 4) throw ValidationError("density quadrature needs N >= 4");
  const QuadratureGrid g = chebyshev2_grid(N);
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) sum += g.weights[k] * f(g.nodes[k]);
  const double pref = (mode == GammaMode::as_written) ? 1.0 / kPi : 2.0 / kPi;
  return pref * sum;
}

double gamma_mp(const TestFunction& f, double c, std::size_t N) {
  if (!(c >= 1.0)) throw ValidationError("ratio parameter c must be >= 1");
  if (N < 4) throw ValidationError("density quadrature needs N >= 4");
  if (c == 1.0) {
    // 1/x meets the sqrt edge at 0: absorb x^{-1/2} into Jacobi(1/2, -1/2).
    const QuadratureGrid g = jacobi_pm_grid(N);
    double sum = 0.0;
    for (std::size_t k = 0; k < N; ++k)
      sum += g.weights[k] * f(2.0 * (1.0 + g.nodes[k]));
    return sum / kPi;
  }
  const QuadratureGrid g = chebyshev2_grid(N);
  const double mid = c + 1.0, half = 2.0 * std::sqrt(c);
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double x = mid + half * g.nodes[k];
    sum += g.weights[k] * f(x) / x;
  }
  return 2.0 * c / kPi * sum;
}

namespace {

// Divided differences of f(shift + slope * x) with respect to x, tabulated on
// a node set: far pairs use the cached-value quotient, near pairs defer to
// the exact/confluent rules with the affine chain factor.
class DDTable {
 public:
  DDTable(const TestFunction& f, const std::vector<double>& nodes, double shift,
          double slope)
      : f_(f), x_(nodes), slope_(slope) {
    p_.reserve(nodes.size());
    v_.reserve(nodes.size());
    for (double x : nodes) {
      const double q = shift + slope * x;
      p_.push_back(q);
      v_.push_back(f(q));
    }
  }

  double dd(std::size_t i, std::size_t j) const {
    if (near_diagonal(x_[i], x_[j]))
      return slope_ * divided_difference(f_, p_[i], p_[j]);
    return (v_[i] - v_[j]) / (x_[i] - x_[j]);
  }

 private:
  const TestFunction& f_;
  const std::vector<double>& x_;
  double slope_;
  std::vector<double> p_, v_;
};

double big_gamma_core(const TestFunction& f, const TestFunction& g, std::size_t N,
                      BigGammaMode mode, double shift, double slope) {
  if (N < 4) throw ValidationError("covariance quadrature needs N >= 4");
  const QuadratureGrid grid = chebyshev1_grid(N);
  const DDTable tf(f, grid.nodes, shift, slope);
  const DDTable tg(g, grid.nodes, shift, slope);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sum += tf.dd(i, i) * tg.dd(i, i) * (1.0 - grid.nodes[i] * grid.nodes[i]);
    for (std::size_t j = i + 1; j < N; ++j)
      sum += 2.0 * tf.dd(i, j) * tg.dd(i, j) * (1.0 - grid.nodes[i] * grid.nodes[j]);
  }
  // (pi/N)^2 tensor weights against a 1/pi^2 or 1/(4 pi^2) prefactor.
  const double denom = (mode == BigGammaMode::as_written) ? 1.0 : 4.0;
  return sum / (denom * static_cast<double>(N) * static_cast<double>(N));
}

}  // namespace

double big_gamma(const TestFunction& f, const TestFunction& g, std::size_t N,
                 BigGammaMode mode) {
  return big_gamma_core(f, g, N, mode, 0.0, 1.0);
}

double big_gamma_c(const TestFunction& f, const TestFunction& g, double c,
                   std::size_t N, BigGammaMode mode) {
  if (!(c >= 1.0)) throw ValidationError("ratio parameter c must be >= 1");
  return big_gamma_core(f, g, N, mode, c + 1.0, 2.0 * std::sqrt(c));
}

double c_limit_constant(double c) {
  const MPParams p = mp_params(c);
  // Laplace expansion of gamma_mp(h_k, c) at the soft edge: substituting
  // x = a_plus (1 - s/k) gives gamma_mp(h_k, c) ~ k^{-3/2} (2c / (pi a_plus))
  // * Gamma(3/2) sqrt(2) / beta^{3/2}, which simplifies to
  // c^{1/4} (1 + sqrt(c)) / (2 sqrt(pi)).
  return 2.0 * c / (kPi * p.a_plus) * std::sqrt(kPi) /
         (std::sqrt(2.0) * std::pow(p.beta, 1.5));
}

double exp_divided_difference(double s, double t) {
  if (near_diagonal(s, t)) return -std::exp(-0.5 * (s + t));
  return (std::exp(-s) - std::exp(-t)) / (s - t);
}

namespace {

// After writing each exponential divided difference as an average of
// exponentials and integrating out s and t, the double integral collapses to
//   I(A) = (pi K A / 2) * integral_0^1 [G(1 + A v) - G(A v)] dv,  K = 1 + A,
// where G(p) = 2 (2p - K) / (K^2 sqrt(p (K - p))) is the antiderivative of
// (p (K - p))^{-3/2}.  The integrand's inverse-square-root endpoints are
// exactly the Chebyshev-1 weight.
double exp_kernel_once(double A, std::size_t N) {
  const double K = 1.0 + A;
  const auto G = [K](double p) {
    return 2.0 * (2.0 * p - K) / (K * K * std::sqrt(p * (K - p)));
  };
  const QuadratureGrid grid = chebyshev1_grid(N);
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double v = 0.5 * (1.0 + grid.nodes[k]);
    sum += (G(1.0 + A * v) - G(A * v)) * std::sqrt(v * (1.0 - v));
  }
  const double J = kPi / static_cast<double>(N) * sum;
  return 0.5 * kPi * K * A * J;
}

}  // namespace

double exp_kernel_integral(double A, std::size_t N) {
  if (!(A >= 1.0)) throw ValidationError("exp_kernel_integral requires A >= 1");
  if (N < 4) throw ValidationError("exp_kernel_integral needs N >= 4");
  const double coarse = exp_kernel_once(A, N);
  const double fine = exp_kernel_once(A, 2 * N);
  if (std::abs(fine - coarse) > 1e-4 * std::max(std::abs(fine), 1e-300))
    throw AccuracyError("exp_kernel_integral: refinements disagree beyond 1e-4");
  return fine;
}

LimitConstants estimate_limit_constants(const std::vector<std::size_t>& k_list,
                                        const std::vector<double>& c_list,
                                        std::size_t N) {
  if (k_list.empty() || c_list.empty())
    throw ValidationError("estimate_limit_constants: empty k_list or c_list");
  if (!std::is_sorted(k_list.begin(), k_list.end()) ||
      std::adjacent_find(k_list.begin(), k_list.end()) != k_list.end())
    throw ValidationError("estimate_limit_constants: k_list must be increasing");

  LimitConstants out;
  out.C_c = c_limit_constant(c_list.front());

  const auto within5 = [](double a, double b) {
    return std::abs(a - b) <= 0.05 * std::max(std::abs(a), std::abs(b));
  };

  // alpha along k_list
  std::vector<double> alpha_seq;
  for (std::size_t k : k_list) {
    const TestFunction f = TestFunction::monomial(k);
    alpha_seq.push_back(big_gamma(f, f, N, BigGammaMode::as_written));
  }
  out.alpha = alpha_seq.back();
  out.alpha_converged = true;
  for (std::size_t i = 0; i + 1 < alpha_seq.size(); ++i)
    if (!within5(alpha_seq[i], alpha_seq[i + 1])) out.alpha_converged = false;

  // alpha_c along k_list for every c, then averaged across c
  out.alpha_c_converged = true;
  std::vector<double> alpha_c_final;
  for (double c : c_list) {
    const MPParams p = mp_params(c);
    std::vector<double> seq;
    for (std::size_t k : k_list) {
      const TestFunction h = TestFunction::scaled_monomial(k, p.a_plus);
      seq.push_back(big_gamma_c(h, h, c, N, BigGammaMode::as_written));
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      if (!within5(seq[i], seq[i + 1])) out.alpha_c_converged = false;
    alpha_c_final.push_back(seq.back());
  }
  double acc = 0.0;
  for (double v : alpha_c_final) acc += v;
  out.alpha_c = acc / static_cast<double>(alpha_c_final.size());
  const auto [lo, hi] = std::minmax_element(alpha_c_final.begin(), alpha_c_final.end());
  if (!within5(*lo, *hi)) out.alpha_c_converged = false;

  const std::size_t kernel_N = std::max<std::size_t>(N, 512);
  for (double A : {1.0, 4.0, 16.0, 64.0})
    out.I_of_A.emplace_back(A, exp_kernel_integral(A, kernel_N));

  const double i1 = out.I_of_A.front().second;
  out.alpha_limit_rel_dev = std::abs(out.alpha - i1 / (kPi * kPi)) / (i1 / (kPi * kPi));
  out.alpha_c_limit_rel_dev =
      std::abs(out.alpha_c - i1 / (2.0 * kPi * kPi)) / (i1 / (2.0 * kPi * kPi));
  return out;
}

}  // namespace wishlab
