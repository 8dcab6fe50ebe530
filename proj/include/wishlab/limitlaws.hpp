#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace wishlab {

// Spectral-edge data of the square-root eigenvalue density with ratio c >= 1:
// support [a_minus, a_plus] with a_pm = (1 -++ sqrt(c))^2, and the edge rate
// beta = 2 sqrt(c) / a_plus that governs large-degree decay.
struct MPParams {
  double c = 1.0;
  double a_minus = 0.0;
  double a_plus = 4.0;
  double beta = 0.5;
};

MPParams mp_params(double c);

// Prefactor conventions; both variants of each integral are exposed because
// the source definitions and the variance calibration disagree by a constant
// (see README).  Experiments default to density / clt_calibrated.
enum class GammaMode { as_written, density };          // 1/pi vs 2/pi
enum class BigGammaMode { as_written, clt_calibrated };  // 1/pi^2 vs 1/(4 pi^2)

// Integrand with an exact divided-difference rule where one exists.
class TestFunction {
 public:
  static TestFunction monomial(std::size_t degree);
  // h(x) = (x / scale)^degree
  static TestFunction scaled_monomial(std::size_t degree, double scale);
  static TestFunction generic(std::function<double(double)> f,
                              std::function<double(double)> df);

  double operator()(double x) const;
  double derivative(double x) const;

  enum class Kind { monomial, scaled_monomial, generic };
  Kind kind() const { return kind_; }
  std::size_t degree() const { return degree_; }
  double scale() const { return scale_; }

 private:
  TestFunction() = default;
  Kind kind_ = Kind::monomial;
  std::size_t degree_ = 0;
  double scale_ = 1.0;
  std::function<double(double)> f_, df_;
};

// (f(x) - f(y)) / (x - y).  Monomial kinds use the exact power-sum expansion
// near the diagonal (no cancellation); generic functions fall back to the
// midpoint derivative once |x - y| < 1e-7 (1 + |x| + |y|).
double divided_difference(const TestFunction& f, double x, double y);

// Tensor Chebyshev quadrature of (1/pi^2) (1 - xy) / sqrt((1-x^2)(1-y^2))
// over the square: the total mass of the covariance kernel, equal to 1.
double kernel_mass(std::size_t N);

// Semicircle-weight functional: integral of f against sqrt(1-x^2) on [-1,1],
// scaled by 1/pi (as_written) or 2/pi (density, the normalised mode).
double gamma_semicircle(const TestFunction& f, std::size_t N, GammaMode mode);

// Square-root-density functional on [a_minus, a_plus]:
// (1/2pi) integral f(x) sqrt((a_plus - x)(x - a_minus)) / x dx.
// c = 1 routes through Jacobi(1/2,-1/2) to absorb the 1/sqrt(x) endpoint;
// c > 1 uses the second-kind Chebyshev grid on f(x)/x.  Total mass is 1.
double gamma_mp(const TestFunction& f, double c, std::size_t N);

// Covariance bilinear form: tensor Chebyshev-1 quadrature of
// pref * DD_f(x,y) DD_g(x,y) (1 - xy) / sqrt((1-x^2)(1-y^2)),
// pref = 1/pi^2 (as_written) or 1/(4 pi^2) (clt_calibrated).
double big_gamma(const TestFunction& f, const TestFunction& g, std::size_t N,
                 BigGammaMode mode);

// big_gamma of f, g composed with the affine support map
// Phi_c(x) = 2 sqrt(c) x + c + 1; compositions keep exact divided
// differences (the chain factor of an affine map is constant).
double big_gamma_c(const TestFunction& f, const TestFunction& g, double c,
                   std::size_t N, BigGammaMode mode);

// Closed form of lim k^{3/2} gamma_mp(h_k, c) for h_k(x) = (x/a_plus)^k:
// (2c / (pi a_plus)) sqrt(pi) / (sqrt(2) beta^{3/2}), which simplifies to
// c^{1/4} (1 + sqrt(c)) / (2 sqrt(pi)).
double c_limit_constant(double c);

// (e^{-s} - e^{-t}) / (s - t) with the confluent limit -e^{-(s+t)/2} near the
// diagonal.
double exp_divided_difference(double s, double t);

// I(A) = double integral over (0,inf)^2 of
//   [(e^{-s}-e^{-t})/(s-t)] [(e^{-As}-e^{-At})/(s-t)] (s+t)/sqrt(st).
// Evaluated by an exact reduction to a one-dimensional integral whose
// endpoint singularities a Chebyshev-1 grid absorbs; computed at N and 2N
// nodes, throwing AccuracyError if the refinements disagree beyond 1e-4
// relative.  Requires A >= 1.
double exp_kernel_integral(double A, std::size_t N);

// Large-degree limits of the covariance functionals, with convergence
// diagnostics along k_list and the cross-check table I(A).
struct LimitConstants {
  double C_c = 0.0;      // closed form at c_list.front()
  double alpha = 0.0;    // big_gamma(x^k, x^k, as_written) at the largest k
  double alpha_c = 0.0;  // big_gamma_c(h_k, h_k, as_written), c-averaged
  std::vector<std::pair<double, double>> I_of_A;  // (A, I(A)) at A = 1,4,16,64
  bool alpha_converged = false;    // successive k estimates within 5%
  bool alpha_c_converged = false;  // same, and cross-c spread within 5%
  double alpha_limit_rel_dev = 0.0;    // |alpha - I(1)/pi^2| / (I(1)/pi^2)
  double alpha_c_limit_rel_dev = 0.0;  // |alpha_c - I(1)/(2 pi^2)| / ...
};

LimitConstants estimate_limit_constants(const std::vector<std::size_t>& k_list,
                                        const std::vector<double>& c_list,
                                        std::size_t N);

}  // namespace wishlab
