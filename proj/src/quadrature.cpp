#include "wishlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "wishlab/eigensolve.hpp"
#include "wishlab/errors.hpp"

namespace wishlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_size(std::size_t N) {
  if (N < 1) throw ValidationError("quadrature grid needs at least one node");
}

}  // namespace

QuadratureGrid chebyshev1_grid(std::size_t N) {
  require_size(N);
  QuadratureGrid g;
  g.family = QuadFamily::chebyshev1;
  g.nodes.resize(N);
  g.weights.assign(N, kPi / static_cast<double>(N));
  for (std::size_t k = 1; k <= N; ++k)
    g.nodes[k - 1] = std::cos((2.0 * k - 1.0) * kPi / (2.0 * N));
  return g;
}

QuadratureGrid chebyshev2_grid(std::size_t N) {
  require_size(N);
  QuadratureGrid g;
  g.family = QuadFamily::chebyshev2;
  g.nodes.resize(N);
  g.weights.resize(N);
  const double h = kPi / (N + 1.0);
  for (std::size_t k = 1; k <= N; ++k) {
    const double s = std::sin(k * h);
    g.nodes[k - 1] = std::cos(k * h);
    g.weights[k - 1] = h * s * s;
  }
  return g;
}

QuadratureGrid jacobi_pm_grid(std::size_t N) {
  require_size(N);
  QuadratureGrid g;
  g.family = QuadFamily::jacobi_pm;
  g.nodes.resize(N);
  g.weights.resize(N);
  const double d = 2.0 * N + 1.0;
  for (std::size_t k = 1; k <= N; ++k) {
    const double s = std::sin(k * kPi / d);
    g.nodes[k - 1] = std::cos(2.0 * k * kPi / d);
    g.weights[k - 1] = (4.0 * kPi / d) * s * s;
  }
  return g;
}

QuadratureGrid laguerre_exp_grid(std::size_t N) {
  require_size(N);
  // Jacobi matrix of the monic Laguerre recurrence: diagonal 2i+1,
  // off-diagonal i (orthonormal convention, total mass 1).
  SymTridiagonal t;
  t.diag.resize(N);
  t.offdiag.resize(N > 0 ? N - 1 : 0);
  for (std::size_t i = 0; i < N; ++i) t.diag[i] = 2.0 * i + 1.0;
  for (std::size_t i = 0; i + 1 < N; ++i) t.offdiag[i] = static_cast<double>(i + 1);

  std::vector<double> nodes = tridiagonal_eigenvalues(t);
  std::sort(nodes.begin(), nodes.end());  // ascending reads naturally on (0, inf)

  QuadratureGrid g;
  g.family = QuadFamily::laguerre_exp;
  g.nodes = nodes;
  g.weights.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    // Christoffel-function identity: weight = 1 / sum_j p_j(node)^2 over the
    // orthonormal polynomials p_0..p_{N-1}.
    const double x = nodes[k];
    double pm1 = 0.0, p = 1.0, sum = 1.0;
    for (std::size_t j = 1; j < N; ++j) {
      const double alpha = 2.0 * (j - 1) + 1.0;
      const double beta_prev = static_cast<double>(j - 1);
      const double beta = static_cast<double>(j);
      const double pn = ((x - alpha) * p - beta_prev * pm1) / beta;
      pm1 = p;
      p = pn;
      sum += p * p;
    }
    g.weights[k] = 1.0 / sum;
  }
  return g;
}

}  // namespace wishlab
