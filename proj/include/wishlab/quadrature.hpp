#pragma once

#include <cstddef>
#include <vector>

namespace wishlab {

enum class QuadFamily {
  chebyshev1,   // weight 1/sqrt(1-x^2) on (-1, 1)
  chebyshev2,   // weight sqrt(1-x^2) on (-1, 1)
  jacobi_pm,    // weight sqrt((1-x)/(1+x)) on (-1, 1), i.e. Jacobi(1/2, -1/2)
  laguerre_exp  // weight e^{-x} on (0, inf)
};

// Gauss rule for integrals against the family weight:
// integral f(x) w(x) dx  ~=  sum weights[k] * f(nodes[k]).
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadFamily family = QuadFamily::chebyshev1;
};

// All nodes lie strictly inside the integration domain and all weights are
// positive.  The three [-1,1] families use closed-form nodes/weights; the
// exponential family solves its Jacobi matrix with the in-house eigensolver
// and recovers weights through the orthonormal-polynomial identity.
QuadratureGrid chebyshev1_grid(std::size_t N);
QuadratureGrid chebyshev2_grid(std::size_t N);
QuadratureGrid jacobi_pm_grid(std::size_t N);
QuadratureGrid laguerre_exp_grid(std::size_t N);

}  // namespace wishlab
