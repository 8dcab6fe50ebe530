#include "wishlab/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "wishlab/errors.hpp"

namespace wishlab {
namespace {

void validate_hermitian(const ComplexMatrix& h) {
  if (h.rows != h.cols) throw ValidationError("Hermitian input must be square");
  if (h.rows == 0) throw ValidationError("empty matrix");
  double scale = 0.0;
  for (const cplx& z : h.a) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError("non-finite matrix entry");
    }
    scale = std::max(scale, std::abs(z.real()) + std::abs(z.imag()));
  }
  const double tol =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  for (std::size_t i = 0; i < h.rows; ++i) {
    for (std::size_t j = i; j < h.cols; ++j) {
      const cplx d = h(i, j) - std::conj(h(j, i));
      if (std::abs(d.real()) > tol || std::abs(d.imag()) > tol) {
        throw ValidationError("matrix is not Hermitian");
      }
    }
  }
}

}  // namespace

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return std::sqrt(s);
}

SymTridiagonal householder_tridiagonalize(const ComplexMatrix& h_in) {
  validate_hermitian(h_in);
  ComplexMatrix h = h_in;  // working copy, destroyed below the band
  const std::size_t n = h.rows;
  std::vector<double> diag(n);
  std::vector<double> off(n >= 1 ? n - 1 : 0, 0.0);

  std::vector<cplx> v, p;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;

    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) {
      off[k] = 0.0;
      continue;
    }

    const cplx alpha = h(k + 1, k);
    const double absa = std::abs(alpha);
    const cplx phase = (absa == 0.0) ? cplx(1.0, 0.0) : alpha / absa;

    // Reflector v = x + phase*|x|*e1; the sign choice keeps v[0] away from
    // cancellation. tau = 2 / v^H v = 1 / (|x| (|x| + |alpha|)).
    v.assign(len, cplx(0.0, 0.0));
    v[0] = alpha + phase * xnorm;
    for (std::size_t i = 1; i < len; ++i) v[i] = h(k + 1 + i, k);
    const double tau = 1.0 / (xnorm * (xnorm + absa));

    // Hermitian rank-2 update A <- A - v w^H - w v^H on the trailing block,
    // where p = tau*A*v and w = p - (tau/2)(v^H p) v.
    p.assign(len, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < len; ++i) {
      cplx acc(0.0, 0.0);
      const std::size_t row = k + 1 + i;
      for (std::size_t j = 0; j < len; ++j) acc += h(row, k + 1 + j) * v[j];
      p[i] = tau * acc;
    }
    cplx vhp(0.0, 0.0);
    for (std::size_t i = 0; i < len; ++i) vhp += std::conj(v[i]) * p[i];
    const cplx kappa = 0.5 * tau * vhp;
    for (std::size_t i = 0; i < len; ++i) p[i] -= kappa * v[i];
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t row = k + 1 + i;
      for (std::size_t j = 0; j < len; ++j) {
        h(row, k + 1 + j) -= v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]);
      }
    }

    // The transformed subdiagonal entry is -phase*|x|; its phase is removed
    // by a diagonal unitary similarity, which never changes eigenvalues.
    off[k] = xnorm;
  }
  if (n >= 2) off[n - 2] = std::abs(h(n - 1, n - 2));
  for (std::size_t i = 0; i < n; ++i) diag[i] = h(i, i).real();
  return {std::move(diag), std::move(off)};
}

std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t,
                                            double tol) {
  const std::size_t n = t.diag.size();
  if (n == 0) throw ValidationError("empty tridiagonal");
  if (t.offdiag.size() + 1 != n) {
    throw ValidationError("offdiag length must be diag length - 1");
  }
  for (double x : t.diag) {
    if (!std::isfinite(x)) throw ValidationError("non-finite diagonal entry");
  }
  for (double x : t.offdiag) {
    if (!std::isfinite(x)) throw ValidationError("non-finite offdiagonal entry");
  }

  std::vector<double> d = t.diag;
  std::vector<double> e = t.offdiag;
  e.push_back(0.0);  // sentinel

  const double eps = std::max(tol, std::numeric_limits<double>::epsilon());
  const long max_sweeps = 30L * static_cast<long>(n);
  long sweeps = 0;

  // Implicit-shift QL with Wilkinson shift, eigenvalues only.
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      // First negligible off-diagonal at or after l bounds the active block.
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;  // d[l] deflated
      if (++sweeps > max_sweeps) {
        throw ConvergenceError("tridiagonal QL failed to deflate", l);
      }

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool recovered = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          // Rotation annihilated early; undo the shift on this entry and
          // re-scan the block.
          d[i + 1] -= p;
          e[m] = 0.0;
          recovered = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (recovered) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }

  std::sort(d.begin(), d.end(), std::greater<double>());
  return d;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  return tridiagonal_eigenvalues(householder_tridiagonalize(h));
}

ComplexMatrix small_gram(const ComplexMatrix& g) {
  if (g.rows == 0 || g.cols == 0) throw ValidationError("empty matrix");
  const bool rows_small = g.rows <= g.cols;
  const std::size_t r = rows_small ? g.rows : g.cols;
  ComplexMatrix w(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i; j < r; ++j) {
      cplx acc(0.0, 0.0);
      if (rows_small) {
        for (std::size_t k = 0; k < g.cols; ++k) {
          acc += g(i, k) * std::conj(g(j, k));
        }
      } else {
        for (std::size_t k = 0; k < g.rows; ++k) {
          acc += std::conj(g(k, i)) * g(k, j);
        }
      }
      if (i == j) acc = cplx(acc.real(), 0.0);
      w(i, j) = acc;
      w(j, i) = std::conj(acc);
    }
  }
  return w;
}

void clamp_nonnegative(std::vector<double>& values, double scale) {
  const double tol_eig = 1e-10 * std::max(scale, 1.0);
  for (double& v : values) {
    if (v < 0.0) {
      if (v < -tol_eig) {
        throw AccuracyError(
            "Gram eigenvalue more negative than solver roundoff allows");
      }
      v = 0.0;
    }
  }
}

std::vector<double> gaussian_singular_values(const ComplexMatrix& g) {
  const ComplexMatrix w = small_gram(g);
  std::vector<double> vals = hermitian_eigenvalues(w);
  clamp_nonnegative(vals, w.frobenius_norm());
  for (double& v : vals) v = std::sqrt(v);
  return vals;
}

}  // namespace wishlab
