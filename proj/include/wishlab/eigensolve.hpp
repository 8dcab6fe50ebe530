#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wishlab {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Used for Gaussian samples G and for the
// Hermitian Gram matrices built from them.
struct ComplexMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<cplx> a;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  double frobenius_norm() const;
};

// Symmetric tridiagonal matrix: diag has n entries, offdiag n-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;
};

// Eigenvalues of one Gram-type sample, sorted descending. n is the spectrum
// side (number of eigenvalues), m the ambient rectangular width (0 when the
// spectrum did not come from a rectangular factor). Samplers normalise so
// that n <= m always holds here, whatever shape the caller asked for.
struct SpectrumRaw {
  std::vector<double> values;
  std::size_t n = 0;
  std::size_t m = 0;
};

// Reduce a Hermitian matrix to real symmetric tridiagonal form by complex
// Householder similarity transforms. Off-diagonal phases are absorbed (a
// diagonal unitary similarity), so returning |beta_k| preserves the spectrum.
// Throws ValidationError on non-square, non-finite, or non-Hermitian input.
SymTridiagonal householder_tridiagonalize(const ComplexMatrix& h);

// All eigenvalues of a symmetric tridiagonal matrix, sorted descending,
// by the implicit-shift QL iteration with Wilkinson shift (eigenvalues only).
// `tol` relaxes the deflation threshold; 0 means machine precision. Throws
// ConvergenceError (with the stuck index) if deflation stalls past 30*n
// sweeps, ValidationError on malformed input.
std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t,
                                            double tol = 0.0);

// Eigenvalues of a Hermitian matrix, descending (composition of the above).
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

// Singular values of a rectangular complex matrix, descending: the square
// roots of the spectrum of the smaller Gram matrix (GG^H or G^H G). Tiny
// negative Gram eigenvalues -- below 1e-10 * ||Gram||_F -- are clamped to
// zero; anything more negative raises AccuracyError (a solver bug, not
// roundoff).
std::vector<double> gaussian_singular_values(const ComplexMatrix& g);

// The smaller of GG^H and G^H G, exactly Hermitian by construction.
ComplexMatrix small_gram(const ComplexMatrix& g);

// Clamp tiny negative eigenvalues (|v| <= tol_eig = 1e-10 * scale) to zero in
// place; larger negatives raise AccuracyError. Shared by every Gram-spectrum
// path so dense and fast samplers agree on the convention.
void clamp_nonnegative(std::vector<double>& values, double scale);

}  // namespace wishlab
