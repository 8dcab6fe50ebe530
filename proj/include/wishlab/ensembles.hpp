#pragma once

#include <cstddef>
#include <vector>

#include "wishlab/eigensolve.hpp"
#include "wishlab/rng.hpp"

namespace wishlab {

// Matrix dimensions of the complex Gaussian ensemble: G is n x m.
struct EnsembleParams {
  std::size_t n = 0;
  std::size_t m = 0;
};

// One draw of a Wishart-type spectrum.  `trace` is computed from the matrix
// entries (not from the eigenvalues), so `trace == sum(spectrum.values)` is a
// genuine consistency check on the solver, holding to 1e-9 relative.
struct WishartSample {
  SpectrumRaw spectrum;
  double trace = 0.0;
};

// A probability vector: nonnegative entries summing to 1 (to 1e-12).
// `sorted` marks vectors that are ordered non-increasing.
struct SimplexVector {
  std::vector<double> values;
  bool sorted = false;
};

// G with i.i.d. complex entries, E|G_ij|^2 = 1 (re/im each N(0, 1/2)).
ComplexMatrix sample_gaussian_matrix(const EnsembleParams& p, RngStream& stream);

// Spectrum of G G^H via the dense eigensolver.  When m < n the Gram factor of
// the transpose is used instead (same nonzero spectrum), so the returned
// spectrum always has length min(n, m).
WishartSample wishart_spectrum_dense(const EnsembleParams& p, RngStream& stream);

// Equal-in-distribution sampler running in O(n^2) per draw: eigenvalues of the
// symmetric tridiagonal T = B B^T where B is the bidiagonal matrix with
// squared diagonal entries Gamma(m - i, 1) and squared subdiagonal entries
// Gamma(n - 1 - i, 1), i = 0, 1, ...  Requires m >= n.
WishartSample wishart_spectrum_fast(const EnsembleParams& p, RngStream& stream);

// spectrum / trace, sorted non-increasing.  Throws DegenerateSampleError on a
// nonpositive trace (probability-zero event; signals an upstream bug).
SimplexVector trace_normalise(const WishartSample& w);

// Flat (uniform) point of the probability simplex: Z_i / sum(Z), Z_i i.i.d.
// mean-1 exponentials.  Unsorted.
SimplexVector sample_uniform_simplex(std::size_t n, RngStream& stream);

// Sorted uniform simplex point in O(n) without sorting, via the order-
// statistics representation of exponentials: ascending partial sums of
// Z_i / (n - i), normalised by sum(Z) and reversed to descending order.
SimplexVector sorted_uniform_simplex_renyi(std::size_t n, RngStream& stream);

// Ascending order statistics of n i.i.d. mean-1 exponentials, built in O(n).
// Exposed so the construction can be checked against harmonic-number moments.
std::vector<double> renyi_sorted_exponentials(std::size_t n, RngStream& stream);

// Spectrum values padded with explicit structural zeros up to `length`
// (for comparing spectra of different ambient dimensions entrywise).
std::vector<double> padded_values(const SpectrumRaw& s, std::size_t length);

}  // namespace wishlab
