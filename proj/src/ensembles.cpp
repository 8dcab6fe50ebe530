#include "wishlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wishlab/errors.hpp"

namespace wishlab {

namespace {

void validate_params(const EnsembleParams& p) {
  if (p.n < 1 || p.m < 1)
    throw ValidationError("ensemble parameters must satisfy n >= 1, m >= 1");
}

}  // namespace

ComplexMatrix sample_gaussian_matrix(const EnsembleParams& p, RngStream& stream) {
  validate_params(p);
  ComplexMatrix g(p.n, p.m);
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < p.m; ++j) g(i, j) = stream.next_complex_gaussian();
  return g;
}

WishartSample wishart_spectrum_dense(const EnsembleParams& p, RngStream& stream) {
  const ComplexMatrix g = sample_gaussian_matrix(p, stream);

  // tr(G G^H) = sum |G_ij|^2, accumulated from the entries so that the
  // WishartSample invariant cross-checks the eigensolver.
  double trace = 0.0;
  for (const cplx& z : g.a) trace += std::norm(z);

  const ComplexMatrix gram = small_gram(g);
  std::vector<double> values = hermitian_eigenvalues(gram);
  clamp_nonnegative(values, gram.frobenius_norm());

  WishartSample w;
  w.spectrum.values = std::move(values);
  w.spectrum.n = std::min(p.n, p.m);
  w.spectrum.m = std::max(p.n, p.m);
  w.trace = trace;
  return w;
}

WishartSample wishart_spectrum_fast(const EnsembleParams& p, RngStream& stream) {
  validate_params(p);
  if (p.m < p.n)
    throw ValidationError("fast Wishart sampler requires m >= n");
  const std::size_t n = p.n;

  // Bidiagonal model: b_i^2 ~ Gamma(m - i, 1) on the diagonal and
  // o_i^2 ~ Gamma(n - 1 - i, 1) on the subdiagonal reproduce the joint
  // eigenvalue density of G G^H.  The shapes are pinned by the exact anchors
  // E[tr] = Var[tr] = n m, and cross-validated against the dense path.
  std::vector<double> b(n), o(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i)
    b[i] = std::sqrt(stream.next_gamma(static_cast<double>(p.m - i)));
  for (std::size_t i = 0; i + 1 < n; ++i)
    o[i] = std::sqrt(stream.next_gamma(static_cast<double>(n - 1 - i)));

  SymTridiagonal t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  t.diag[0] = b[0] * b[0];
  for (std::size_t i = 1; i < n; ++i) t.diag[i] = b[i] * b[i] + o[i - 1] * o[i - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) t.offdiag[i] = b[i] * o[i];

  const double trace = std::accumulate(t.diag.begin(), t.diag.end(), 0.0);

  double fro2 = 0.0;
  for (double d : t.diag) fro2 += d * d;
  for (double e : t.offdiag) fro2 += 2.0 * e * e;

  std::vector<double> values = tridiagonal_eigenvalues(t);
  clamp_nonnegative(values, std::sqrt(fro2));

  WishartSample w;
  w.spectrum.values = std::move(values);
  w.spectrum.n = n;
  w.spectrum.m = p.m;
  w.trace = trace;
  return w;
}

SimplexVector trace_normalise(const WishartSample& w) {
  if (!(w.trace > 0.0))
    throw DegenerateSampleError("trace_normalise: nonpositive trace");
  const double sum =
      std::accumulate(w.spectrum.values.begin(), w.spectrum.values.end(), 0.0);
  if (!(sum > 0.0))
    throw DegenerateSampleError("trace_normalise: nonpositive spectrum sum");

  // Normalising by the eigenvalue sum (== trace to 1e-9 relative) keeps the
  // simplex closure exact at the 1e-12 level regardless of solver round-off.
  SimplexVector v;
  v.values.reserve(w.spectrum.values.size());
  for (double x : w.spectrum.values) v.values.push_back(x / sum);
  v.sorted = true;
  return v;
}

SimplexVector sample_uniform_simplex(std::size_t n, RngStream& stream) {
  if (n < 1) throw ValidationError("simplex dimension must be >= 1");
  SimplexVector v;
  v.values.resize(n);
  double sum = 0.0;
  for (double& x : v.values) {
    x = stream.next_exponential();
    sum += x;
  }
  for (double& x : v.values) x /= sum;
  v.sorted = false;
  return v;
}

std::vector<double> renyi_sorted_exponentials(std::size_t n, RngStream& stream) {
  if (n < 1) throw ValidationError("simplex dimension must be >= 1");
  // Ascending order statistics of i.i.d. Exp(1): partial sums of spacings
  // Z_i / (n - i), i = 0..n-1.
  std::vector<double> c(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += stream.next_exponential() / static_cast<double>(n - i);
    c[i] = acc;
  }
  return c;
}

SimplexVector sorted_uniform_simplex_renyi(std::size_t n, RngStream& stream) {
  const std::vector<double> c = renyi_sorted_exponentials(n, stream);
  // sum of the order statistics equals the raw exponential sum.
  const double sum = std::accumulate(c.begin(), c.end(), 0.0);
  SimplexVector v;
  v.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) v.values[k] = c[n - 1 - k] / sum;
  v.sorted = true;
  return v;
}

std::vector<double> padded_values(const SpectrumRaw& s, std::size_t length) {
  if (length < s.values.size())
    throw ValidationError("padded_values: target length shorter than spectrum");
  std::vector<double> out = s.values;
  out.resize(length, 0.0);
  return out;
}

}  // namespace wishlab
