#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "wishlab/ensembles.hpp"

namespace wishlab {

// Outcome of a suffix-sum dominance comparison of two sorted vectors.
struct MajorizationReport {
  bool dominated = false;
  // 1-based index of the first k with suffix_x[k] > suffix_y[k] + tol;
  // absent exactly when dominated.
  std::optional<std::size_t> first_violation_k;
  std::vector<double> suffix_x;
  std::vector<double> suffix_y;
  // min_k suffix_x[k]/suffix_y[k], clamped to [0,1]; equals 1 exactly when
  // the reverse dominance (y-tails below x-tails) holds with zero tolerance.
  double pi = 0.0;
};

// out[k] = x[k] + ... + x[n-1] (0-based), accumulated from the smallest
// element upward so the small tails that decide dominance events carry the
// least rounding error.  Input must be non-increasing.
std::vector<double> suffix_sums(const std::vector<double>& x);

// Checks suffix_x[k] <= suffix_y[k] + tol for every k.
MajorizationReport tails_dominated(const SimplexVector& x, const SimplexVector& y,
                                   double tol);

// Largest achievable conversion probability: min over k of the tail-sum
// ratios suffix_x[k]/suffix_y[k], clamped to [0,1].  Positions where both
// tails vanish are skipped; a vanishing y-tail against a positive x-tail
// counts as +inf (never the minimum for simplex inputs, where k=1 gives 1).
double vidal_pi(const SimplexVector& x, const SimplexVector& y);

// Whether sum f(x_k) <= sum f(y_k) + 1e-9.  For convex f this always holds
// when x is dominated by y in the averaging sense — equivalently, when
// tails_dominated(y, x, 0) holds and the totals agree (note the order: the
// *y*-tails sit below the x-tails when y is the more spread-out vector).
// The caller guarantees that precondition; the function just compares.
bool convex_dominance_check(const std::vector<double>& x, const std::vector<double>& y,
                            const std::function<double(double)>& f);

}  // namespace wishlab
