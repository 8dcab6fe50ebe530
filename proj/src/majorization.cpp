#include "wishlab/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wishlab/errors.hpp"

namespace wishlab {

std::vector<double> suffix_sums(const std::vector<double>& x) {
  if (x.empty()) throw ValidationError("suffix_sums: empty input");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i] < x[i + 1])
      throw ValidationError("suffix_sums: input is not non-increasing");
  std::vector<double> out(x.size());
  double acc = 0.0;
  for (std::size_t i = x.size(); i-- > 0;) {
    acc += x[i];
    out[i] = acc;
  }
  return out;
}

namespace {

// min_k sx[k]/sy[k] with the zero-tail conventions, clamped to [0,1].
double tail_ratio_min(const std::vector<double>& sx, const std::vector<double>& sy) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sx.size(); ++k) {
    if (sy[k] == 0.0) continue;  // 0/0 skipped; x>0 over 0 is +inf, never the min
    lo = std::min(lo, sx[k] / sy[k]);
  }
  if (!std::isfinite(lo)) return 1.0;  // no comparable position: treat as equal
  return std::clamp(lo, 0.0, 1.0);
}

}  // namespace

MajorizationReport tails_dominated(const SimplexVector& x, const SimplexVector& y,
                                   double tol) {
  if (x.values.size() != y.values.size())
    throw ValidationError("tails_dominated: length mismatch");

  MajorizationReport r;
  r.suffix_x = suffix_sums(x.values);
  r.suffix_y = suffix_sums(y.values);
  r.dominated = true;
  for (std::size_t k = 0; k < r.suffix_x.size(); ++k) {
    if (r.suffix_x[k] > r.suffix_y[k] + tol) {
      r.dominated = false;
      r.first_violation_k = k + 1;
      break;
    }
  }
  r.pi = tail_ratio_min(r.suffix_x, r.suffix_y);
  return r;
}

double vidal_pi(const SimplexVector& x, const SimplexVector& y) {
  if (x.values.size() != y.values.size())
    throw ValidationError("vidal_pi: length mismatch");
  const std::vector<double> sx = suffix_sums(x.values);
  const std::vector<double> sy = suffix_sums(y.values);
  if (std::abs(sx[0] - 1.0) > 1e-9 || std::abs(sy[0] - 1.0) > 1e-9)
    throw ValidationError("vidal_pi: inputs must sum to 1 within 1e-9");
  return tail_ratio_min(sx, sy);
}

bool convex_dominance_check(const std::vector<double>& x, const std::vector<double>& y,
                            const std::function<double(double)>& f) {
  double fx = 0.0, fy = 0.0;
  for (double t : x) fx += f(t);
  for (double t : y) fy += f(t);
  return fx <= fy + 1e-9;
}

}  // namespace wishlab
