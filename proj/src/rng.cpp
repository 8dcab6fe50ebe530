#include "wishlab/rng.hpp"

#include <cmath>

#include "wishlab/errors.hpp"

namespace wishlab {
namespace {

// Philox4x64 round constants (Salmon, Moraes, Dror, Shaw; SC'11).
constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

constexpr double kInvSqrt2 = 0.70710678118654752440;

inline std::uint64_t mulhi(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) >> 64);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {}

void RngStream::refill() {
  // Counter words: 128-bit block counter in the low two lanes, zero padding
  // above; key = (master_seed, stream_id).
  std::uint64_t c0 = ctr_lo_, c1 = ctr_hi_, c2 = 0, c3 = 0;
  std::uint64_t k0 = master_seed_, k1 = stream_id_;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t lo0 = kMul0 * c0, hi0 = mulhi(kMul0, c0);
    const std::uint64_t lo1 = kMul1 * c2, hi1 = mulhi(kMul1, c2);
    const std::uint64_t n0 = hi1 ^ c1 ^ k0;
    const std::uint64_t n2 = hi0 ^ c3 ^ k1;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  block_[0] = c0;
  block_[1] = c1;
  block_[2] = c2;
  block_[3] = c3;
  if (++ctr_lo_ == 0) ++ctr_hi_;
  pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ == 4) refill();
  return block_[pos_++];
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_double_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  for (;;) {
    const double u = 2.0 * next_double() - 1.0;
    const double v = 2.0 * next_double() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
  }
}

std::complex<double> RngStream::next_complex_gaussian() {
  const double re = next_normal() * kInvSqrt2;
  const double im = next_normal() * kInvSqrt2;
  return {re, im};
}

double RngStream::next_exponential() { return -std::log(next_double_pos()); }

double RngStream::next_gamma(double shape) {
  if (!(shape >= 1.0)) {
    throw ValidationError("next_gamma requires shape >= 1");
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_double_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

RngStream derive_substream(std::uint64_t master_seed, std::uint64_t index) {
  return RngStream(master_seed, index);
}

}  // namespace wishlab
