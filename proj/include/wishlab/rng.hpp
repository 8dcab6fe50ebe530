#pragma once

#include <complex>
#include <cstdint>
#include <optional>

namespace wishlab {

// Counter-based random stream built on the Philox4x64-10 block cipher.
//
// Every output is a pure function of (master_seed, stream_id, counter), so a
// stream can be reconstructed anywhere from those integers and replayed
// bit-for-bit; distinct stream ids act as statistically independent streams.
// That is what makes per-trial substreams safe under any worker schedule.
//
// A stream is single-owner: never share one instance across threads. Give
// each parallel trial its own substream via derive_substream instead.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double next_double();

  // Uniform on (0,1]; always a safe -log() argument.
  double next_double_pos();

  // Standard normal deviate via the polar (Marsaglia) rejection method.
  // The spare deviate is cached, so the draw order is part of the
  // reproducibility contract of a stream.
  double next_normal();

  // Complex Gaussian with E[(Re z)^2 + (Im z)^2] = 1 (each part N(0, 1/2)).
  std::complex<double> next_complex_gaussian();

  // Exp(1).
  double next_exponential();

  // Gamma(shape, 1) via the Marsaglia–Tsang squeeze. Requires shape >= 1,
  // which is all the bidiagonal sampler ever needs.
  double next_gamma(double shape);

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t ctr_lo_ = 0;
  std::uint64_t ctr_hi_ = 0;
  std::uint64_t block_[4] = {0, 0, 0, 0};
  int pos_ = 4;  // next unread word of block_; 4 means "refill needed"
  std::optional<double> spare_;
};

// The stream dedicated to trial `index` under `master_seed`: the canonical
// way to give every Monte Carlo trial independent, replayable randomness.
RngStream derive_substream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace wishlab
