#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wishlab {

// Bad arguments handed to a library routine (caller broke a precondition).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid user-facing configuration (CLI flags / JSON file). Exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative numerical routine exhausted its sweep budget. Exit code 3.
// `index` is the diagonal position that refused to deflate.
struct ConvergenceError : std::runtime_error {
  std::size_t index;
  ConvergenceError(const std::string& what, std::size_t idx)
      : std::runtime_error(what), index(idx) {}
};

// A quadrature refinement self-check failed, or an eigenvalue came out more
// negative than solver roundoff can explain. Exit code 3.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sample hit a probability-zero degenerate configuration (e.g. zero trace);
// in practice this signals an upstream bug, not bad luck.
struct DegenerateSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure while emitting results. Exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wishlab
