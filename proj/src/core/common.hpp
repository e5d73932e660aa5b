#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace coherence {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

// Physicality / completeness tolerance used by every validating entry point.
inline constexpr double kTol = 1e-9;
// An entry counts as structurally nonzero above this modulus.
inline constexpr double kNonzeroTol = 1e-9;

enum class ErrorCode {
  InvalidArgument,
  InvalidState,
  InvalidMatrix,
  IncompleteChannel,
  NotIncoherent,
  NotDiagonalUnitary,
  TargetUnreachable,
  DegenerateSource,
  DegenerateRegion,
  UnsupportedClass,
  SamplerExhausted,
  NonConvergence,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coherence
