#include "core/qubit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace coherence {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::IncompleteChannel: return "IncompleteChannel";
    case ErrorCode::NotIncoherent: return "NotIncoherent";
    case ErrorCode::NotDiagonalUnitary: return "NotDiagonalUnitary";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::DegenerateSource: return "DegenerateSource";
    case ErrorCode::DegenerateRegion: return "DegenerateRegion";
    case ErrorCode::UnsupportedClass: return "UnsupportedClass";
    case ErrorCode::SamplerExhausted: return "SamplerExhausted";
    case ErrorCode::NonConvergence: return "NonConvergence";
  }
  return "Unknown";
}

double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0) t += two_pi;
  // fmod of a tiny negative number can round up to exactly 2pi.
  if (t >= two_pi) t = 0.0;
  return t;
}

BlochState BlochState::make(double z, double r, double theta) {
  if (!std::isfinite(z) || !std::isfinite(r) || !std::isfinite(theta)) {
    throw Error(ErrorCode::InvalidState, "state coordinates must be finite");
  }
  if (z * z + r * r > 1.0 + kTol || std::abs(z) > 1.0 + kTol || std::abs(r) > 1.0 + kTol) {
    std::ostringstream msg;
    msg << "state (z=" << z << ", r=" << r << ") lies outside the Bloch sphere";
    throw Error(ErrorCode::InvalidState, msg.str());
  }
  BlochState s;
  s.z = z;
  s.r = r;
  s.theta = std::abs(r) < kTol ? 0.0 : normalize_angle(theta);
  return s;
}

DensityMatrix::DensityMatrix(const Mat2& m) : m_(m) {
  if (!m.allFinite()) throw Error(ErrorCode::InvalidMatrix, "matrix has non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kTol) throw Error(ErrorCode::InvalidMatrix, "matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > kTol) throw Error(ErrorCode::InvalidMatrix, "trace is not 1");
  // Eigenvalues of a 2x2 Hermitian matrix: tr/2 +- sqrt((a-d)^2/4 + |b|^2).
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
  if (0.5 * (a + d) - half_gap < -kTol) {
    throw Error(ErrorCode::InvalidMatrix, "matrix has a negative eigenvalue");
  }
}

Mat2 DiagonalUnitary::matrix() const {
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::polar(1.0, phase0);
  u(1, 1) = std::polar(1.0, phase1);
  return u;
}

DensityMatrix bloch_to_density(const BlochState& s) {
  if (s.z * s.z + s.r * s.r > 1.0 + kTol) {
    throw Error(ErrorCode::InvalidState, "state lies outside the Bloch sphere");
  }
  Mat2 m;
  m(0, 0) = 0.5 * (1.0 + s.z);
  m(1, 1) = 0.5 * (1.0 - s.z);
  m(0, 1) = 0.5 * s.r * std::polar(1.0, -s.theta);
  m(1, 0) = 0.5 * s.r * std::polar(1.0, s.theta);
  return DensityMatrix(m);
}

BlochState density_to_bloch(const DensityMatrix& m) {
  BlochState s;
  s.z = (m(0, 0) - m(1, 1)).real();
  s.r = 2.0 * std::abs(m(0, 1));
  s.theta = s.r < kTol ? 0.0 : normalize_angle(std::arg(m(1, 0)));
  return s;
}

PhaseReduction phase_reduce(const BlochState& s) {
  PhaseReduction out;
  out.reduced = {s.z, s.r, 0.0};
  out.u = {-0.5 * s.theta, 0.5 * s.theta};
  return out;
}

}  // namespace coherence
