#pragma once

#include <array>

#include "core/common.hpp"

namespace coherence {

// Single-qubit state in cylindrical Bloch coordinates:
//
//   rho = 1/2 [[1+z, r e^{-i theta}], [r e^{i theta}, 1-z]]
//
// r carries a sign so the real representative (theta = 0) can distinguish
// (z, r) from (z, -r). theta is kept in [0, 2pi) and is 0 whenever |r| < tol.
struct BlochState {
  double z = 0.0;
  double r = 0.0;
  double theta = 0.0;

  // Validates physicality and normalizes theta. Throws InvalidState.
  static BlochState make(double z, double r, double theta = 0.0);
};

// A (z, r) pair in the transformation-region plane. Not validated; region
// predicates accept arbitrary points, including ones outside the Bloch disk.
struct Point {
  double z = 0.0;
  double r = 0.0;
};

inline Point plane_point(const BlochState& s) { return {s.z, s.r}; }

class DensityMatrix {
 public:
  // Throws InvalidMatrix unless m is Hermitian, unit trace and positive
  // semidefinite within tol.
  explicit DensityMatrix(const Mat2& m);

  const Mat2& matrix() const noexcept { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  Mat2 m_;
};

// diag(e^{i phase0}, e^{i phase1})
struct DiagonalUnitary {
  double phase0 = 0.0;
  double phase1 = 0.0;

  Mat2 matrix() const;
  DiagonalUnitary adjoint() const { return {-phase0, -phase1}; }
  static DiagonalUnitary identity() { return {}; }
};

// Input/output dephasing unitaries used to move a channel between phase frames.
struct DephasingPair {
  DiagonalUnitary u1;
  DiagonalUnitary u2;
};

struct PhaseReduction {
  BlochState reduced;  // (z, r, 0)
  DiagonalUnitary u;   // rho = u * reduced * u^dagger
};

double normalize_angle(double theta);

DensityMatrix bloch_to_density(const BlochState& s);

// r is returned nonnegative; theta = arg(m10), forced to 0 when r < tol.
BlochState density_to_bloch(const DensityMatrix& m);

inline double l1_coherence(const BlochState& s) { return s.r < 0 ? -s.r : s.r; }

PhaseReduction phase_reduce(const BlochState& s);

}  // namespace coherence
