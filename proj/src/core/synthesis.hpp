#pragma once

#include <array>
#include <vector>

#include "core/channels.hpp"
#include "core/qubit.hpp"

namespace coherence {

// Parameters of the two-operator IO
//
//   K0 = diag(c00, c11),   K1 = [[0, c01], [c10, 0]]
//
// with |c00| = sqrt(alpha), |c10| = sqrt(1 - alpha), |c11| = sqrt(beta),
// |c01| = sqrt(1 - beta). case_index fixes the signs of c00 and c10:
// 1 (+,+), 2 (+,-), 3 (-,+), 4 (-,-). The channel scales the off-diagonal
// by lambda and moves z to (alpha - beta) + z (alpha + beta - 1).
struct SynthesisSolution {
  double alpha = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  double theta_param = 0.0;
  double phi = 0.0;
  int case_index = 1;
  double alpha_tilde = 0.0;  // (alpha + beta - 1) / sqrt(2)
  double beta_tilde = 0.0;   // (alpha - beta) / sqrt(2)
};

// lambda realized by a case for the given alpha, beta.
double case_lambda(int case_index, double alpha, double beta);

struct IoSynthesis {
  KrausSet channel;
  SynthesisSolution solution;
};

// Throws TargetUnreachable, DegenerateSource.
IoSynthesis synth_io(const BlochState& from, const BlochState& to);

// K0 = diag(a, b), K1 = [[0, d], [c, 0]] in the phase-reduced frame of the
// state; the emitted operators are these times u^dagger.
struct SioConversionSolution {
  Complex a, b, c, d;
  double h1 = 0.0;
  double h2 = 0.0;
  double a_sq = 0.0;  // |A|^2 = sum_i |A_i|^2 over top-row operators
  double b_sq = 0.0;
  double c_sq = 0.0;  // |C|^2 over bottom-row operators
  double d_sq = 0.0;
  bool converted = false;  // false when there was nothing to replace
};

struct SioConversion {
  KrausSet channel;
  SioConversionSolution solution;
};

// Replaces every single-row (M1/M2-type) operator of an incoherent channel by
// one diagonal and one anti-diagonal operator that act identically on the
// given state. Throws NotIncoherent, IncompleteChannel.
SioConversion io_to_sio(const KrausSet& ch, const BlochState& state);

// Phase convention per family (first, second):
//   K1 {e^{i f}|0><0|, e^{i s}|1><1|}   K2 {e^{i f}|1><0|, e^{i s}|0><1|}
//   K3 {e^{i f}|0><0|, e^{i s}|0><1|}   K4 {e^{i f}|1><0|, e^{i s}|1><1|}
//   K5 {diag(e^{i f}, e^{i s})}         K6 {e^{i f}|1><0| + e^{i s}|0><1|}
std::vector<Mat2> pio_family_operators(PioFamily family, std::array<double, 2> phases);

struct PioMixtureEntry {
  double weight = 0.0;
  PioFamily family = PioFamily::K5;
  std::array<double, 2> phases{0.0, 0.0};
};

struct PioMixture {
  std::vector<PioMixtureEntry> entries;
};

// Flat Kraus list with each family's operators scaled by sqrt(weight).
KrausSet mixture_channel(const PioMixture& mixture);

// Convex weights over the hexagon corners (at most three nonzero).
// Throws TargetUnreachable.
PioMixture synth_pio(const BlochState& from, const BlochState& to);

// Single phased permutation. Throws TargetUnreachable.
KrausSet synth_cpo(const BlochState& from, const BlochState& to);

}  // namespace coherence
