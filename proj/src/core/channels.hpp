#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "core/qubit.hpp"

namespace coherence {

// Ordered Kraus operators of a single-qubit channel. Completeness is not a
// construction invariant so that malformed sets can still be inspected;
// operations that need a channel call require_complete().
class KrausSet {
 public:
  explicit KrausSet(std::vector<Mat2> ops);

  const std::vector<Mat2>& operators() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }
  const Mat2& operator[](std::size_t i) const { return ops_[i]; }

  // max |(sum K^dag K - I)_ij|
  double completeness_residual() const;
  bool is_complete(double tol = kTol) const { return completeness_residual() <= tol; }
  void require_complete() const;

 private:
  std::vector<Mat2> ops_;
};

enum class ClassKind { NotTracePreserving, NotIncoherent, IO, SIO, PIO, CPO };

// The six single-qubit PIO families. K1/K2 are the dephasing-type pairs
// {|0><0|,|1><1|}, {|1><0|,|0><1|}; K3/K4 reset to |0> and |1>; K5/K6 are the
// diagonal and anti-diagonal phased permutations.
enum class PioFamily { K1 = 1, K2, K3, K4, K5, K6 };

struct PioComponent {
  double weight = 0.0;
  PioFamily family = PioFamily::K1;
};

struct ChannelClass {
  ClassKind kind = ClassKind::NotTracePreserving;
  // Families with nonzero weight, for PIO and CPO results.
  std::vector<PioFamily> pio_families;
};

const char* to_string(ClassKind kind);
const char* to_string(PioFamily family);

struct Branch {
  double probability = 0.0;
  // Empty when probability < tol.
  std::optional<DensityMatrix> outcome;
};

DensityMatrix apply(const KrausSet& ch, const DensityMatrix& m);
BlochState apply(const KrausSet& ch, const BlochState& s);
std::vector<Branch> apply_selective(const KrausSet& ch, const DensityMatrix& m);

// Structural tests on a single operator. Entries count as nonzero above
// kNonzeroTol.
bool is_incoherent_operator(const Mat2& k);
bool is_strictly_incoherent_operator(const Mat2& k);
bool is_phased_permutation(const Mat2& k);

// Reads a flat Kraus list as a mixture of the six PIO families, where each
// operator must be proportional to a family operator. Returns nullopt when
// some operator is not. Requires a complete set.
std::optional<std::vector<PioComponent>> pio_decomposition(const KrausSet& ch);

// Most restrictive class of the given representation.
ChannelClass classify(const KrausSet& ch);

// {u2^dag K u1}. Throws NotDiagonalUnitary, IncompleteChannel.
KrausSet conjugate_channel(const KrausSet& ch, const Mat2& u1, const Mat2& u2);
KrausSet conjugate_channel(const KrausSet& ch, const DephasingPair& pair);

}  // namespace coherence
