#include "core/channels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace coherence {

namespace {

bool nonzero(Complex c) { return std::abs(c) > kNonzeroTol; }

int count_nonzero(const Mat2& k) {
  int n = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) n += nonzero(k(i, j));
  return n;
}

bool is_diagonal_pattern(const Mat2& k) { return !nonzero(k(0, 1)) && !nonzero(k(1, 0)); }
bool is_antidiagonal_pattern(const Mat2& k) { return !nonzero(k(0, 0)) && !nonzero(k(1, 1)); }

void require_diagonal_unitary(const Mat2& u, const char* name) {
  const bool diagonal = std::abs(u(0, 1)) <= kTol && std::abs(u(1, 0)) <= kTol;
  const bool unit = std::abs(std::abs(u(0, 0)) - 1.0) <= kTol && std::abs(std::abs(u(1, 1)) - 1.0) <= kTol;
  if (!diagonal || !unit) {
    throw Error(ErrorCode::NotDiagonalUnitary, std::string(name) + " is not a diagonal unitary");
  }
}

}  // namespace

KrausSet::KrausSet(std::vector<Mat2> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw Error(ErrorCode::InvalidArgument, "a Kraus set needs at least one operator");
  for (const auto& k : ops_) {
    if (!k.allFinite()) throw Error(ErrorCode::InvalidMatrix, "Kraus operator has non-finite entries");
  }
}

double KrausSet::completeness_residual() const {
  Mat2 sum = Mat2::Zero();
  for (const auto& k : ops_) sum += k.adjoint() * k;
  return (sum - Mat2::Identity()).cwiseAbs().maxCoeff();
}

void KrausSet::require_complete() const {
  const double residual = completeness_residual();
  if (residual > kTol) {
    std::ostringstream msg;
    msg << "Kraus set is not complete (residual " << residual << ")";
    throw Error(ErrorCode::IncompleteChannel, msg.str());
  }
}

const char* to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::NotTracePreserving: return "NotTracePreserving";
    case ClassKind::NotIncoherent: return "NotIncoherent";
    case ClassKind::IO: return "IO";
    case ClassKind::SIO: return "SIO";
    case ClassKind::PIO: return "PIO";
    case ClassKind::CPO: return "CPO";
  }
  return "Unknown";
}

const char* to_string(PioFamily family) {
  static constexpr std::array<const char*, 6> names = {"K1", "K2", "K3", "K4", "K5", "K6"};
  return names[static_cast<int>(family) - 1];
}

DensityMatrix apply(const KrausSet& ch, const DensityMatrix& m) {
  ch.require_complete();
  Mat2 out = Mat2::Zero();
  for (const auto& k : ch.operators()) out += k * m.matrix() * k.adjoint();
  // Remove the anti-Hermitian round-off so long chains stay valid.
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

BlochState apply(const KrausSet& ch, const BlochState& s) {
  return density_to_bloch(apply(ch, bloch_to_density(s)));
}

std::vector<Branch> apply_selective(const KrausSet& ch, const DensityMatrix& m) {
  ch.require_complete();
  std::vector<Branch> branches;
  branches.reserve(ch.size());
  for (const auto& k : ch.operators()) {
    const Mat2 unnormalized = k * m.matrix() * k.adjoint();
    Branch b;
    b.probability = unnormalized.trace().real();
    if (b.probability >= kTol) {
      const Mat2 rho = unnormalized / b.probability;
      b.outcome = DensityMatrix(0.5 * (rho + rho.adjoint()));
    }
    branches.push_back(std::move(b));
  }
  return branches;
}

bool is_incoherent_operator(const Mat2& k) {
  for (int col = 0; col < 2; ++col) {
    if (nonzero(k(0, col)) && nonzero(k(1, col))) return false;
  }
  return true;
}

bool is_strictly_incoherent_operator(const Mat2& k) {
  if (!is_incoherent_operator(k)) return false;
  for (int row = 0; row < 2; ++row) {
    if (nonzero(k(row, 0)) && nonzero(k(row, 1))) return false;
  }
  return true;
}

bool is_phased_permutation(const Mat2& k) {
  auto unit = [](Complex c) { return std::abs(std::abs(c) - 1.0) <= kTol; };
  if (is_diagonal_pattern(k)) return unit(k(0, 0)) && unit(k(1, 1));
  if (is_antidiagonal_pattern(k)) return unit(k(0, 1)) && unit(k(1, 0));
  return false;
}

std::optional<std::vector<PioComponent>> pio_decomposition(const KrausSet& ch) {
  ch.require_complete();

  struct Leg {
    int row;
    double weight;
  };
  std::array<std::vector<Leg>, 2> legs;  // single-entry operators keyed by column
  std::map<PioFamily, double> weights;

  for (const auto& k : ch.operators()) {
    const int n = count_nonzero(k);
    if (n == 0) continue;
    if (n == 1) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (nonzero(k(i, j))) legs[j].push_back({i, std::norm(k(i, j))});
      continue;
    }
    if (n == 2 && is_diagonal_pattern(k) && std::abs(std::abs(k(0, 0)) - std::abs(k(1, 1))) <= kNonzeroTol) {
      weights[PioFamily::K5] += 0.5 * (std::norm(k(0, 0)) + std::norm(k(1, 1)));
      continue;
    }
    if (n == 2 && is_antidiagonal_pattern(k) && std::abs(std::abs(k(0, 1)) - std::abs(k(1, 0))) <= kNonzeroTol) {
      weights[PioFamily::K6] += 0.5 * (std::norm(k(0, 1)) + std::norm(k(1, 0)));
      continue;
    }
    return std::nullopt;
  }

  // Completeness forces both columns to carry the same single-entry weight,
  // and every (column-0 row, column-1 row) pairing is one of K1..K4, so a
  // greedy coupling of the two leg lists always succeeds.
  auto family_of = [](int row0, int row1) {
    if (row0 == 0 && row1 == 1) return PioFamily::K1;
    if (row0 == 1 && row1 == 0) return PioFamily::K2;
    if (row0 == 0 && row1 == 0) return PioFamily::K3;
    return PioFamily::K4;
  };
  std::size_t i = 0, j = 0;
  double left0 = legs[0].empty() ? 0.0 : legs[0][0].weight;
  double left1 = legs[1].empty() ? 0.0 : legs[1][0].weight;
  while (i < legs[0].size() && j < legs[1].size()) {
    const double w = std::min(left0, left1);
    weights[family_of(legs[0][i].row, legs[1][j].row)] += w;
    left0 -= w;
    left1 -= w;
    if (left0 <= 1e-15 && ++i < legs[0].size()) left0 = legs[0][i].weight;
    if (left1 <= 1e-15 && ++j < legs[1].size()) left1 = legs[1][j].weight;
  }

  std::vector<PioComponent> out;
  for (const auto& [family, w] : weights) {
    if (w > kTol) out.push_back({w, family});
  }
  return out;
}

ChannelClass classify(const KrausSet& ch) {
  ChannelClass result;
  if (!ch.is_complete()) {
    result.kind = ClassKind::NotTracePreserving;
    return result;
  }
  if (!std::all_of(ch.operators().begin(), ch.operators().end(), is_incoherent_operator)) {
    result.kind = ClassKind::NotIncoherent;
    return result;
  }
  // A complete single-operator set is unitary, so incoherence leaves only
  // the phased permutations.
  if (ch.size() == 1 && is_phased_permutation(ch[0])) {
    result.kind = ClassKind::CPO;
    result.pio_families = {is_diagonal_pattern(ch[0]) ? PioFamily::K5 : PioFamily::K6};
    return result;
  }
  if (auto pio = pio_decomposition(ch)) {
    result.kind = ClassKind::PIO;
    for (const auto& c : *pio) result.pio_families.push_back(c.family);
    return result;
  }
  const bool strict =
      std::all_of(ch.operators().begin(), ch.operators().end(), is_strictly_incoherent_operator);
  result.kind = strict ? ClassKind::SIO : ClassKind::IO;
  return result;
}

KrausSet conjugate_channel(const KrausSet& ch, const Mat2& u1, const Mat2& u2) {
  require_diagonal_unitary(u1, "u1");
  require_diagonal_unitary(u2, "u2");
  ch.require_complete();
  std::vector<Mat2> ops;
  ops.reserve(ch.size());
  for (const auto& k : ch.operators()) ops.push_back(u2.adjoint() * k * u1);
  return KrausSet(std::move(ops));
}

KrausSet conjugate_channel(const KrausSet& ch, const DephasingPair& pair) {
  return conjugate_channel(ch, pair.u1.matrix(), pair.u2.matrix());
}

}  // namespace coherence
