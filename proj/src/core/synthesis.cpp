#include "core/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "core/regions.hpp"

namespace coherence {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

double wrap_pi(double t) {
  t = std::remainder(t, 2.0 * kPi);
  return t <= -kPi ? t + 2.0 * kPi : t;
}

double sqrt0(double x) { return std::sqrt(std::max(0.0, x)); }

// Lift a channel acting between real representatives back to the original
// phase frames: K -> U_to K U_from^dagger.
KrausSet lift_to_frames(const KrausSet& real, const PhaseReduction& from, const PhaseReduction& to) {
  return conjugate_channel(real, from.u.adjoint().matrix(), to.u.adjoint().matrix());
}

KrausSet special_io(const SynthesisSolution& s) {
  const double sa = (s.case_index == 3 || s.case_index == 4) ? -1.0 : 1.0;
  const double sc = (s.case_index == 2 || s.case_index == 4) ? -1.0 : 1.0;
  Mat2 k0 = Mat2::Zero();
  Mat2 k1 = Mat2::Zero();
  k0(0, 0) = sa * sqrt0(s.alpha);
  k0(1, 1) = sqrt0(s.beta);
  k1(0, 1) = sqrt0(1.0 - s.beta);
  k1(1, 0) = sc * sqrt0(1.0 - s.alpha);
  return KrausSet({k0, k1});
}

// Lowest case whose lambda formula reproduces lambda best.
int select_case(double alpha, double beta, double lambda) {
  std::array<double, 4> err{};
  for (int k = 1; k <= 4; ++k) err[k - 1] = std::abs(case_lambda(k, alpha, beta) - lambda);
  const double best = *std::min_element(err.begin(), err.end());
  for (int k = 1; k <= 4; ++k) {
    if (err[k - 1] <= best + 1e-12) return k;
  }
  return 1;
}

// Incoherent source: only the populations move, 1 + z' = alpha (1 + z) + (1 - beta)(1 - z).
SynthesisSolution incoherent_source_solution(double z, double zt) {
  SynthesisSolution s;
  if (std::abs(z) >= kTol && std::abs(zt) <= std::abs(z)) {
    s.alpha = s.beta = std::clamp((zt + z) / (2.0 * z), 0.0, 1.0);
  } else if (std::abs(z) < kTol && std::abs(zt) < kTol) {
    s.alpha = s.beta = 1.0;
  } else if (zt > 0) {
    s.alpha = 1.0;
    s.beta = std::clamp((1.0 - zt) / (1.0 - z), 0.0, 1.0);
  } else {
    s.beta = 1.0;
    s.alpha = std::clamp((1.0 + zt) / (1.0 + z), 0.0, 1.0);
  }
  s.lambda = 0.0;
  s.case_index = 1;
  s.theta_param = 0.0;
  s.phi = 0.0;
  s.alpha_tilde = (s.alpha + s.beta - 1.0) / kSqrt2;
  s.beta_tilde = (s.alpha - s.beta) / kSqrt2;
  return s;
}

SynthesisSolution coherent_source_solution(double z, double r, double zt, double rt) {
  SynthesisSolution s;
  s.lambda = std::clamp(rt / r, -1.0, 1.0);
  const double lam = s.lambda;
  const double spread = std::sqrt(std::max(0.0, lam * lam * z * z + 1.0 - lam * lam));

  if (spread < 1e-12) {
    // z = 0 and |lambda| = 1: z' is pinned to 0 and every theta works.
    s.phi = 0.0;
    s.theta_param = lam >= 0 ? kPi / 2 : -kPi / 2;
  } else {
    s.phi = std::atan2(sqrt0(1.0 - lam * lam), lam * z);
    // psi solves z' = spread * sin(psi). On the ellipse the cosine is the square
    // root of a vanishing slack, so rounding noise there is snapped to zero
    // instead of being amplified by asin near +-1.
    double slack = (1.0 - zt) * (1.0 + zt) - lam * lam * (1.0 - z) * (1.0 + z);
    if (slack < 1e-14) slack = 0.0;
    const double psi = std::atan2(zt, std::sqrt(slack));
    const std::array<double, 2> branch = {wrap_pi(psi - s.phi), wrap_pi(kPi - psi - s.phi)};
    const double d = std::abs(branch[0]) - std::abs(branch[1]);
    if (std::abs(d) <= 1e-12) {
      s.theta_param = std::max(branch[0], branch[1]);
    } else {
      s.theta_param = d < 0 ? branch[0] : branch[1];
    }
  }

  s.alpha_tilde = std::sin(s.theta_param) * lam / kSqrt2;
  s.beta_tilde = std::cos(s.theta_param) * sqrt0((1.0 - lam * lam) / 2.0);
  s.alpha = std::clamp((1.0 + kSqrt2 * s.alpha_tilde + kSqrt2 * s.beta_tilde) / 2.0, 0.0, 1.0);
  s.beta = std::clamp((1.0 + kSqrt2 * s.alpha_tilde - kSqrt2 * s.beta_tilde) / 2.0, 0.0, 1.0);
  s.case_index = select_case(s.alpha, s.beta, lam);
  return s;
}

}  // namespace

double case_lambda(int case_index, double alpha, double beta) {
  const double p = sqrt0(alpha * beta);
  const double q = sqrt0((1.0 - alpha) * (1.0 - beta));
  switch (case_index) {
    case 1: return p + q;
    case 2: return p - q;
    case 3: return -p + q;
    case 4: return -p - q;
  }
  throw Error(ErrorCode::InvalidArgument, "case index must be 1..4");
}

IoSynthesis synth_io(const BlochState& from, const BlochState& to) {
  if (std::abs(from.r) < kTol && std::abs(to.r) >= kTol) {
    throw Error(ErrorCode::DegenerateSource, "an incoherent source cannot reach a coherent target");
  }
  if (!io_region_contains(from, to).verdict) {
    throw Error(ErrorCode::TargetUnreachable, "target lies outside the IO transformation region");
  }
  const PhaseReduction pf = phase_reduce(from);
  const PhaseReduction pt = phase_reduce(to);
  const SynthesisSolution sol = std::abs(from.r) < kTol
                                    ? incoherent_source_solution(from.z, to.z)
                                    : coherent_source_solution(from.z, from.r, to.z, to.r);
  return {lift_to_frames(special_io(sol), pf, pt), sol};
}

SioConversion io_to_sio(const KrausSet& ch, const BlochState& state) {
  ch.require_complete();
  for (const auto& k : ch.operators()) {
    if (!is_incoherent_operator(k)) {
      throw Error(ErrorCode::NotIncoherent, "channel has an operator with two nonzero entries in a column");
    }
  }
  const PhaseReduction pr = phase_reduce(state);
  const Mat2 u = pr.u.matrix();
  const double z = state.z;
  const double r = pr.reduced.r;

  auto nz = [](Complex c) { return std::abs(c) > kNonzeroTol; };
  SioConversionSolution sol;
  std::vector<Mat2> passthrough;
  bool any_row_type = false;
  for (const auto& k : ch.operators()) {
    const bool diag = !nz(k(0, 1)) && !nz(k(1, 0));
    const bool anti = !nz(k(0, 0)) && !nz(k(1, 1));
    if (diag || anti) {
      passthrough.push_back(k);
      continue;
    }
    any_row_type = true;
    // In the reduced frame the operator sees the real representative.
    const Mat2 kr = k * u;
    if (!nz(k(1, 0)) && !nz(k(1, 1))) {
      const Complex a = kr(0, 0), b = kr(0, 1);
      sol.a_sq += std::norm(a);
      sol.b_sq += std::norm(b);
      sol.h1 += 2.0 * r * (b * std::conj(a)).real();
    } else {
      const Complex c = kr(1, 0), d = kr(1, 1);
      sol.c_sq += std::norm(c);
      sol.d_sq += std::norm(d);
      sol.h2 += 2.0 * r * (d * std::conj(c)).real();
    }
  }
  if (!any_row_type) return {ch, sol};

  sol.h1 += sol.a_sq * (1.0 + z) + sol.b_sq * (1.0 - z);
  sol.h2 += sol.c_sq * (1.0 + z) + sol.d_sq * (1.0 - z);
  sol.h1 = std::max(0.0, sol.h1);
  sol.h2 = std::max(0.0, sol.h2);

  const double left = sol.a_sq + sol.c_sq;   // weight of column 0
  const double right = sol.b_sq + sol.d_sq;  // weight of column 1
  const double h = sol.h1 + sol.h2;
  double a2, b2, c2, d2;
  if (h > 1e-300) {
    // Same values as the (1 - z)-denominator form, using
    // h1 + h2 = left (1 + z) + right (1 - z); stays finite at z = 1.
    a2 = left * sol.h1 / h;
    c2 = left * sol.h2 / h;
    b2 = right * sol.h2 / h;
    d2 = right * sol.h1 / h;
  } else {
    // Both aggregates annihilate the state; then left * right = 0.
    a2 = left;
    b2 = right;
    c2 = d2 = 0.0;
  }
  const double a = std::sqrt(a2), b = std::sqrt(b2), d = std::sqrt(d2);
  // a, b, d >= 0 and c real: a b^* + c^* d = 0 becomes c = -a b / d.
  const double c = a * b > 0.0 ? -std::sqrt(c2) : std::sqrt(c2);
  if (d == 0.0 && a * b > kTol) {
    throw std::logic_error("io_to_sio: d = 0 requires a b = 0");
  }
  sol.a = a;
  sol.b = b;
  sol.c = c;
  sol.d = d;
  sol.converted = true;

  Mat2 k0 = Mat2::Zero();
  Mat2 k1 = Mat2::Zero();
  k0(0, 0) = a;
  k0(1, 1) = b;
  k1(0, 1) = d;
  k1(1, 0) = c;
  std::vector<Mat2> ops = {k0 * u.adjoint(), k1 * u.adjoint()};
  ops.insert(ops.end(), passthrough.begin(), passthrough.end());
  return {KrausSet(std::move(ops)), sol};
}

std::vector<Mat2> pio_family_operators(PioFamily family, std::array<double, 2> phases) {
  const Complex f = std::polar(1.0, phases[0]);
  const Complex s = std::polar(1.0, phases[1]);
  Mat2 k0 = Mat2::Zero();
  Mat2 k1 = Mat2::Zero();
  switch (family) {
    case PioFamily::K1: k0(0, 0) = f; k1(1, 1) = s; return {k0, k1};
    case PioFamily::K2: k0(1, 0) = f; k1(0, 1) = s; return {k0, k1};
    case PioFamily::K3: k0(0, 0) = f; k1(0, 1) = s; return {k0, k1};
    case PioFamily::K4: k0(1, 0) = f; k1(1, 1) = s; return {k0, k1};
    case PioFamily::K5: k0(0, 0) = f; k0(1, 1) = s; return {k0};
    case PioFamily::K6: k0(1, 0) = f; k0(0, 1) = s; return {k0};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown PIO family");
}

namespace {

// Inverse of pio_family_operators for operators of a known family.
std::array<double, 2> family_phases(PioFamily family, const std::vector<Mat2>& ops) {
  switch (family) {
    case PioFamily::K1: return {std::arg(ops[0](0, 0)), std::arg(ops[1](1, 1))};
    case PioFamily::K2: return {std::arg(ops[0](1, 0)), std::arg(ops[1](0, 1))};
    case PioFamily::K3: return {std::arg(ops[0](0, 0)), std::arg(ops[1](0, 1))};
    case PioFamily::K4: return {std::arg(ops[0](1, 0)), std::arg(ops[1](1, 1))};
    case PioFamily::K5: return {std::arg(ops[0](0, 0)), std::arg(ops[0](1, 1))};
    case PioFamily::K6: return {std::arg(ops[0](1, 0)), std::arg(ops[0](0, 1))};
  }
  return {0.0, 0.0};
}

std::array<double, 3> barycentric(Point a, Point b, Point c, Point p) {
  const double det = (b.z - a.z) * (c.r - a.r) - (c.z - a.z) * (b.r - a.r);
  const double l1 = ((p.z - a.z) * (c.r - a.r) - (c.z - a.z) * (p.r - a.r)) / det;
  const double l2 = ((b.z - a.z) * (p.r - a.r) - (p.z - a.z) * (b.r - a.r)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace

KrausSet mixture_channel(const PioMixture& mixture) {
  std::vector<Mat2> ops;
  for (const auto& e : mixture.entries) {
    for (const auto& k : pio_family_operators(e.family, e.phases)) ops.push_back(std::sqrt(e.weight) * k);
  }
  return KrausSet(std::move(ops));
}

PioMixture synth_pio(const BlochState& from, const BlochState& to) {
  if (!pio_region_contains(from, to).verdict) {
    throw Error(ErrorCode::TargetUnreachable, "target lies outside the PIO hexagon");
  }
  const auto& hex = pio_region_vertices(plane_point(from)).vertices;
  const Point p = plane_point(to);

  std::vector<std::pair<std::size_t, double>> weights;  // (vertex, weight)
  if (hex.size() == 2) {
    const double up = std::clamp(0.5 * (1.0 + p.z), 0.0, 1.0);
    weights = {{0, up}, {1, 1.0 - up}};
  } else {
    // Fan triangulation from (1, 0); take the triangle that holds p most
    // comfortably so boundary points do not fall between triangles.
    double best_min = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < hex.size(); ++k) {
      auto lam = barycentric(hex[0].p, hex[k].p, hex[k + 1].p, p);
      const double m = std::min({lam[0], lam[1], lam[2]});
      if (m > best_min) {
        best_min = m;
        for (auto& l : lam) l = std::max(0.0, l);
        const double sum = lam[0] + lam[1] + lam[2];
        weights = {{0, lam[0] / sum}, {k, lam[1] / sum}, {k + 1, lam[2] / sum}};
      }
    }
  }

  const PhaseReduction pf = phase_reduce(from);
  const PhaseReduction pt = phase_reduce(to);
  const Mat2 u_in = pf.u.adjoint().matrix();
  const Mat2 u_out = pt.u.matrix();

  PioMixture mixture;
  for (const auto& [idx, w] : weights) {
    if (w <= 0.0) continue;
    const HexVertex& v = hex[idx];
    const std::array<double, 2> real_phases = {0.0, v.flips_r ? kPi : 0.0};
    std::vector<Mat2> ops = pio_family_operators(v.family, real_phases);
    for (auto& k : ops) k = u_out * k * u_in;
    mixture.entries.push_back({w, v.family, family_phases(v.family, ops)});
  }
  return mixture;
}

KrausSet synth_cpo(const BlochState& from, const BlochState& to) {
  if (!cpo_reachable(from, to).verdict) {
    throw Error(ErrorCode::TargetUnreachable, "target is not in the CPO orbit of the source");
  }
  const Point f = plane_point(from);
  const Point t = plane_point(to);
  struct Candidate {
    Point image;
    PioFamily family;
    double second_phase;
  };
  const std::array<Candidate, 4> candidates = {{
      {{f.z, f.r}, PioFamily::K5, 0.0},
      {{f.z, -f.r}, PioFamily::K5, kPi},
      {{-f.z, f.r}, PioFamily::K6, 0.0},
      {{-f.z, -f.r}, PioFamily::K6, kPi},
  }};
  const Candidate* pick = &candidates[0];
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double d = std::hypot(c.image.z - t.z, c.image.r - t.r);
    if (d < best - 1e-15) {
      best = d;
      pick = &c;
    }
  }
  const KrausSet real(pio_family_operators(pick->family, {0.0, pick->second_phase}));
  return lift_to_frames(real, phase_reduce(from), phase_reduce(to));
}

}  // namespace coherence
