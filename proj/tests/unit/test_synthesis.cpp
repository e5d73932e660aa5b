#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bridge.hpp"
#include "core/oracle.hpp"
#include "core/regions.hpp"
#include "core/synthesis.hpp"

using namespace coherence;
using testing_bridge::mat;
using testing_bridge::to_naive;
using naive::kPi;

namespace {

const double s2 = std::sqrt(2.0);
const double s3 = std::sqrt(3.0);
const double s6 = std::sqrt(6.0);

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

double output_gap(const KrausSet& ch, const naive::State& from, const naive::State& to) {
  return naive::max_abs_diff(naive::apply(to_naive(ch), naive::rho(from.z, from.r, from.theta)),
                             naive::rho(to.z, to.r, to.theta));
}

naive::State state_in_region(std::mt19937_64& rng, const naive::State& from) {
  while (true) {
    auto t = naive::random_state(rng);
    if (naive::io_reachable(from.z, from.r, t.z, t.r, -1e-9)) return t;
  }
}

void expect_case_conditions(const SynthesisSolution& s) {
  const double root = std::sqrt(s.alpha * s.beta);
  EXPECT_NEAR(s.lambda, case_lambda(s.case_index, s.alpha, s.beta), 1e-12);
  if (std::abs(s.lambda) < 1e-3) return;
  const double ratio = (s.lambda * s.lambda + s.alpha + s.beta - 1) / s.lambda;
  switch (s.case_index) {
    case 1:
      EXPECT_LE(root, s.lambda + 1e-9);
      EXPECT_GE(ratio, -1e-9);
      break;
    case 2:
      EXPECT_GE(root, s.lambda - 1e-9);
      EXPECT_GE(ratio, -1e-9);
      break;
    case 3:
      EXPECT_GE(root, -s.lambda - 1e-9);
      EXPECT_LE(ratio, 1e-9);
      break;
    case 4:
      EXPECT_LE(root, -s.lambda + 1e-9);
      EXPECT_LE(ratio, 1e-9);
      break;
    default:
      ADD_FAILURE() << "case " << s.case_index;
  }
}

}  // namespace

TEST(SynthIo, MaximallyCoherentToHalf) {
  const auto res = synth_io(BlochState::make(0, 1), BlochState::make(0.5, 0.5));
  const auto& s = res.solution;
  EXPECT_NEAR(s.alpha, 0.75 + 0.5 / s6, 1e-12);
  EXPECT_NEAR(s.beta, 0.25 + 0.5 / s6, 1e-12);
  EXPECT_EQ(s.case_index, 2);
  ASSERT_EQ(res.channel.size(), 2u);
  EXPECT_LE(naive::max_abs_diff(to_naive(res.channel[0]), {std::sqrt(0.75 + 0.5 / s6), 0, 0, std::sqrt(0.25 + 0.5 / s6)}),
            1e-12);
  EXPECT_LE(naive::max_abs_diff(to_naive(res.channel[1]), {0, std::sqrt(0.75 - 0.5 / s6), -std::sqrt(0.25 - 0.5 / s6), 0}),
            1e-12);
  EXPECT_LE(output_gap(res.channel, {0, 1, 0}, {0.5, 0.5, 0}), 1e-12);
  expect_case_conditions(s);
}

TEST(SynthIo, PureToPure) {
  const auto res = synth_io(BlochState::make(1 / s3, std::sqrt(2.0 / 3)), BlochState::make(1 / s2, 1 / s2));
  ASSERT_EQ(res.channel.size(), 2u);
  const double q = s6 / 8, p = s2 / 8;
  EXPECT_LE(naive::max_abs_diff(to_naive(res.channel[0]), {std::sqrt(0.5 + q + p), 0, 0, std::sqrt(0.5 + q - p)}), 1e-12);
  EXPECT_LE(naive::max_abs_diff(to_naive(res.channel[1]), {0, std::sqrt(0.5 - q + p), std::sqrt(0.5 - q - p), 0}), 1e-12);
  EXPECT_LE(output_gap(res.channel, {1 / s3, std::sqrt(2.0 / 3), 0}, {1 / s2, 1 / s2, 0}), 1e-12);
  expect_case_conditions(res.solution);
}

TEST(SynthIo, IdentityTarget) {
  const auto res = synth_io(BlochState::make(0.3, 0.4), BlochState::make(0.3, 0.4));
  EXPECT_NEAR(res.solution.alpha, 1.0, 1e-12);
  EXPECT_NEAR(res.solution.beta, 1.0, 1e-12);
  EXPECT_NEAR(res.solution.lambda, 1.0, 1e-15);
  EXPECT_LE((res.channel[0] - Mat2::Identity()).norm(), 1e-12);
  EXPECT_LE(res.channel[1].norm(), 1e-12);
}

TEST(SynthIo, FullCoherenceSegment) {
  // |r'| = |r| leaves the whole segment |z'| <= |z| reachable.
  for (double zt : {-0.6, -0.2, 0.0, 0.35, 0.6}) {
    for (double rt : {0.5, -0.5}) {
      const auto res = synth_io(BlochState::make(0.6, 0.5), BlochState::make(zt, rt));
      EXPECT_LE(output_gap(res.channel, {0.6, 0.5, 0}, {zt, std::abs(rt), rt < 0 ? kPi : 0.0}), 1e-12) << zt;
    }
  }
}

TEST(SynthIo, ZeroCoherenceTargetFromCoherentSource) {
  const auto res = synth_io(BlochState::make(0.2, 0.7), BlochState::make(-0.4, 0));
  EXPECT_EQ(res.solution.lambda, 0.0);
  EXPECT_LE(output_gap(res.channel, {0.2, 0.7, 0}, {-0.4, 0, 0}), 1e-12);
  expect_case_conditions(res.solution);
}

TEST(SynthIo, IncoherentSource) {
  for (auto [z, zt] : std::vector<std::pair<double, double>>{{0.5, 0.2}, {0.5, 0.9}, {0.5, -0.9}, {0, 0}, {0, 0.4}, {-1, 1}}) {
    const auto res = synth_io(BlochState::make(z, 0), BlochState::make(zt, 0));
    EXPECT_LE(output_gap(res.channel, {z, 0, 0}, {zt, 0, 0}), 1e-12) << z << " " << zt;
    EXPECT_TRUE(res.channel.is_complete(1e-12));
  }
}

TEST(SynthIo, Errors) {
  EXPECT_EQ(code_of([] { synth_io(BlochState::make(0.6, 0.4), BlochState::make(0.9, 0.3)); }),
            ErrorCode::TargetUnreachable);
  EXPECT_EQ(code_of([] { synth_io(BlochState::make(0.6, 0), BlochState::make(0.2, 0.1)); }),
            ErrorCode::DegenerateSource);
}

TEST(SynthIo, AlphaTildeIdentity) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 2000; ++i) {
    const auto from = naive::random_state(rng);
    const auto to = state_in_region(rng, from);
    const auto s = synth_io(BlochState::make(from.z, from.r), BlochState::make(to.z, to.r)).solution;
    ASSERT_NEAR(s.alpha_tilde, (s.alpha + s.beta - 1) / s2, 1e-12);
    ASSERT_NEAR(s.beta_tilde, (s.alpha - s.beta) / s2, 1e-12);
    if (std::abs(s.lambda) > 1e-3 && std::abs(s.lambda) < 1 - 1e-3) {
      const double l2 = s.lambda * s.lambda;
      ASSERT_NEAR(2 / l2 * s.alpha_tilde * s.alpha_tilde + 2 / (1 - l2) * s.beta_tilde * s.beta_tilde, 1.0, 1e-9);
    }
    expect_case_conditions(s);
  }
}

TEST(SynthesisProperties, SoundnessWithPhases) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 10000; ++i) {
    const auto from = naive::random_state(rng);
    const auto to = state_in_region(rng, from);
    const auto res = synth_io(BlochState::make(from.z, from.r, from.theta), BlochState::make(to.z, to.r, to.theta));
    ASSERT_LE(output_gap(res.channel, from, to), 1e-10) << from.z << "," << from.r << " -> " << to.z << "," << to.r;
    ASSERT_LE(naive::completeness_residual(to_naive(res.channel)), 1e-12);
    const auto kind = classify(res.channel).kind;
    ASSERT_TRUE(kind == ClassKind::SIO || kind == ClassKind::PIO || kind == ClassKind::CPO);
  }
}

TEST(SynthesisProperties, OutsideTargetsRejected) {
  std::mt19937_64 rng(43);
  int tried = 0;
  while (tried < 2000) {
    const auto from = naive::random_state(rng);
    const auto to = naive::random_state(rng);
    if (naive::io_reachable(from.z, from.r, to.z, to.r, 1e-7)) continue;
    ++tried;
    const auto code = code_of([&] { synth_io(BlochState::make(from.z, from.r), BlochState::make(to.z, to.r)); });
    ASSERT_TRUE(code == ErrorCode::TargetUnreachable || code == ErrorCode::DegenerateSource);
  }
}

TEST(SynthesisProperties, BoundaryTargets) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 100; ++i) {
    const auto from = naive::random_state(rng);
    if (from.r < 1e-3) continue;
    for (const auto& p : io_region_boundary(Point{from.z, from.r}, 40)) {
      const auto res = synth_io(BlochState::make(from.z, from.r), BlochState::make(p.z, p.r));
      const naive::State to{p.z, std::abs(p.r), p.r < 0 ? kPi : 0.0};
      ASSERT_LE(output_gap(res.channel, {from.z, from.r, 0}, to), 1e-8);
    }
  }
}

TEST(IoToSio, PassThrough) {
  const KrausSet deph({mat(1, 0, 0, 0), mat(0, 0, 0, 1)});
  const auto res = io_to_sio(deph, BlochState::make(0.3, 0.5));
  EXPECT_FALSE(res.solution.converted);
  ASSERT_EQ(res.channel.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(res.channel[i], deph[i]);
  const auto out = apply(res.channel, BlochState::make(0.3, 0.5));
  EXPECT_NEAR(out.z, 0.3, 1e-15);
  EXPECT_EQ(out.r, 0.0);
}

TEST(IoToSio, RowMergingPair) {
  const double h = 1 / s2;
  const KrausSet ch({mat(h, h, 0, 0), mat(0, 0, h, -h)});
  for (double r : {0.0, 0.3, 0.8}) {
    const double z = 0.1;
    const auto res = io_to_sio(ch, BlochState::make(z, r));
    const auto& s = res.solution;
    EXPECT_TRUE(s.converted);
    EXPECT_NEAR(s.h1, 1 + r, 1e-15);
    EXPECT_NEAR(s.h2, 1 - r, 1e-15);
    EXPECT_NEAR(std::norm(s.a), (1 + r) / 2, 1e-12);
    EXPECT_NEAR(std::norm(s.b), (1 - r) / 2, 1e-12);
    EXPECT_NEAR(std::norm(s.c), (1 - r) / 2, 1e-12);
    EXPECT_NEAR(std::norm(s.d), (1 + r) / 2, 1e-12);
    const auto out = naive::plane(naive::apply(to_naive(res.channel), naive::rho(z, r, 0)));
    EXPECT_NEAR(out[0], r, 1e-12);
    EXPECT_NEAR(out[1], 0.0, 1e-12);
  }
}

TEST(IoToSio, Errors) {
  const double h = 1 / s2;
  EXPECT_EQ(code_of([&] { io_to_sio(KrausSet({mat(h, h, h, -h)}), BlochState::make(0, 1)); }), ErrorCode::NotIncoherent);
  EXPECT_EQ(code_of([&] { io_to_sio(KrausSet({mat(h, h, 0, 0)}), BlochState::make(0, 1)); }),
            ErrorCode::IncompleteChannel);
}

TEST(SynthesisProperties, IoToSioEquivalence) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> ph(0, 2 * kPi);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    // Every fifth channel is a single phased permutation.
    const KrausSet ch = i % 5 == 0 ? KrausSet({i % 2 ? mat(0, std::polar(1.0, ph(rng)), std::polar(1.0, ph(rng)), 0)
                                                     : mat(std::polar(1.0, ph(rng)), 0, 0, std::polar(1.0, ph(rng)))})
                                   : sample_random_io(derive_seed(45, i), 4);
    const auto st = naive::random_state(rng);
    const auto res = io_to_sio(ch, BlochState::make(st.z, st.r, st.theta));
    const naive::M rho = naive::rho(st.z, st.r, st.theta);
    ASSERT_LE(naive::max_abs_diff(naive::apply(to_naive(res.channel), rho), naive::apply(to_naive(ch), rho)), 1e-10);
    ASSERT_LE(naive::completeness_residual(to_naive(res.channel)), 1e-12);
    for (const auto& k : res.channel.operators()) ASSERT_TRUE(is_strictly_incoherent_operator(k));

    const auto& s = res.solution;
    ASSERT_LT(std::abs(s.a * std::conj(s.b) + std::conj(s.c) * s.d), 1e-12);
    if (!s.converted) continue;

    // Modulus relations from aggregates recomputed here; h1, h2 from branch traces.
    double S = 0, h1 = 0, h2 = 0;
    for (const auto& k : to_naive(ch)) {
      const bool top = std::abs(k[0]) > 1e-9 && std::abs(k[1]) > 1e-9;
      const bool bottom = std::abs(k[2]) > 1e-9 && std::abs(k[3]) > 1e-9;
      if (!top && !bottom) continue;
      const naive::M o = naive::mul(naive::mul(k, rho), naive::adj(k));
      (top ? h1 : h2) += 2 * (o[0] + o[3]).real();
      S += std::norm(top ? k[0] : k[2]);
    }
    ASSERT_NEAR(s.h1, h1, 1e-12);
    ASSERT_NEAR(s.h2, h2, 1e-12);
    const double a2 = std::norm(s.a), b2 = std::norm(s.b), c2 = std::norm(s.c), d2 = std::norm(s.d);
    for (double v : {a2, b2, c2, d2}) ASSERT_GE(v, -1e-12);
    ASSERT_NEAR(a2, S * h1 / (h1 + h2), 1e-12);
    ASSERT_NEAR(c2, S * h2 / (h1 + h2), 1e-12);
    if (st.z < 0.9) {
      const double scale = 1 / (1 - st.z);
      ASSERT_NEAR(b2, h2 * scale - (1 + st.z) * S * h2 * scale / (h1 + h2), 1e-12 * scale);
      ASSERT_NEAR(d2, h1 * scale - (1 + st.z) * S * h1 * scale / (h1 + h2), 1e-12 * scale);
    }
  }
}

TEST(SynthPio, FlipToNegativeCoherence) {
  const auto mix = synth_pio(BlochState::make(0.4, 0.5), BlochState::make(0.4, -0.5));
  ASSERT_EQ(mix.entries.size(), 1u);
  EXPECT_NEAR(mix.entries[0].weight, 1.0, 1e-12);
  EXPECT_EQ(mix.entries[0].family, PioFamily::K5);
  const auto out = naive::apply(to_naive(mixture_channel(mix)), naive::rho(0.4, 0.5, 0));
  EXPECT_LE(naive::max_abs_diff(out, naive::rho(0.4, 0.5, kPi)), 1e-12);
}

TEST(SynthPio, GroundStateVertex) {
  const auto mix = synth_pio(BlochState::make(0.4, 0.5), BlochState::make(1, 0));
  ASSERT_EQ(mix.entries.size(), 1u);
  EXPECT_EQ(mix.entries[0].family, PioFamily::K3);
  EXPECT_NEAR(mix.entries[0].weight, 1.0, 1e-12);
}

TEST(SynthPio, TopEdgeMidpoint) {
  const auto mix = synth_pio(BlochState::make(0.5, 0.6), BlochState::make(0, 0.6));
  ASSERT_EQ(mix.entries.size(), 2u);
  for (const auto& e : mix.entries) {
    EXPECT_NEAR(e.weight, 0.5, 1e-12);
    EXPECT_TRUE(e.family == PioFamily::K5 || e.family == PioFamily::K6);
  }
  EXPECT_NE(mix.entries[0].family, mix.entries[1].family);
}

TEST(SynthPio, Unreachable) {
  EXPECT_EQ(code_of([] { synth_pio(BlochState::make(0.5, 0.6), BlochState::make(0.9, 0.3)); }),
            ErrorCode::TargetUnreachable);
}

TEST(SynthesisProperties, PioMixtures) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> w(0, 1);
  for (int i = 0; i < 3000; ++i) {
    const auto from = naive::random_state(rng);
    const double fr = std::cos(from.theta) < 0 ? -from.r : from.r;
    const std::vector<std::array<double, 2>> c = {{from.z, fr}, {from.z, -fr}, {-from.z, fr}, {-from.z, -fr}, {1, 0}, {-1, 0}};
    double ws[6], tot = 0;
    for (double& x : ws) tot += (x = -std::log(w(rng) + 1e-300));
    double tz = 0, tr = 0;
    for (int k = 0; k < 6; ++k) {
      tz += ws[k] / tot * c[k][0];
      tr += ws[k] / tot * c[k][1];
    }
    const auto mix = synth_pio(BlochState::make(from.z, fr), BlochState::make(tz, tr));
    double sum = 0;
    int nonzero = 0;
    for (const auto& e : mix.entries) {
      ASSERT_GE(e.weight, 0.0);
      sum += e.weight;
      nonzero += e.weight > 0;
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
    ASSERT_LE(nonzero, 3);
    const auto out = naive::apply(to_naive(mixture_channel(mix)), naive::rho(from.z, fr, 0));
    ASSERT_LE(naive::max_abs_diff(out, naive::rho(tz, std::abs(tr), tr < 0 ? kPi : 0.0)), 1e-10);
  }
}

TEST(SynthPio, PhasedEndpoints) {
  const auto from = BlochState::make(0.3, 0.6, 1.0);
  const auto to = BlochState::make(-0.2, 0.3, 2.5);
  const auto ch = mixture_channel(synth_pio(from, to));
  EXPECT_LE(output_gap(ch, {0.3, 0.6, 1.0}, {-0.2, 0.3, 2.5}), 1e-10);
}

TEST(SynthCpo, Examples) {
  const auto from = BlochState::make(0.5, 0.3);
  auto k = synth_cpo(from, BlochState::make(0.5, -0.3));
  ASSERT_EQ(k.size(), 1u);
  EXPECT_LE((k[0] - mat(1, 0, 0, -1)).norm(), 1e-15);
  k = synth_cpo(from, BlochState::make(-0.5, 0.3));
  EXPECT_LE((k[0] - mat(0, 1, 1, 0)).norm(), 1e-15);
  k = synth_cpo(from, from);
  EXPECT_LE((k[0] - Mat2::Identity()).norm(), 1e-15);
  EXPECT_EQ(code_of([&] { synth_cpo(from, BlochState::make(0.3, 0.5)); }), ErrorCode::TargetUnreachable);
}

TEST(SynthCpo, OrbitWithPhases) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 500; ++i) {
    const auto from = naive::random_state(rng);
    const double zt = i % 2 ? from.z : -from.z;
    const naive::State to{zt, from.r, std::uniform_real_distribution<double>(0, 2 * kPi)(rng)};
    const auto k = synth_cpo(BlochState::make(from.z, from.r, from.theta), BlochState::make(to.z, to.r, to.theta));
    ASSERT_LE(output_gap(k, from, to), 1e-12);
    ASSERT_EQ(classify(k).kind, ClassKind::CPO);
  }
}
