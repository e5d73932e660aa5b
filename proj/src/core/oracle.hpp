#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/channels.hpp"
#include "core/qubit.hpp"
#include "core/regions.hpp"
#include "core/synthesis.hpp"

namespace coherence {

// Brute-force cross-checks that share nothing with the closed-form region
// code except the predicate being audited.

// Seed of the i-th independent draw derived from a run seed. Streams depend
// only on (seed, i), so any partition of the work reproduces the same output.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Random complete incoherent channel with 2..max_kraus operators. Half of the
// draws use strictly incoherent patterns. Throws SamplerExhausted,
// InvalidArgument.
KrausSet sample_random_io(std::uint64_t seed, unsigned max_kraus);

// Random convex mixture of the six PIO families with random phases.
PioMixture sample_random_pio(std::uint64_t seed);

struct SampleCloud {
  BlochState source;
  std::vector<Point> points;  // outputs as (z, |r|)
  std::uint64_t seed = 0;
  std::size_t channel_count = 0;
  unsigned max_kraus = 0;
};

SampleCloud reachable_cloud(const BlochState& from, std::size_t n, std::uint64_t seed, unsigned max_kraus);

struct CloudCheck {
  std::size_t violations = 0;               // outside the IO region beyond tol
  std::size_t monotonicity_violations = 0;  // |r'| > |r| + tol
  double worst_margin = 0.0;                // most negative region margin seen
  double coverage = 0.0;
};

// Coverage: fraction of the 0.02-spaced (z, r >= 0) grid points inside the IO
// region that have a cloud point within distance 0.02.
CloudCheck check_cloud(const SampleCloud& cloud);

struct RegionVerification {
  CloudCheck cloud;
  std::size_t pio_samples = 0;
  std::size_t pio_violations = 0;
  std::size_t pio_monotonicity_violations = 0;
};

// IO cloud audit plus the same number of sampled PIO mixtures checked
// against the hexagon.
RegionVerification verify_region_by_sampling(const BlochState& from, std::size_t n, std::uint64_t seed,
                                             unsigned max_kraus = 4);

struct ExtremumCertificate {
  double z = 0.0;
  double z_target = 0.0;
  double g_opt_analytic = 0.0;  // sqrt((1 - z'^2) / (1 - z^2)), uncapped
  double g_opt_bound = 0.0;     // min(1, g_opt_analytic)
  double g_opt_numeric = 0.0;
  double kappa = 0.0;           // (1 + z') / ((1 - z^2)(1 - z'))
  double stationarity = 0.0;    // projected-gradient norm at the best point
  unsigned converged_restarts = 0;
  // Reported only below the cap, where the stationary point is interior.
  std::optional<std::array<double, 3>> lagrange_multipliers;
  std::optional<double> kappa_numeric;
};

// Maximizes |g| = sum |a_i||b_i| + sum |d_j||c_j| over two diagonal and two
// anti-diagonal Kraus blocks by multi-start projected gradient ascent.
// Throws InvalidArgument for |z| >= 1, NonConvergence.
ExtremumCertificate certify_extremum(double z, double z_target, unsigned restarts = 32, std::uint64_t seed = 1);

}  // namespace coherence
