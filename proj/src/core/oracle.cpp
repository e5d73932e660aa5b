#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_map>

namespace coherence {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Complex complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ull));
}

KrausSet sample_random_io(std::uint64_t seed, unsigned max_kraus) {
  if (max_kraus < 2) throw Error(ErrorCode::InvalidArgument, "max_kraus must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> count_dist(2, max_kraus);
  std::bernoulli_distribution coin(0.5);

  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const unsigned n = count_dist(rng);
    const bool strict = coin(rng);
    // Column i of operator k lands in row target[k][i].
    std::vector<std::array<int, 2>> target(n);
    for (auto& t : target) {
      if (strict) {
        const bool swap = coin(rng);
        t = {swap ? 1 : 0, swap ? 0 : 1};
      } else {
        t = {coin(rng) ? 1 : 0, coin(rng) ? 1 : 0};
      }
    }
    std::vector<Complex> u(n), v(n);
    for (unsigned k = 0; k < n; ++k) {
      u[k] = complex_normal(rng);
      v[k] = complex_normal(rng);
    }

    // Column 0 of sum K^dag K is |u|^2, column 1 is |v|^2, and the cross
    // term collects conj(u_k) v_k over operators whose columns share a row.
    // Normalize u, Gram-Schmidt v against u on those operators, normalize v.
    double u_norm = 0.0;
    for (const auto& x : u) u_norm += std::norm(x);
    if (u_norm < 1e-12) continue;
    for (auto& x : u) x /= std::sqrt(u_norm);

    Complex overlap = 0.0;
    double shared_norm = 0.0;
    for (unsigned k = 0; k < n; ++k) {
      if (target[k][0] == target[k][1]) {
        overlap += std::conj(u[k]) * v[k];
        shared_norm += std::norm(u[k]);
      }
    }
    if (shared_norm > 0.0) {
      for (unsigned k = 0; k < n; ++k) {
        if (target[k][0] == target[k][1]) v[k] -= overlap / shared_norm * u[k];
      }
    }
    double v_norm = 0.0;
    for (const auto& x : v) v_norm += std::norm(x);
    if (v_norm < 1e-12) continue;
    for (auto& x : v) x /= std::sqrt(v_norm);

    std::vector<Mat2> ops(n, Mat2::Zero());
    for (unsigned k = 0; k < n; ++k) {
      ops[k](target[k][0], 0) = u[k];
      ops[k](target[k][1], 1) = v[k];
    }
    KrausSet ch(std::move(ops));
    if (ch.completeness_residual() <= 1e-12) return ch;
  }
  throw Error(ErrorCode::SamplerExhausted, "no complete incoherent channel after 10^4 draws");
}

PioMixture sample_random_pio(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(1, 6);
  std::uniform_int_distribution<int> family_dist(1, 6);
  std::exponential_distribution<double> weight_dist(1.0);
  std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);

  PioMixture mix;
  const int n = count_dist(rng);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    PioMixtureEntry e;
    e.family = static_cast<PioFamily>(family_dist(rng));
    e.weight = weight_dist(rng);
    const double p0 = phase_dist(rng);
    const double p1 = phase_dist(rng);
    e.phases = {p0, p1};
    total += e.weight;
    mix.entries.push_back(e);
  }
  for (auto& e : mix.entries) e.weight /= total;
  return mix;
}

SampleCloud reachable_cloud(const BlochState& from, std::size_t n, std::uint64_t seed, unsigned max_kraus) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cloud needs at least one sample");
  const DensityMatrix rho = bloch_to_density(from);
  SampleCloud cloud;
  cloud.source = from;
  cloud.seed = seed;
  cloud.max_kraus = max_kraus;
  cloud.channel_count = n;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const KrausSet ch = sample_random_io(derive_seed(seed, i), max_kraus);
    const BlochState out = density_to_bloch(apply(ch, rho));
    cloud.points.push_back({out.z, out.r});
  }
  return cloud;
}

CloudCheck check_cloud(const SampleCloud& cloud) {
  constexpr double kSpacing = 0.02;
  const Point src = plane_point(cloud.source);
  CloudCheck check;

  auto cell_key = [](long i, long j) { return (i << 32) ^ (j & 0xffffffffL); };
  std::unordered_map<long, std::vector<Point>> cells;
  for (const auto& p : cloud.points) {
    const RegionReport rep = io_region_contains(src, p);
    check.worst_margin = std::min(check.worst_margin, rep.margin);
    if (!rep.verdict) ++check.violations;
    if (std::abs(p.r) > std::abs(src.r) + kTol) ++check.monotonicity_violations;
    const long i = std::lround(std::floor((p.z + 1.0) / kSpacing));
    const long j = std::lround(std::floor(std::abs(p.r) / kSpacing));
    cells[cell_key(i, j)].push_back({p.z, std::abs(p.r)});
  }

  std::size_t inside = 0, covered = 0;
  const int nz = static_cast<int>(std::lround(2.0 / kSpacing));
  const int nr = static_cast<int>(std::lround(1.0 / kSpacing));
  for (int gi = 0; gi <= nz; ++gi) {
    for (int gj = 0; gj <= nr; ++gj) {
      const Point g{-1.0 + gi * kSpacing, gj * kSpacing};
      if (g.z * g.z + g.r * g.r > 1.0 + kTol) continue;
      if (!io_region_contains(src, g).verdict) continue;
      ++inside;
      const long ci = std::lround(std::floor((g.z + 1.0) / kSpacing));
      const long cj = std::lround(std::floor(g.r / kSpacing));
      bool hit = false;
      for (long di = -1; di <= 1 && !hit; ++di) {
        for (long dj = -1; dj <= 1 && !hit; ++dj) {
          const auto it = cells.find(cell_key(ci + di, cj + dj));
          if (it == cells.end()) continue;
          for (const auto& p : it->second) {
            if (std::hypot(p.z - g.z, p.r - g.r) <= kSpacing) {
              hit = true;
              break;
            }
          }
        }
      }
      covered += hit;
    }
  }
  check.coverage = inside == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(inside);
  return check;
}

RegionVerification verify_region_by_sampling(const BlochState& from, std::size_t n, std::uint64_t seed,
                                             unsigned max_kraus) {
  RegionVerification out;
  out.cloud = check_cloud(reachable_cloud(from, n, seed, max_kraus));

  const DensityMatrix rho = bloch_to_density(from);
  const Point src = plane_point(from);
  const std::uint64_t pio_seed = splitmix64(seed ^ 0x50494F0050494F00ull);
  for (std::size_t i = 0; i < n; ++i) {
    const KrausSet ch = mixture_channel(sample_random_pio(derive_seed(pio_seed, i)));
    const BlochState s = density_to_bloch(apply(ch, rho));
    ++out.pio_samples;
    if (!pio_region_contains(src, {s.z, s.r}).verdict) ++out.pio_violations;
    if (s.r > std::abs(src.r) + kTol) ++out.pio_monotonicity_violations;
  }
  return out;
}

namespace {

using Vec2 = std::array<double, 2>;

double dot(const Vec2& x, const Vec2& y) { return x[0] * y[0] + x[1] * y[1]; }

Vec2 unit(const Vec2& x) {
  const double n = std::hypot(x[0], x[1]);
  return {x[0] / n, x[1] / n};
}

// Blocks: |a_i| = sqrt(p) a_i, |c_j| = sqrt(1-p) c_j, |b_i| = sqrt(1-q) b_i,
// |d_j| = sqrt(q) d_j with unit a, b, c, d. Both completeness sums hold by
// construction and the population constraint fixes q as an affine function
// of p, so the feasible set is four circles times an interval.
struct Iterate {
  Vec2 a, b, c, d;
  double p = 0.0;
};

struct Problem {
  double z, zt, lo, hi;

  double q(double p) const { return (1.0 + zt - (1.0 + z) * p) / (1.0 - z); }
  double dq() const { return -(1.0 + z) / (1.0 - z); }

  double value(const Iterate& x) const {
    const double qq = q(x.p);
    return std::sqrt(std::max(0.0, x.p * (1.0 - qq))) * dot(x.a, x.b) +
           std::sqrt(std::max(0.0, qq * (1.0 - x.p))) * dot(x.c, x.d);
  }

  // Projected (Riemannian on the circles, clipped on the interval) gradient.
  Iterate gradient(const Iterate& x) const {
    const double qq = q(x.p);
    const double f1 = std::sqrt(std::max(0.0, x.p * (1.0 - qq)));
    const double f2 = std::sqrt(std::max(0.0, qq * (1.0 - x.p)));
    const double ab = dot(x.a, x.b);
    const double cd = dot(x.c, x.d);
    Iterate g;
    for (int i = 0; i < 2; ++i) {
      g.a[i] = f1 * (x.b[i] - ab * x.a[i]);
      g.b[i] = f1 * (x.a[i] - ab * x.b[i]);
      g.c[i] = f2 * (x.d[i] - cd * x.c[i]);
      g.d[i] = f2 * (x.c[i] - cd * x.d[i]);
    }
    const double df1 = f1 > 1e-300 ? ((1.0 - qq) - x.p * dq()) / (2.0 * f1) : 0.0;
    const double df2 = f2 > 1e-300 ? (dq() * (1.0 - x.p) - qq) / (2.0 * f2) : 0.0;
    g.p = ab * df1 + cd * df2;
    if ((x.p <= lo && g.p < 0) || (x.p >= hi && g.p > 0)) g.p = 0.0;
    return g;
  }

  static double norm(const Iterate& g) {
    return std::sqrt(dot(g.a, g.a) + dot(g.b, g.b) + dot(g.c, g.c) + dot(g.d, g.d) + g.p * g.p);
  }

  Iterate step(const Iterate& x, const Iterate& g, double t) const {
    Iterate y;
    for (int i = 0; i < 2; ++i) {
      y.a[i] = x.a[i] + t * g.a[i];
      y.b[i] = x.b[i] + t * g.b[i];
      y.c[i] = x.c[i] + t * g.c[i];
      y.d[i] = x.d[i] + t * g.d[i];
    }
    y.a = unit(y.a);
    y.b = unit(y.b);
    y.c = unit(y.c);
    y.d = unit(y.d);
    y.p = std::clamp(x.p + t * g.p, lo, hi);
    return y;
  }
};

struct AscentResult {
  Iterate x;
  double value;
  double stationarity;
};

AscentResult ascend(const Problem& prob, Iterate x) {
  constexpr double kStationarity = 1e-10;
  constexpr int kMaxIter = 200000;
  double f = prob.value(x);
  Iterate g = prob.gradient(x);
  double gn = Problem::norm(g);
  double t = 1e-2;
  for (int it = 0; it < kMaxIter && gn > kStationarity; ++it) {
    bool accepted = false;
    while (t > 1e-18) {
      const Iterate y = prob.step(x, g, t);
      const double fy = prob.value(y);
      const Iterate gy = prob.gradient(y);
      const double gyn = Problem::norm(gy);
      // Sufficient increase, or (once f is flat to rounding) a smaller gradient.
      const bool increase = fy >= f + 1e-4 * t * gn * gn;
      const bool flat = std::abs(fy - f) <= 8.0 * std::numeric_limits<double>::epsilon() && gyn < gn;
      if (increase || flat) {
        x = y;
        f = fy;
        g = gy;
        gn = gyn;
        t *= 2.0;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return {x, f, gn};
}

}  // namespace

ExtremumCertificate certify_extremum(double z, double z_target, unsigned restarts, std::uint64_t seed) {
  if (!(std::abs(z) < 1.0) || !(std::abs(z_target) < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "certify_extremum needs |z| < 1 and |z'| < 1");
  }
  if (restarts == 0) throw Error(ErrorCode::InvalidArgument, "need at least one restart");

  ExtremumCertificate cert;
  cert.z = z;
  cert.z_target = z_target;
  cert.g_opt_analytic = std::sqrt((1.0 - z_target * z_target) / (1.0 - z * z));
  cert.g_opt_bound = std::min(1.0, cert.g_opt_analytic);
  cert.kappa = (1.0 + z_target) / ((1.0 - z * z) * (1.0 - z_target));

  constexpr double kEdge = 1e-12;
  Problem prob{z, z_target, 0.0, 0.0};
  prob.lo = std::max(0.0, (z + z_target) / (1.0 + z)) + kEdge;
  prob.hi = std::min(1.0, (1.0 + z_target) / (1.0 + z)) - kEdge;
  if (prob.lo > prob.hi) prob.lo = prob.hi = 0.5 * (prob.lo + prob.hi);

  std::optional<AscentResult> best;
  double best_stationarity = std::numeric_limits<double>::infinity();
  for (unsigned k = 0; k < restarts; ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    auto circle = [&] {
      const double t = angle(rng);
      return Vec2{std::cos(t), std::sin(t)};
    };
    Iterate x0;
    x0.a = circle();
    x0.b = circle();
    x0.c = circle();
    x0.d = circle();
    x0.p = prob.lo + frac(rng) * (prob.hi - prob.lo);

    const AscentResult res = ascend(prob, x0);
    best_stationarity = std::min(best_stationarity, res.stationarity);
    if (res.stationarity > 1e-8) continue;
    ++cert.converged_restarts;
    if (!best || res.value > best->value) best = res;
  }
  if (!best) {
    throw Error(ErrorCode::NonConvergence, "no restart reached first-order stationarity 1e-8");
  }
  cert.g_opt_numeric = best->value;
  cert.stationarity = best->stationarity;

  if (cert.g_opt_analytic < 1.0 - 1e-9) {
    const double p = best->x.p;
    const double q = prob.q(p);
    if (p > 1e-12 && q > 1e-12 && 1.0 - p > 1e-12 && 1.0 - q > 1e-12) {
      const double l3 = -std::sqrt(p) / (2.0 * std::sqrt(1.0 - q));
      const double l2 = -std::sqrt(q) / (2.0 * std::sqrt(1.0 - p));
      const double l1 = (-std::sqrt(1.0 - q) / (2.0 * std::sqrt(p)) - l2) / (1.0 + z);
      cert.lagrange_multipliers = std::array<double, 3>{l1, l2, l3};
      cert.kappa_numeric = 4.0 * l3 * l3 / ((1.0 - z) * (1.0 - z));
    }
  }
  return cert;
}

}  // namespace coherence
