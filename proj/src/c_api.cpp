#include "coherence_kit.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "core/channels.hpp"
#include "core/oracle.hpp"
#include "core/qubit.hpp"
#include "core/regions.hpp"
#include "core/synthesis.hpp"

namespace co = coherence;

struct ck_channel {
  co::KrausSet set;
};

struct ck_pio_mixture {
  co::PioMixture mix;
};

struct ck_cloud {
  std::vector<ck_point> points;
  co::SampleCloud cloud;
};

namespace {

thread_local std::string g_last_error;

ck_status to_status(co::ErrorCode code) {
  switch (code) {
    case co::ErrorCode::InvalidArgument: return CK_INVALID_ARGUMENT;
    case co::ErrorCode::InvalidState: return CK_INVALID_STATE;
    case co::ErrorCode::InvalidMatrix: return CK_INVALID_MATRIX;
    case co::ErrorCode::IncompleteChannel: return CK_INCOMPLETE_CHANNEL;
    case co::ErrorCode::NotIncoherent: return CK_NOT_INCOHERENT;
    case co::ErrorCode::NotDiagonalUnitary: return CK_NOT_DIAGONAL_UNITARY;
    case co::ErrorCode::TargetUnreachable: return CK_TARGET_UNREACHABLE;
    case co::ErrorCode::DegenerateSource: return CK_DEGENERATE_SOURCE;
    case co::ErrorCode::DegenerateRegion: return CK_DEGENERATE_REGION;
    case co::ErrorCode::UnsupportedClass: return CK_UNSUPPORTED_CLASS;
    case co::ErrorCode::SamplerExhausted: return CK_SAMPLER_EXHAUSTED;
    case co::ErrorCode::NonConvergence: return CK_NON_CONVERGENCE;
  }
  return CK_INTERNAL_ERROR;
}

ck_status fail(ck_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs body, translating exceptions into status codes at the boundary.
template <typename F>
ck_status guarded(F&& body) {
  try {
    body();
    return CK_OK;
  } catch (const co::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CK_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CK_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(CK_INTERNAL_ERROR, "unknown error");
  }
}

#define CK_REQUIRE(cond) \
  if (!(cond)) return fail(CK_INVALID_ARGUMENT, "invalid argument: " #cond)

co::Mat2 to_mat(const ck_matrix& m) {
  co::Mat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = {m.m[i][j].re, m.m[i][j].im};
  return out;
}

ck_matrix from_mat(const co::Mat2& m) {
  ck_matrix out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.m[i][j] = {m(i, j).real(), m(i, j).imag()};
  return out;
}

ck_complex from_complex(co::Complex c) { return {c.real(), c.imag()}; }

co::BlochState to_state(const ck_state& s) { return co::BlochState::make(s.z, s.r, s.theta); }
ck_state from_state(const co::BlochState& s) { return {s.z, s.r, s.theta}; }
co::Point to_point(const ck_point& p) { return {p.z, p.r}; }
ck_point from_point(const co::Point& p) { return {p.z, p.r}; }

co::ClassKind to_kind(ck_class k) {
  switch (k) {
    case CK_CLASS_NOT_TRACE_PRESERVING: return co::ClassKind::NotTracePreserving;
    case CK_CLASS_NOT_INCOHERENT: return co::ClassKind::NotIncoherent;
    case CK_CLASS_IO: return co::ClassKind::IO;
    case CK_CLASS_SIO: return co::ClassKind::SIO;
    case CK_CLASS_PIO: return co::ClassKind::PIO;
    case CK_CLASS_CPO: return co::ClassKind::CPO;
  }
  throw co::Error(co::ErrorCode::UnsupportedClass, "unknown class");
}

ck_class from_kind(co::ClassKind k) {
  switch (k) {
    case co::ClassKind::NotTracePreserving: return CK_CLASS_NOT_TRACE_PRESERVING;
    case co::ClassKind::NotIncoherent: return CK_CLASS_NOT_INCOHERENT;
    case co::ClassKind::IO: return CK_CLASS_IO;
    case co::ClassKind::SIO: return CK_CLASS_SIO;
    case co::ClassKind::PIO: return CK_CLASS_PIO;
    case co::ClassKind::CPO: return CK_CLASS_CPO;
  }
  return CK_CLASS_NOT_TRACE_PRESERVING;
}

ck_region_report from_report(const co::RegionReport& r) {
  ck_region_report out;
  out.verdict = r.verdict ? 1 : 0;
  out.margin = r.margin;
  out.binding = static_cast<ck_binding>(static_cast<int>(r.binding));
  out.edge_index = r.edge_index;
  return out;
}

ck_cloud_check from_check(const co::CloudCheck& c) {
  return {c.violations, c.monotonicity_violations, c.worst_margin, c.coverage};
}

ck_channel* new_channel(co::KrausSet set) { return new ck_channel{std::move(set)}; }

}  // namespace

extern "C" {

const char* ck_status_name(ck_status status) {
  switch (status) {
    case CK_OK: return "OK";
    case CK_INVALID_ARGUMENT: return "InvalidArgument";
    case CK_INVALID_STATE: return "InvalidState";
    case CK_INVALID_MATRIX: return "InvalidMatrix";
    case CK_INCOMPLETE_CHANNEL: return "IncompleteChannel";
    case CK_NOT_INCOHERENT: return "NotIncoherent";
    case CK_NOT_DIAGONAL_UNITARY: return "NotDiagonalUnitary";
    case CK_TARGET_UNREACHABLE: return "TargetUnreachable";
    case CK_DEGENERATE_SOURCE: return "DegenerateSource";
    case CK_DEGENERATE_REGION: return "DegenerateRegion";
    case CK_UNSUPPORTED_CLASS: return "UnsupportedClass";
    case CK_SAMPLER_EXHAUSTED: return "SamplerExhausted";
    case CK_NON_CONVERGENCE: return "NonConvergence";
    case CK_INTERNAL_ERROR: return "InternalError";
  }
  return "Unknown";
}

const char* ck_last_error(void) { return g_last_error.c_str(); }

const char* ck_class_name(ck_class kind) {
  try {
    return co::to_string(to_kind(kind));
  } catch (...) {
    return "Unknown";
  }
}

const char* ck_binding_name(ck_binding binding) {
  if (binding < CK_BINDING_ELLIPSE || binding > CK_BINDING_DEGENERATE) return "Unknown";
  return co::to_string(static_cast<co::BindingConstraint>(static_cast<int>(binding)));
}

const char* ck_pio_family_name(ck_pio_family family) {
  if (family < CK_K1 || family > CK_K6) return "Unknown";
  return co::to_string(static_cast<co::PioFamily>(static_cast<int>(family)));
}

ck_status ck_state_make(double z, double r, double theta, ck_state* out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = from_state(co::BlochState::make(z, r, theta)); });
}

ck_status ck_state_to_density(ck_state s, ck_matrix* out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = from_mat(co::bloch_to_density(to_state(s)).matrix()); });
}

ck_status ck_density_to_state(const ck_matrix* rho, ck_state* out) {
  CK_REQUIRE(rho && out);
  return guarded([&] { *out = from_state(co::density_to_bloch(co::DensityMatrix(to_mat(*rho)))); });
}

ck_status ck_state_l1_coherence(ck_state s, double* out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = co::l1_coherence(to_state(s)); });
}

ck_status ck_state_phase_reduce(ck_state s, ck_state* reduced, double phases[2]) {
  CK_REQUIRE(reduced && phases);
  return guarded([&] {
    const co::PhaseReduction pr = co::phase_reduce(to_state(s));
    *reduced = from_state(pr.reduced);
    phases[0] = pr.u.phase0;
    phases[1] = pr.u.phase1;
  });
}

ck_status ck_channel_create(const ck_matrix* ops, size_t count, ck_channel** out) {
  CK_REQUIRE(ops && count > 0 && out);
  return guarded([&] {
    std::vector<co::Mat2> mats;
    mats.reserve(count);
    for (size_t i = 0; i < count; ++i) mats.push_back(to_mat(ops[i]));
    *out = new_channel(co::KrausSet(std::move(mats)));
  });
}

void ck_channel_destroy(ck_channel* ch) { delete ch; }

size_t ck_channel_size(const ck_channel* ch) { return ch ? ch->set.size() : 0; }

ck_status ck_channel_operator(const ck_channel* ch, size_t index, ck_matrix* out) {
  CK_REQUIRE(ch && out && index < ch->set.size());
  *out = from_mat(ch->set[index]);
  return CK_OK;
}

ck_status ck_channel_completeness_residual(const ck_channel* ch, double* out) {
  CK_REQUIRE(ch && out);
  return guarded([&] { *out = ch->set.completeness_residual(); });
}

ck_status ck_channel_classify(const ck_channel* ch, ck_classification* out) {
  CK_REQUIRE(ch && out);
  return guarded([&] {
    const co::ChannelClass c = co::classify(ch->set);
    ck_classification res{};
    res.kind = from_kind(c.kind);
    for (auto f : c.pio_families) res.family_mask |= 1u << (static_cast<int>(f) - 1);
    res.completeness_residual = ch->set.completeness_residual();
    *out = res;
  });
}

ck_status ck_channel_apply(const ck_channel* ch, ck_state in, ck_state* out) {
  CK_REQUIRE(ch && out);
  return guarded([&] { *out = from_state(co::apply(ch->set, to_state(in))); });
}

ck_status ck_channel_apply_density(const ck_channel* ch, const ck_matrix* rho, ck_matrix* out) {
  CK_REQUIRE(ch && rho && out);
  return guarded([&] { *out = from_mat(co::apply(ch->set, co::DensityMatrix(to_mat(*rho))).matrix()); });
}

ck_status ck_channel_conjugate(const ck_channel* ch, const double u1_phases[2], const double u2_phases[2],
                               ck_channel** out) {
  CK_REQUIRE(ch && u1_phases && u2_phases && out);
  return guarded([&] {
    const co::DephasingPair pair{{u1_phases[0], u1_phases[1]}, {u2_phases[0], u2_phases[1]}};
    *out = new_channel(co::conjugate_channel(ch->set, pair));
  });
}

ck_status ck_region_contains(ck_class kind, ck_point from, ck_point to, ck_region_report* out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = from_report(co::region_contains(to_kind(kind), to_point(from), to_point(to))); });
}

ck_status ck_region_boundary(ck_class kind, ck_point from, size_t n, ck_point* out, size_t* written) {
  CK_REQUIRE(out && written);
  return guarded([&] {
    std::vector<co::Point> pts;
    switch (to_kind(kind)) {
      case co::ClassKind::IO:
      case co::ClassKind::SIO: pts = co::io_region_boundary(to_point(from), n); break;
      case co::ClassKind::PIO: pts = co::pio_region_boundary(to_point(from), n); break;
      case co::ClassKind::CPO: pts = co::cpo_orbit(to_point(from)); break;
      default: throw co::Error(co::ErrorCode::UnsupportedClass, "no transformation region for this class");
    }
    if (pts.size() > n) throw co::Error(co::ErrorCode::InvalidArgument, "output buffer too small");
    std::transform(pts.begin(), pts.end(), out, from_point);
    *written = pts.size();
  });
}

ck_status ck_pio_hexagon(ck_point from, ck_point out[6], size_t* count) {
  CK_REQUIRE(out && count);
  return guarded([&] {
    const auto hex = co::pio_region_vertices(to_point(from));
    for (size_t i = 0; i < hex.vertices.size(); ++i) out[i] = from_point(hex.vertices[i].p);
    *count = hex.vertices.size();
  });
}

ck_status ck_cpo_orbit(ck_point from, ck_point out[4], size_t* count) {
  CK_REQUIRE(out && count);
  return guarded([&] {
    const auto orbit = co::cpo_orbit(to_point(from));
    std::transform(orbit.begin(), orbit.end(), out, from_point);
    *count = orbit.size();
  });
}

ck_status ck_synth_io(ck_state from, ck_state to, ck_channel** out, ck_synthesis_solution* solution) {
  CK_REQUIRE(out);
  return guarded([&] {
    co::IoSynthesis res = co::synth_io(to_state(from), to_state(to));
    if (solution) {
      const auto& s = res.solution;
      *solution = {s.alpha, s.beta, s.lambda, s.theta_param, s.phi, s.case_index, s.alpha_tilde, s.beta_tilde};
    }
    *out = new_channel(std::move(res.channel));
  });
}

ck_status ck_synth_cpo(ck_state from, ck_state to, ck_channel** out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = new_channel(co::synth_cpo(to_state(from), to_state(to))); });
}

ck_status ck_synth_pio(ck_state from, ck_state to, ck_pio_mixture** out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = new ck_pio_mixture{co::synth_pio(to_state(from), to_state(to))}; });
}

ck_status ck_io_to_sio(const ck_channel* ch, ck_state state, ck_channel** out, ck_sio_solution* solution) {
  CK_REQUIRE(ch && out);
  return guarded([&] {
    co::SioConversion res = co::io_to_sio(ch->set, to_state(state));
    if (solution) {
      const auto& s = res.solution;
      *solution = {from_complex(s.a), from_complex(s.b), from_complex(s.c), from_complex(s.d),
                   s.h1, s.h2, s.a_sq, s.b_sq, s.c_sq, s.d_sq, s.converted ? 1 : 0};
    }
    *out = new_channel(std::move(res.channel));
  });
}

ck_status ck_pio_mixture_create(const ck_pio_entry* entries, size_t count, ck_pio_mixture** out) {
  CK_REQUIRE(entries && count > 0 && out);
  return guarded([&] {
    co::PioMixture mix;
    double total = 0.0;
    for (size_t i = 0; i < count; ++i) {
      const auto& e = entries[i];
      if (e.family < CK_K1 || e.family > CK_K6 || !(e.weight >= 0.0)) {
        throw co::Error(co::ErrorCode::InvalidArgument, "mixture entry needs a family K1..K6 and weight >= 0");
      }
      mix.entries.push_back({e.weight, static_cast<co::PioFamily>(static_cast<int>(e.family)), {e.phases[0], e.phases[1]}});
      total += e.weight;
    }
    if (std::abs(total - 1.0) > co::kTol) {
      throw co::Error(co::ErrorCode::InvalidArgument, "mixture weights must sum to 1");
    }
    *out = new ck_pio_mixture{std::move(mix)};
  });
}

void ck_pio_mixture_destroy(ck_pio_mixture* mix) { delete mix; }

size_t ck_pio_mixture_size(const ck_pio_mixture* mix) { return mix ? mix->mix.entries.size() : 0; }

ck_status ck_pio_mixture_entry(const ck_pio_mixture* mix, size_t index, ck_pio_entry* out) {
  CK_REQUIRE(mix && out && index < mix->mix.entries.size());
  const auto& e = mix->mix.entries[index];
  *out = {e.weight, static_cast<ck_pio_family>(static_cast<int>(e.family)), {e.phases[0], e.phases[1]}};
  return CK_OK;
}

ck_status ck_pio_mixture_channel(const ck_pio_mixture* mix, ck_channel** out) {
  CK_REQUIRE(mix && out);
  return guarded([&] { *out = new_channel(co::mixture_channel(mix->mix)); });
}

ck_status ck_sample_random_io(uint64_t seed, unsigned max_kraus, ck_channel** out) {
  CK_REQUIRE(out);
  return guarded([&] { *out = new_channel(co::sample_random_io(seed, max_kraus)); });
}

ck_status ck_cloud_sample(ck_state from, size_t n, uint64_t seed, unsigned max_kraus, ck_cloud** out) {
  CK_REQUIRE(out);
  return guarded([&] {
    auto* c = new ck_cloud{{}, co::reachable_cloud(to_state(from), n, seed, max_kraus)};
    c->points.reserve(c->cloud.points.size());
    for (const auto& p : c->cloud.points) c->points.push_back(from_point(p));
    *out = c;
  });
}

void ck_cloud_destroy(ck_cloud* cloud) { delete cloud; }

size_t ck_cloud_size(const ck_cloud* cloud) { return cloud ? cloud->points.size() : 0; }

const ck_point* ck_cloud_points(const ck_cloud* cloud) { return cloud ? cloud->points.data() : nullptr; }

ck_status ck_cloud_audit(const ck_cloud* cloud, ck_cloud_check* out) {
  CK_REQUIRE(cloud && out);
  return guarded([&] { *out = from_check(co::check_cloud(cloud->cloud)); });
}

ck_status ck_verify_region_by_sampling(ck_state from, size_t n, uint64_t seed, unsigned max_kraus,
                                       ck_region_verification* out) {
  CK_REQUIRE(out);
  return guarded([&] {
    const auto v = co::verify_region_by_sampling(to_state(from), n, seed, max_kraus);
    *out = {from_check(v.cloud), v.pio_samples, v.pio_violations, v.pio_monotonicity_violations};
  });
}

ck_status ck_certify_extremum(double z, double z_target, unsigned restarts, uint64_t seed,
                              ck_extremum_certificate* out) {
  CK_REQUIRE(out);
  return guarded([&] {
    const auto c = co::certify_extremum(z, z_target, restarts, seed);
    ck_extremum_certificate res{};
    res.z = c.z;
    res.z_target = c.z_target;
    res.g_opt_analytic = c.g_opt_analytic;
    res.g_opt_bound = c.g_opt_bound;
    res.g_opt_numeric = c.g_opt_numeric;
    res.kappa = c.kappa;
    res.stationarity = c.stationarity;
    res.converged_restarts = c.converged_restarts;
    if (c.lagrange_multipliers) {
      res.has_multipliers = 1;
      std::copy(c.lagrange_multipliers->begin(), c.lagrange_multipliers->end(), res.lagrange_multipliers);
      res.kappa_numeric = c.kappa_numeric.value_or(0.0);
    }
    *out = res;
  });
}

}  // extern "C"
