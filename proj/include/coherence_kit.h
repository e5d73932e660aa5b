/*
 * coherence_kit.h - C interface to the single-qubit coherence transformation
 * library.
 *
 * Every function returns a ck_status. On failure, ck_last_error() returns a
 * human-readable message for the calling thread; out-parameters are left
 * untouched. Handles (ck_channel, ck_pio_mixture, ck_cloud) are owned by the
 * caller and released with the matching *_destroy function; destroy accepts
 * NULL.
 *
 * States are cylindrical Bloch coordinates
 *
 *     rho = 1/2 [[1 + z, r e^{-i theta}], [r e^{i theta}, 1 - z]]
 *
 * Matrices are row-major: m[row][col].
 */
#ifndef COHERENCE_KIT_H_
#define COHERENCE_KIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CK_BUILDING_LIBRARY)
#define CK_API __attribute__((visibility("default")))
#else
#define CK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ck_status {
  CK_OK = 0,
  CK_INVALID_ARGUMENT,
  CK_INVALID_STATE,
  CK_INVALID_MATRIX,
  CK_INCOMPLETE_CHANNEL,
  CK_NOT_INCOHERENT,
  CK_NOT_DIAGONAL_UNITARY,
  CK_TARGET_UNREACHABLE,
  CK_DEGENERATE_SOURCE,
  CK_DEGENERATE_REGION,
  CK_UNSUPPORTED_CLASS,
  CK_SAMPLER_EXHAUSTED,
  CK_NON_CONVERGENCE,
  CK_INTERNAL_ERROR
} ck_status;

typedef enum ck_class {
  CK_CLASS_NOT_TRACE_PRESERVING = 0,
  CK_CLASS_NOT_INCOHERENT,
  CK_CLASS_IO,
  CK_CLASS_SIO,
  CK_CLASS_PIO,
  CK_CLASS_CPO
} ck_class;

typedef enum ck_pio_family { CK_K1 = 1, CK_K2, CK_K3, CK_K4, CK_K5, CK_K6 } ck_pio_family;

typedef enum ck_binding {
  CK_BINDING_ELLIPSE = 0,
  CK_BINDING_COHERENCE_BOUND,
  CK_BINDING_HEXAGON_EDGE,
  CK_BINDING_ORBIT_POINT,
  CK_BINDING_DEGENERATE
} ck_binding;

typedef struct ck_state {
  double z;
  double r;
  double theta;
} ck_state;

typedef struct ck_point {
  double z;
  double r;
} ck_point;

typedef struct ck_complex {
  double re;
  double im;
} ck_complex;

typedef struct ck_matrix {
  ck_complex m[2][2];
} ck_matrix;

typedef struct ck_region_report {
  int verdict;
  double margin; /* positive strictly inside; only the sign is contractual */
  ck_binding binding;
  int edge_index; /* hexagon edge for CK_BINDING_HEXAGON_EDGE, else -1 */
} ck_region_report;

typedef struct ck_classification {
  ck_class kind;
  unsigned family_mask; /* bit (k - 1) set when family Kk is present */
  double completeness_residual;
} ck_classification;

/* Two-operator IO K0 = diag(c00, c11), K1 = [[0, c01], [c10, 0]]. */
typedef struct ck_synthesis_solution {
  double alpha;
  double beta;
  double lambda;
  double theta_param;
  double phi;
  int case_index;
  double alpha_tilde;
  double beta_tilde;
} ck_synthesis_solution;

/* K0 = diag(a, b), K1 = [[0, d], [c, 0]] in the phase-reduced frame. */
typedef struct ck_sio_solution {
  ck_complex a, b, c, d;
  double h1, h2;
  double a_sq, b_sq, c_sq, d_sq;
  int converted;
} ck_sio_solution;

typedef struct ck_pio_entry {
  double weight;
  ck_pio_family family;
  double phases[2];
} ck_pio_entry;

typedef struct ck_cloud_check {
  size_t violations;
  size_t monotonicity_violations;
  double worst_margin;
  double coverage;
} ck_cloud_check;

typedef struct ck_region_verification {
  ck_cloud_check cloud;
  size_t pio_samples;
  size_t pio_violations;
  size_t pio_monotonicity_violations;
} ck_region_verification;

typedef struct ck_extremum_certificate {
  double z;
  double z_target;
  double g_opt_analytic;
  double g_opt_bound;
  double g_opt_numeric;
  double kappa;
  double stationarity;
  unsigned converged_restarts;
  int has_multipliers;
  double lagrange_multipliers[3];
  double kappa_numeric;
} ck_extremum_certificate;

typedef struct ck_channel ck_channel;
typedef struct ck_pio_mixture ck_pio_mixture;
typedef struct ck_cloud ck_cloud;

CK_API const char* ck_status_name(ck_status status);
CK_API const char* ck_last_error(void);
CK_API const char* ck_class_name(ck_class kind);
CK_API const char* ck_binding_name(ck_binding binding);
CK_API const char* ck_pio_family_name(ck_pio_family family);

/* States */
CK_API ck_status ck_state_make(double z, double r, double theta, ck_state* out);
CK_API ck_status ck_state_to_density(ck_state s, ck_matrix* out);
CK_API ck_status ck_density_to_state(const ck_matrix* rho, ck_state* out);
CK_API ck_status ck_state_l1_coherence(ck_state s, double* out);
/* reduced = (z, r, 0); rho = U reduced U^dag with U = diag(e^{i p0}, e^{i p1}). */
CK_API ck_status ck_state_phase_reduce(ck_state s, ck_state* reduced, double phases[2]);

/* Channels */
CK_API ck_status ck_channel_create(const ck_matrix* ops, size_t count, ck_channel** out);
CK_API void ck_channel_destroy(ck_channel* ch);
CK_API size_t ck_channel_size(const ck_channel* ch);
CK_API ck_status ck_channel_operator(const ck_channel* ch, size_t index, ck_matrix* out);
CK_API ck_status ck_channel_completeness_residual(const ck_channel* ch, double* out);
CK_API ck_status ck_channel_classify(const ck_channel* ch, ck_classification* out);
CK_API ck_status ck_channel_apply(const ck_channel* ch, ck_state in, ck_state* out);
CK_API ck_status ck_channel_apply_density(const ck_channel* ch, const ck_matrix* rho, ck_matrix* out);
/* {U2^dag K U1} with U = diag(e^{i phases[0]}, e^{i phases[1]}). */
CK_API ck_status ck_channel_conjugate(const ck_channel* ch, const double u1_phases[2], const double u2_phases[2],
                                      ck_channel** out);

/* Regions; kind must be IO, SIO, PIO or CPO. */
CK_API ck_status ck_region_contains(ck_class kind, ck_point from, ck_point to, ck_region_report* out);
/* IO/SIO: n points on the region boundary; PIO: n points along the hexagon
 * perimeter; CPO: the orbit (at most 4 points). out must hold n points. */
CK_API ck_status ck_region_boundary(ck_class kind, ck_point from, size_t n, ck_point* out, size_t* written);
CK_API ck_status ck_pio_hexagon(ck_point from, ck_point out[6], size_t* count);
CK_API ck_status ck_cpo_orbit(ck_point from, ck_point out[4], size_t* count);

/* Synthesis */
CK_API ck_status ck_synth_io(ck_state from, ck_state to, ck_channel** out, ck_synthesis_solution* solution);
CK_API ck_status ck_synth_cpo(ck_state from, ck_state to, ck_channel** out);
CK_API ck_status ck_synth_pio(ck_state from, ck_state to, ck_pio_mixture** out);
CK_API ck_status ck_io_to_sio(const ck_channel* ch, ck_state state, ck_channel** out, ck_sio_solution* solution);

/* Weights must be nonnegative and sum to 1 within 1e-9. */
CK_API ck_status ck_pio_mixture_create(const ck_pio_entry* entries, size_t count, ck_pio_mixture** out);
CK_API void ck_pio_mixture_destroy(ck_pio_mixture* mix);
CK_API size_t ck_pio_mixture_size(const ck_pio_mixture* mix);
CK_API ck_status ck_pio_mixture_entry(const ck_pio_mixture* mix, size_t index, ck_pio_entry* out);
CK_API ck_status ck_pio_mixture_channel(const ck_pio_mixture* mix, ck_channel** out);

/* Sampling oracles */
CK_API ck_status ck_sample_random_io(uint64_t seed, unsigned max_kraus, ck_channel** out);
CK_API ck_status ck_cloud_sample(ck_state from, size_t n, uint64_t seed, unsigned max_kraus, ck_cloud** out);
CK_API void ck_cloud_destroy(ck_cloud* cloud);
CK_API size_t ck_cloud_size(const ck_cloud* cloud);
CK_API const ck_point* ck_cloud_points(const ck_cloud* cloud);
CK_API ck_status ck_cloud_audit(const ck_cloud* cloud, ck_cloud_check* out);
CK_API ck_status ck_verify_region_by_sampling(ck_state from, size_t n, uint64_t seed, unsigned max_kraus,
                                              ck_region_verification* out);
CK_API ck_status ck_certify_extremum(double z, double z_target, unsigned restarts, uint64_t seed,
                                     ck_extremum_certificate* out);

#ifdef __cplusplus
}
#endif

#endif /* COHERENCE_KIT_H_ */
