#pragma once

// Local-detection visibility measurement with an X-state resource:
// detection probabilities, seeded click sampling, two-setting visibility
// inversion and first-order error propagation.

#include "entbase/channels.hpp"
#include "entbase/qcore.hpp"

#include <array>
#include <cstdint>

namespace entbase {

/// Two controllable resource phases. |sin(w2 - w1)| must be >= 1e-6.
class PhaseSettings {
 public:
  PhaseSettings(double w1, double w2);
  static PhaseSettings quadrature() { return {0.0, kPi / 2.0}; }

  double w1() const noexcept { return w1_; }
  double w2() const noexcept { return w2_; }
  double operator[](int i) const { return i == 0 ? w1_ : w2_; }

  /// Settings shifted by a common offset (the resource's own w_p).
  PhaseSettings offset_by(double phase) const { return {w1_ + phase, w2_ + phase}; }

 private:
  double w1_;
  double w2_;
};

struct DetectionCounts {
  std::int64_t n_c = 0;
  std::int64_t n_ac = 0;
  std::int64_t N = 0;
  int setting_index = 1;
};

struct RawProbabilities {
  double q_c = 0.0;
  double q_ac = 0.0;
};

struct Postselected {
  double p_c = 0.0;
  double p_ac = 0.0;
};

struct VisibilityPoint {
  double amplitude = 0.0;
  double phase = 0.0;
};

struct ErrorBars {
  double dV_a = 0.0;
  double dV_p = 0.0;
};

struct VisibilityEstimate {
  double V_a_hat = 0.0;
  double V_p_hat = 0.0;
  double dV_a = 0.0;
  double dV_p = 0.0;
  std::int64_t N_used = 0;
  double C_used = 0.0;
  double xi_used = 0.0;
  std::array<DetectionCounts, 2> counts{};
};

/// Closed-form coincidence probabilities per incoming photon:
/// q_c  = (g + f - 2 V_a w_a cos(V_p - w_p)) / 4
/// q_ac = (g + f + 2 V_a w_a cos(V_p - w_p)) / 4
RawProbabilities raw_probabilities(const AstroVisibility& v, const XState& x);

/// Same probabilities from explicit beam-splitter projectors acting on the
/// 16-dimensional state rho_A (x) rho_X over modes (A^L, A^R, X^L, X^R).
///
/// Mode convention: rho_X carries its coherence as e^{-i w_p} above the
/// diagonal while rho_A carries e^{+i V_p}; the network state enters the
/// product transposed so both share one phase convention. The right
/// telescope's beam splitter is the mirror image of the left one, so its
/// Pi_+ port is the antisymmetric (|1_A 0_X> - |0_A 1_X>)/sqrt2 combination.
RawProbabilities raw_probabilities_oracle(const DensityMatrix4& rho_A, const DensityMatrix4& rho_X);

/// Unvalidated-matrix entry point; throws DimensionMismatch unless both
/// inputs are 4x4.
RawProbabilities raw_probabilities_oracle(const Eigen::MatrixXcd& rho_A, const Eigen::MatrixXcd& rho_X);

/// Normalizes to successful detections. Throws DegenerateResource when
/// q_c + q_ac = 0.
Postselected postselect(const RawProbabilities& q);

/// n_c ~ Binomial(N, p_c) from a generator seeded with `seed`.
DetectionCounts sample_counts(double p_c, std::int64_t N, std::uint64_t seed, int setting_index = 1);

/// (n_ac - n_c) / N
double delta_p(const DetectionCounts& counts);

/// V_a C cos(V_p - w) for a resource phase w, computed through the
/// closed-form probabilities and postselection.
double analytic_delta_p(const AstroVisibility& v, const XState& x);

/// Inverts dp_i = V_a C cos(V_p - w_i) as a 2x2 linear system for
/// (V_a C cos V_p, V_a C sin V_p). Throws ZeroConcurrence for C <= 0.
VisibilityPoint solve_visibility(double dp1, double dp2, const PhaseSettings& ph, double C);

/// Phase from the ratio alpha = dp1/dp2 via the single-arctangent formula.
/// Only determined modulo pi; NaN when sin(w2) = 0.
double phase_from_ratio(double alpha, const PhaseSettings& ph);

/// V_a = dp_i / (C cos(V_p - w_i)) for one setting.
double amplitude_from_setting(double dp, double phase, double w, double C);

/// Partial derivatives used by propagate_errors.
struct ErrorJacobian {
  double dVp_ddp1 = 0.0;
  double dVp_ddp2 = 0.0;
  double dVa_ddp = 0.0;   // w.r.t. dp of the reference setting
  double dVa_dVp = 0.0;
  int reference_setting = 0;  // 0 or 1; larger |cos(V_p - w_i)|
};

ErrorJacobian error_jacobian(double dp1, double dp2, const PhaseSettings& ph, double C);

/// One-sigma uncertainty of a fringe-contrast estimate from N postselected
/// events: 2 sigma_{p_ac} / sqrt(N) = sqrt(1 - dp^2) / sqrt(N).
double delta_p_error(double dp, std::int64_t N);

/// First-order propagation of the binomial errors in dp1, dp2 to
/// (dV_a, dV_p). dV_p = |dV_p/d alpha| d alpha; dV_a combines the
/// reference setting's dp error with dV_p in quadrature. At zero
/// amplitude dV_p = pi.
ErrorBars propagate_errors(double dp1, double dp2, std::int64_t N, const PhaseSettings& ph, double C);

struct ScalingLaw {
  double dV_a_scale = 0.0;
  double dV_p_scale = 0.0;
  bool diverged = false;
};

/// Channel-specific proportionality factors for the visibility errors
/// (constant prefactor unspecified). R_X is the supplied entangled-photon
/// rate per astronomical mode.
ScalingLaw scaling_laws(const ChannelParams& params, double R_X);

/// 1/(C sqrt(xi R_X)) and 1/sqrt(xi R_X) for an arbitrary resource.
ScalingLaw scaling_from_resource(double C, double xi, double R_X);

/// Noise-free estimate: solve and propagate from given contrasts.
VisibilityEstimate estimate_from_delta_p(double dp1, double dp2, const XState& x, const PhaseSettings& ph,
                                         std::int64_t N_per_setting);

/// Full simulated observation: both settings are applied as additive
/// offsets on the resource phase, each sampled with its own derived seed.
VisibilityEstimate run_observation(const AstroVisibility& v_true, const XState& x, const PhaseSettings& ph,
                                   std::int64_t N_per_setting, std::uint64_t seed);

/// Stream seed derived from a master seed (SplitMix64 finalizer applied to
/// master + golden-ratio multiples of the stream id). Results depend only
/// on (master, stream), never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace entbase
