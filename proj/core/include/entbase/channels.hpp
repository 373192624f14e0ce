#pragma once

// Decoherence scenarios for the entanglement-distribution network: closed
// form X-states for independent per-arm channels, fiber and memory models,
// entanglement swapping, and measurement-rate laws.

#include "entbase/qcore.hpp"

#include <variant>

namespace entbase {

struct AmplitudeDamping {
  double lambda_L = 0.0;
  double lambda_R = 0.0;
};

struct Dephasing {
  double mu_L = 0.0;
  double mu_R = 0.0;
};

struct Depolarizing {
  double kappa_L = 0.0;
  double kappa_R = 0.0;
};

using ChannelParams = std::variant<AmplitudeDamping, Dephasing, Depolarizing>;

XState xstate_amplitude_damping(double lambda_L, double lambda_R);
XState xstate_dephasing(double mu_L, double mu_R);

/// x = (kappa_L + kappa_R)/3 - 4 kappa_L kappa_R / 9, always in [0, 1/3].
double depolarizing_x(double kappa_L, double kappa_R);

struct DepolarizedResource {
  XState state;
  double x = 0.0;
  // Set when 1/2 - 2x < 0: the coherence sign is absorbed into w_p = pi.
  bool degenerate_coherence = false;
};

DepolarizedResource xstate_depolarizing(double kappa_L, double kappa_R);

/// Closed-form resource for any of the three per-arm channel families.
XState resource_state(const ChannelParams& params);

/// The Kraus pair (left, right) that produces resource_state(params) from
/// |psi+><psi+|.
std::pair<KrausChannel, KrausChannel> kraus_pair(const ChannelParams& params);

double fiber_loss_prob(double length, double attenuation_length);
double depol_prob(double length, double beta);

/// Lossy fiber link; loss per arm is 1 - exp(-L/L0).
struct FiberLink {
  double left_length = 0.0;
  double right_length = 0.0;
  double attenuation_length = 1.0;

  static FiberLink equal_arms(double baseline, double attenuation_length);
  void validate() const;
  AmplitudeDamping loss() const;
};

/// Birefringent fiber of total length L; each arm depolarizes with
/// kappa = 1 - exp(-beta L / 2).
struct DepolarizingFiber {
  double length = 0.0;
  double beta = 1.0;

  void validate() const;
  Depolarizing depolarization() const;
};

enum class BellSign { Plus = 1, Minus = -1 };

struct MemoryPair {
  double t1 = 0.0;
  double t2 = 0.0;
  double tau_c = 1.0;
  BellSign sign = BellSign::Plus;

  void validate() const;
};

/// p(t) = (1 + exp(-t/tau_c)) / 2
double memory_survival(double t, double tau_c);

/// Single-qubit memory dephasing Gamma_t: Z applied with probability
/// 1 - p(t/2).
KrausChannel memory_dephasing_channel(double t, double tau_c);

/// Bell-diagonal state of a psi(+/-) pair after both halves dephased for t.
XState memory_xstate(double t, double tau_c, BellSign sign);

/// Swapping two memory-dephased pairs stored for t1 and t2. Built as the
/// mixture p(t1+t2) psi(+/-) + (1 - p(t1+t2)) psi(-/+).
XState swap_memories(double t1, double t2, double tau_c, BellSign outcome);

XState swap_memories(const MemoryPair& pair);

/// Entanglement supply rate per astronomical mode and target photon flux.
struct RateModel {
  double R_E = 1.0;
  double R_T = 1.0;

  void validate() const;
};

/// R_M / (R_E R_T) = xi / 2
double normalized_measurement_rate(double xi);

/// R_M = xi R_E R_T / 2
double measurement_rate(double xi, const RateModel& rates);

/// R_M^(0) = R_E R_T / 2
double max_measurement_rate(const RateModel& rates);

/// ln R_M for an equal-arm lossy fiber of baseline B.
double log_rate_fiber(double baseline, double attenuation_length, const RateModel& rates);

struct RateApproximation {
  double value = 0.0;
  bool valid = false;  // exp(-beta L) <= 0.01
};

/// Long-fiber expansion of ln R_M for depolarizing fibers:
/// ln(R_E R_T / 2) + ln(5/9) - 0.8 exp(-beta L / 2).
RateApproximation log_rate_depol_approx(double length, double beta, const RateModel& rates);

/// Exact ln R_M for depolarizing fibers.
double log_rate_depol_exact(double length, double beta, const RateModel& rates);

}  // namespace entbase
