#include "entbase/channels.hpp"

#include "entbase/error.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace entbase {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << p << " is outside [0,1]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || std::isnan(v)) {
    std::ostringstream os;
    os << name << " = " << v << " must be >= 0";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " = " << v << " must be > 0";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

XState xstate_amplitude_damping(double lambda_L, double lambda_R) {
  require_probability(lambda_L, "lambda_L");
  require_probability(lambda_R, "lambda_R");
  XState x;
  x.a = 0.5 * (lambda_L + lambda_R);
  x.g = 0.5 * (1.0 - lambda_R);
  x.f = 0.5 * (1.0 - lambda_L);
  x.w_a = 0.5 * std::sqrt((1.0 - lambda_L) * (1.0 - lambda_R));
  return x;
}

XState xstate_dephasing(double mu_L, double mu_R) {
  require_probability(mu_L, "mu_L");
  require_probability(mu_R, "mu_R");
  XState x;
  x.g = 0.5;
  x.f = 0.5;
  x.w_a = 0.5 * (1.0 - mu_L) * (1.0 - mu_R);
  return x;
}

double depolarizing_x(double kappa_L, double kappa_R) {
  require_probability(kappa_L, "kappa_L");
  require_probability(kappa_R, "kappa_R");
  return (kappa_L + kappa_R) / 3.0 - 4.0 * kappa_L * kappa_R / 9.0;
}

DepolarizedResource xstate_depolarizing(double kappa_L, double kappa_R) {
  DepolarizedResource out;
  out.x = depolarizing_x(kappa_L, kappa_R);
  const double coherence = 0.5 - 2.0 * out.x;
  out.state.a = out.x;
  out.state.h = out.x;
  out.state.g = 0.5 - out.x;
  out.state.f = 0.5 - out.x;
  out.state.w_a = std::abs(coherence);
  out.degenerate_coherence = coherence < 0.0;
  out.state.w_p = out.degenerate_coherence ? kPi : 0.0;
  return out;
}

XState resource_state(const ChannelParams& params) {
  return std::visit(overloaded{
                        [](const AmplitudeDamping& p) { return xstate_amplitude_damping(p.lambda_L, p.lambda_R); },
                        [](const Dephasing& p) { return xstate_dephasing(p.mu_L, p.mu_R); },
                        [](const Depolarizing& p) { return xstate_depolarizing(p.kappa_L, p.kappa_R).state; },
                    },
                    params);
}

std::pair<KrausChannel, KrausChannel> kraus_pair(const ChannelParams& params) {
  return std::visit(overloaded{
                        [](const AmplitudeDamping& p) {
                          return std::pair{kraus_amplitude_damping(p.lambda_L), kraus_amplitude_damping(p.lambda_R)};
                        },
                        [](const Dephasing& p) {
                          return std::pair{kraus_dephasing(p.mu_L), kraus_dephasing(p.mu_R)};
                        },
                        [](const Depolarizing& p) {
                          return std::pair{kraus_depolarizing(p.kappa_L), kraus_depolarizing(p.kappa_R)};
                        },
                    },
                    params);
}

double fiber_loss_prob(double length, double attenuation_length) {
  require_nonnegative(length, "fiber length");
  require_positive(attenuation_length, "L0");
  return -std::expm1(-length / attenuation_length);
}

double depol_prob(double length, double beta) {
  require_nonnegative(length, "fiber length");
  require_positive(beta, "beta");
  return -std::expm1(-beta * length / 2.0);
}

FiberLink FiberLink::equal_arms(double baseline, double attenuation_length) {
  FiberLink link{baseline / 2.0, baseline / 2.0, attenuation_length};
  link.validate();
  return link;
}

void FiberLink::validate() const {
  require_nonnegative(left_length, "L_L");
  require_nonnegative(right_length, "L_R");
  require_positive(attenuation_length, "L0");
}

AmplitudeDamping FiberLink::loss() const {
  validate();
  return {fiber_loss_prob(left_length, attenuation_length),
          fiber_loss_prob(right_length, attenuation_length)};
}

void DepolarizingFiber::validate() const {
  require_nonnegative(length, "fiber length");
  require_positive(beta, "beta");
}

Depolarizing DepolarizingFiber::depolarization() const {
  validate();
  const double kappa = depol_prob(length, beta);
  return {kappa, kappa};
}

void MemoryPair::validate() const {
  require_nonnegative(t1, "t1");
  require_nonnegative(t2, "t2");
  require_positive(tau_c, "tau_c");
  if (sign != BellSign::Plus && sign != BellSign::Minus)
    throw Error(ErrorKind::InvalidArgument, "bell sign must be +1 or -1");
}

double memory_survival(double t, double tau_c) {
  require_nonnegative(t, "t");
  require_positive(tau_c, "tau_c");
  return 0.5 * (1.0 + std::exp(-t / tau_c));
}

KrausChannel memory_dephasing_channel(double t, double tau_c) {
  const double p = memory_survival(t / 2.0, tau_c);
  Matrix2c z = Matrix2c::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return KrausChannel(KrausKind::Custom, 1.0 - p,
                      {std::sqrt(p) * Matrix2c::Identity(), std::sqrt(1.0 - p) * z});
}

XState memory_xstate(double t, double tau_c, BellSign sign) {
  require_nonnegative(t, "t");
  require_positive(tau_c, "tau_c");
  XState x;
  x.g = 0.5;
  x.f = 0.5;
  x.w_a = 0.5 * std::exp(-t / tau_c);
  x.w_p = sign == BellSign::Plus ? 0.0 : kPi;
  return x;
}

XState swap_memories(double t1, double t2, double tau_c, BellSign outcome) {
  MemoryPair{t1, t2, tau_c, outcome}.validate();
  const double p = memory_survival(t1 + t2, tau_c);
  const Matrix4c heralded = make_bell_psi(outcome == BellSign::Plus ? 0.0 : kPi).matrix();
  const Matrix4c other = make_bell_psi(outcome == BellSign::Plus ? kPi : 0.0).matrix();
  const DensityMatrix4 mixed(p * heralded + (1.0 - p) * other);
  XState x = extract_xstate(mixed);
  // The mixture is real; pin the phase to the heralded sign so that a
  // vanishing coherence does not pick up a rounding-level phase.
  x.w_p = outcome == BellSign::Plus ? 0.0 : kPi;
  return x;
}

XState swap_memories(const MemoryPair& pair) {
  return swap_memories(pair.t1, pair.t2, pair.tau_c, pair.sign);
}

void RateModel::validate() const {
  if (!(R_E >= 0.0 && R_E <= 1.0)) {
    std::ostringstream os;
    os << "R_E = " << R_E << " is outside [0,1]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  require_positive(R_T, "R_T");
}

double normalized_measurement_rate(double xi) {
  if (!(xi >= -kParamTol && xi <= 1.0 + kParamTol))
    throw Error(ErrorKind::InvalidArgument, "subspace weight outside [0,1]");
  return 0.5 * xi;
}

double measurement_rate(double xi, const RateModel& rates) {
  rates.validate();
  return normalized_measurement_rate(xi) * rates.R_E * rates.R_T;
}

double max_measurement_rate(const RateModel& rates) { return measurement_rate(1.0, rates); }

double log_rate_fiber(double baseline, double attenuation_length, const RateModel& rates) {
  require_nonnegative(baseline, "B");
  require_positive(attenuation_length, "L0");
  return std::log(max_measurement_rate(rates)) - baseline / (2.0 * attenuation_length);
}

RateApproximation log_rate_depol_approx(double length, double beta, const RateModel& rates) {
  require_nonnegative(length, "fiber length");
  require_positive(beta, "beta");
  RateApproximation out;
  out.value = std::log(max_measurement_rate(rates)) + std::log(5.0 / 9.0) - 0.8 * std::exp(-beta * length / 2.0);
  out.valid = std::exp(-beta * length) <= 0.01;
  return out;
}

double log_rate_depol_exact(double length, double beta, const RateModel& rates) {
  const Depolarizing d = DepolarizingFiber{length, beta}.depolarization();
  const XState x = xstate_depolarizing(d.kappa_L, d.kappa_R).state;
  return std::log(measurement_rate(subspace_weight(x), rates));
}

}  // namespace entbase
