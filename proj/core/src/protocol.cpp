#include "entbase/protocol.hpp"

#include "entbase/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace entbase {

namespace {

using Matrix16c = Eigen::Matrix<Complex, 16, 16>;

// Projector onto (|1_A 0_X> + sign |0_A 1_X>)/sqrt2 for one telescope; the
// local basis index is 2 n_A + n_X.
Matrix4c port_projector(double sign) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(2) = 1.0 / std::sqrt(2.0);
  v(1) = sign / std::sqrt(2.0);
  return v * v.adjoint();
}

Matrix16c kron4(const Matrix4c& left, const Matrix4c& right) {
  Matrix16c out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out.block<4, 4>(4 * i, 4 * j) = left(i, j) * right;
  return out;
}

// Index of the product basis (A^L, A^R, X^L, X^R) expressed in the
// telescope-grouped basis (A^L, X^L, A^R, X^R).
constexpr int grouped_index(int product_index) {
  const int aL = (product_index >> 3) & 1;
  const int aR = (product_index >> 2) & 1;
  const int xL = (product_index >> 1) & 1;
  const int xR = product_index & 1;
  return (aL << 3) | (xL << 2) | (aR << 1) | xR;
}

// Re-expresses an operator given in the grouped basis in the product basis.
Matrix16c to_product_order(const Matrix16c& grouped) {
  Matrix16c out;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      out(i, j) = grouped(grouped_index(i), grouped_index(j));
  return out;
}

double expectation(const Matrix16c& op, const Matrix16c& rho) { return (op * rho).trace().real(); }

}  // namespace

PhaseSettings::PhaseSettings(double w1, double w2) : w1_(w1), w2_(w2) {
  if (!std::isfinite(w1) || !std::isfinite(w2))
    throw Error(ErrorKind::InvalidArgument, "phase settings must be finite");
  if (std::abs(std::sin(w2 - w1)) < 1e-6)
    throw Error(ErrorKind::DegeneratePhases, "phase settings differ by a multiple of pi");
}

RawProbabilities raw_probabilities(const AstroVisibility& v, const XState& x) {
  validate(x);
  const double xi = subspace_weight(x);
  const double fringe = 2.0 * v.amplitude() * x.w_a * std::cos(v.phase() - x.w_p);
  return {0.25 * (xi - fringe), 0.25 * (xi + fringe)};
}

RawProbabilities raw_probabilities_oracle(const DensityMatrix4& rho_A, const DensityMatrix4& rho_X) {
  const Matrix16c rho = kron4(rho_A.matrix(), rho_X.matrix().transpose());

  const Matrix4c left_plus = port_projector(+1.0);
  const Matrix4c left_minus = port_projector(-1.0);
  const Matrix4c right_plus = port_projector(-1.0);
  const Matrix4c right_minus = port_projector(+1.0);

  auto joint = [&](const Matrix4c& l, const Matrix4c& r) { return to_product_order(kron4(l, r)); };

  RawProbabilities q;
  q.q_c = expectation(joint(left_plus, right_plus), rho) + expectation(joint(left_minus, right_minus), rho);
  q.q_ac = expectation(joint(left_plus, right_minus), rho) + expectation(joint(left_minus, right_plus), rho);
  return q;
}

RawProbabilities raw_probabilities_oracle(const Eigen::MatrixXcd& rho_A, const Eigen::MatrixXcd& rho_X) {
  if (rho_A.rows() != 4 || rho_A.cols() != 4 || rho_X.rows() != 4 || rho_X.cols() != 4)
    throw Error(ErrorKind::DimensionMismatch, "both states must be 4x4 two-mode density matrices");
  return raw_probabilities_oracle(DensityMatrix4(rho_A), DensityMatrix4(rho_X));
}

Postselected postselect(const RawProbabilities& q) {
  const double total = q.q_c + q.q_ac;
  if (!(total > 1e-15))
    throw Error(ErrorKind::DegenerateResource, "no coincidence events can occur (q_c + q_ac = 0)");
  const double p_c = q.q_c / total;
  return {p_c, 1.0 - p_c};
}

DetectionCounts sample_counts(double p_c, std::int64_t N, std::uint64_t seed, int setting_index) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be at least 1");
  if (!std::isfinite(p_c) || p_c < -kParamTol || p_c > 1.0 + kParamTol)
    throw Error(ErrorKind::InvalidArgument, "p_c must be a probability");
  const double p = std::clamp(p_c, 0.0, 1.0);

  DetectionCounts out;
  out.N = N;
  out.setting_index = setting_index;
  if (p == 0.0) {
    out.n_c = 0;
  } else if (p == 1.0) {
    out.n_c = N;
  } else {
    std::mt19937_64 gen(seed);
    std::binomial_distribution<std::int64_t> dist(N, p);
    out.n_c = dist(gen);
  }
  out.n_ac = N - out.n_c;
  return out;
}

double delta_p(const DetectionCounts& counts) {
  if (counts.N < 1 || counts.n_c < 0 || counts.n_ac < 0 || counts.n_c + counts.n_ac != counts.N)
    throw Error(ErrorKind::InvalidArgument, "inconsistent detection counts");
  return static_cast<double>(counts.n_ac - counts.n_c) / static_cast<double>(counts.N);
}

double analytic_delta_p(const AstroVisibility& v, const XState& x) {
  const Postselected p = postselect(raw_probabilities(v, x));
  return p.p_ac - p.p_c;
}

VisibilityPoint solve_visibility(double dp1, double dp2, const PhaseSettings& ph, double C) {
  if (!(C > 0.0))
    throw Error(ErrorKind::ZeroConcurrence, "visibility amplitude is unrecoverable without concurrence");
  const double det = std::sin(ph.w2() - ph.w1());
  if (std::abs(det) < 1e-6) throw Error(ErrorKind::DegeneratePhases, "phase settings are degenerate");

  const double c = (dp1 * std::sin(ph.w2()) - dp2 * std::sin(ph.w1())) / det;
  const double s = (dp2 * std::cos(ph.w1()) - dp1 * std::cos(ph.w2())) / det;
  const double r = std::hypot(c, s);
  if (r == 0.0) return {0.0, 0.0};
  return {r / C, wrap_phase(std::atan2(s, c))};
}

double phase_from_ratio(double alpha, const PhaseSettings& ph) {
  const double sw2 = std::sin(ph.w2());
  if (sw2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double inner = std::sin(ph.w2() - ph.w1()) / (alpha * sw2 - std::sin(ph.w1())) - std::cos(ph.w2());
  return std::atan(inner / sw2);
}

double amplitude_from_setting(double dp, double phase, double w, double C) {
  return dp / (C * std::cos(phase - w));
}

ErrorJacobian error_jacobian(double dp1, double dp2, const PhaseSettings& ph, double C) {
  const VisibilityPoint v = solve_visibility(dp1, dp2, ph, C);
  const double r = v.amplitude * C;
  const double det = std::sin(ph.w2() - ph.w1());

  ErrorJacobian j;
  const double cos1 = std::cos(v.phase - ph.w1());
  const double cos2 = std::cos(v.phase - ph.w2());
  if (r > 0.0) {
    j.dVp_ddp1 = -cos2 / (det * r);
    j.dVp_ddp2 = cos1 / (det * r);
  } else {
    j.dVp_ddp1 = std::numeric_limits<double>::infinity();
    j.dVp_ddp2 = std::numeric_limits<double>::infinity();
  }

  j.reference_setting = std::abs(cos2) > std::abs(cos1) ? 1 : 0;
  const double w = ph[j.reference_setting];
  const double dp = j.reference_setting == 0 ? dp1 : dp2;
  const double cw = std::cos(v.phase - w);
  j.dVa_ddp = 1.0 / (C * cw);
  j.dVa_dVp = dp * std::sin(v.phase - w) / (C * cw * cw);
  return j;
}

double delta_p_error(double dp, std::int64_t N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be at least 1");
  // p_ac = (1 + dp)/2, so 2 sqrt(p_ac (1 - p_ac)) = sqrt(1 - dp^2).
  return std::sqrt(std::max(0.0, 1.0 - dp * dp)) / std::sqrt(static_cast<double>(N));
}

ErrorBars propagate_errors(double dp1, double dp2, std::int64_t N, const PhaseSettings& ph, double C) {
  const double sigma1 = delta_p_error(dp1, N);
  const double sigma2 = delta_p_error(dp2, N);
  const ErrorJacobian j = error_jacobian(dp1, dp2, ph, C);
  const double sigma_ref = j.reference_setting == 0 ? sigma1 : sigma2;

  ErrorBars e;
  if (std::isinf(j.dVp_ddp1)) {
    // Zero amplitude: the phase carries no information.
    e.dV_p = kPi;
    e.dV_a = std::abs(j.dVa_ddp) * sigma_ref;
    return e;
  }
  e.dV_p = std::hypot(j.dVp_ddp1 * sigma1, j.dVp_ddp2 * sigma2);
  e.dV_a = std::hypot(j.dVa_ddp * sigma_ref, j.dVa_dVp * e.dV_p);
  return e;
}

ScalingLaw scaling_from_resource(double C, double xi, double R_X) {
  if (!(R_X > 0.0)) throw Error(ErrorKind::InvalidArgument, "R_X must be > 0");
  ScalingLaw s;
  const double inf = std::numeric_limits<double>::infinity();
  const double base = std::sqrt(std::max(0.0, xi) * R_X);
  s.dV_p_scale = base > 0.0 ? 1.0 / base : inf;
  s.dV_a_scale = (base > 0.0 && C > 0.0) ? 1.0 / (C * base) : inf;
  s.diverged = std::isinf(s.dV_a_scale) || std::isinf(s.dV_p_scale);
  return s;
}

ScalingLaw scaling_laws(const ChannelParams& params, double R_X) {
  if (!(R_X > 0.0)) throw Error(ErrorKind::InvalidArgument, "R_X must be > 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double root_r = std::sqrt(R_X);
  ScalingLaw s;

  if (const auto* ad = std::get_if<AmplitudeDamping>(&params)) {
    (void)xstate_amplitude_damping(ad->lambda_L, ad->lambda_R);
    const double xi = 1.0 - 0.5 * (ad->lambda_L + ad->lambda_R);
    const double denom = root_r * std::sqrt((1.0 - ad->lambda_L) * (1.0 - ad->lambda_R));
    s.dV_a_scale = denom > 0.0 ? std::sqrt(xi) / denom : inf;
    s.dV_p_scale = xi > 0.0 ? 1.0 / (root_r * std::sqrt(xi)) : inf;
  } else if (const auto* de = std::get_if<Dephasing>(&params)) {
    (void)xstate_dephasing(de->mu_L, de->mu_R);
    const double denom = root_r * (1.0 - de->mu_L) * (1.0 - de->mu_R);
    s.dV_a_scale = denom > 0.0 ? 1.0 / denom : inf;
    s.dV_p_scale = 1.0 / root_r;
  } else {
    const auto& dp = std::get<Depolarizing>(params);
    const double x = depolarizing_x(dp.kappa_L, dp.kappa_R);
    const double gap = std::abs(1.0 - 4.0 * x);
    // R_E and R_X denote the same supply rate here.
    s.dV_a_scale = gap > 1e-12 ? std::sqrt(1.0 - 2.0 * x) / (root_r * gap) : inf;
    s.dV_p_scale = 1.0 / (root_r * std::sqrt(1.0 - 2.0 * x));
  }
  s.diverged = std::isinf(s.dV_a_scale) || std::isinf(s.dV_p_scale);
  return s;
}

VisibilityEstimate estimate_from_delta_p(double dp1, double dp2, const XState& x, const PhaseSettings& ph,
                                         std::int64_t N_per_setting) {
  validate(x);
  const double C = concurrence_subspace(x);
  const PhaseSettings effective = ph.offset_by(x.w_p);
  const VisibilityPoint v = solve_visibility(dp1, dp2, effective, C);
  const ErrorBars e = propagate_errors(dp1, dp2, N_per_setting, effective, C);

  VisibilityEstimate out;
  out.V_a_hat = v.amplitude;
  out.V_p_hat = v.phase;
  out.dV_a = e.dV_a;
  out.dV_p = e.dV_p;
  out.N_used = N_per_setting;
  out.C_used = C;
  out.xi_used = subspace_weight(x);
  return out;
}

VisibilityEstimate run_observation(const AstroVisibility& v_true, const XState& x, const PhaseSettings& ph,
                                   std::int64_t N_per_setting, std::uint64_t seed) {
  validate(x);
  if (N_per_setting < 1) throw Error(ErrorKind::InvalidArgument, "N_per_setting must be at least 1");
  const double C = concurrence_subspace(x);
  if (!(C > 0.0))
    throw Error(ErrorKind::ZeroConcurrence, "resource has zero concurrence; visibility amplitude is unrecoverable");

  std::array<DetectionCounts, 2> counts;
  std::array<double, 2> dp{};
  for (int i = 0; i < 2; ++i) {
    XState shifted = x;
    shifted.w_p = x.w_p + ph[i];
    const Postselected p = postselect(raw_probabilities(v_true, shifted));
    counts[i] = sample_counts(p.p_c, N_per_setting, derive_seed(seed, static_cast<std::uint64_t>(i + 1)), i + 1);
    dp[i] = delta_p(counts[i]);
  }

  VisibilityEstimate out = estimate_from_delta_p(dp[0], dp[1], x, ph, N_per_setting);
  out.counts = counts;
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace entbase
