#include "entbase/qcore.hpp"

#include "entbase/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entbase {

namespace {

Matrix4c kron(const Matrix2c& left, const Matrix2c& right) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = left(i, j) * right;
  return out;
}

void require_probability(double p, std::string_view name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << p << " is outside [0,1]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

const Matrix2c& pauli_x() {
  static const Matrix2c m = (Matrix2c() << 0, 1, 1, 0).finished();
  return m;
}
const Matrix2c& pauli_y() {
  static const Matrix2c m = (Matrix2c() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}
const Matrix2c& pauli_z() {
  static const Matrix2c m = (Matrix2c() << 1, 0, 0, -1).finished();
  return m;
}

}  // namespace

double wrap_phase(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

StateDiagnostics diagnose(const Matrix4c& m) {
  StateDiagnostics d{};
  d.hermitian_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const Matrix4c herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

DensityMatrix4::DensityMatrix4(const Matrix4c& m) : m_(m) {
  if (!m_.allFinite()) throw Error(ErrorKind::InvalidState, "density matrix has non-finite entries");
  const auto d = diagnose(m_);
  if (d.hermitian_error > kExactTol || d.trace_error > kExactTol || d.min_eigenvalue < kPsdFloor) {
    std::ostringstream os;
    os << "not a density matrix (hermitian error " << d.hermitian_error << ", trace error "
       << d.trace_error << ", min eigenvalue " << d.min_eigenvalue << ")";
    throw Error(ErrorKind::InvalidState, os.str());
  }
}

void validate(const XState& x) {
  const double vals[] = {x.a, x.g, x.f, x.h, x.w_a, x.w_p, x.z_a, x.z_p};
  for (double v : vals)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "X-state has non-finite parameter");

  const double pops[] = {x.a, x.g, x.f, x.h};
  for (double p : pops)
    if (p < -kParamTol || p > 1.0 + kParamTol)
      throw Error(ErrorKind::InvalidArgument, "X-state population outside [0,1]");
  if (std::abs(x.a + x.g + x.f + x.h - 1.0) > kParamTol)
    throw Error(ErrorKind::InvalidArgument, "X-state populations do not sum to 1");
  if (x.w_a < 0.0 || x.z_a < 0.0)
    throw Error(ErrorKind::InvalidArgument, "X-state coherence magnitudes must be nonnegative");
  if (x.w_a > std::sqrt(std::max(0.0, x.g * x.f)) + kParamTol)
    throw Error(ErrorKind::InvalidArgument, "w_a exceeds sqrt(g f)");
  if (x.z_a > std::sqrt(std::max(0.0, x.a * x.h)) + kParamTol)
    throw Error(ErrorKind::InvalidArgument, "z_a exceeds sqrt(a h)");
}

DensityMatrix4 to_density_matrix(const XState& x) {
  validate(x);
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = x.a;
  m(1, 1) = x.g;
  m(2, 2) = x.f;
  m(3, 3) = x.h;
  m(1, 2) = std::polar(x.w_a, -x.w_p);
  m(2, 1) = std::polar(x.w_a, x.w_p);
  m(0, 3) = std::polar(x.z_a, -x.z_p);
  m(3, 0) = std::polar(x.z_a, x.z_p);
  return DensityMatrix4(m);
}

AstroVisibility::AstroVisibility(double amplitude, double phase) {
  if (!std::isfinite(amplitude) || !std::isfinite(phase))
    throw Error(ErrorKind::InvalidArgument, "visibility must be finite");
  if (amplitude < 0.0 || amplitude > 1.0) {
    std::ostringstream os;
    os << "visibility amplitude " << amplitude << " is outside [0,1]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  amplitude_ = amplitude;
  phase_ = wrap_phase(phase);
}

AstroVisibility AstroVisibility::from_complex(Complex v) {
  double amp = std::abs(v);
  if (amp > 1.0 && amp <= 1.0 + kExactTol) amp = 1.0;
  return AstroVisibility(amp, amp == 0.0 ? 0.0 : std::arg(v));
}

std::string_view kraus_kind_name(KrausKind kind) {
  switch (kind) {
    case KrausKind::AmplitudeDamping: return "amplitude_damping";
    case KrausKind::Dephasing: return "dephasing";
    case KrausKind::Depolarizing: return "depolarizing";
    case KrausKind::Custom: return "custom";
  }
  return "unknown";
}

KrausChannel::KrausChannel(KrausKind kind, double param, std::vector<Matrix2c> operators)
    : kind_(kind), param_(param), ops_(std::move(operators)) {
  if (ops_.empty()) throw Error(ErrorKind::InvalidArgument, "Kraus channel needs at least one operator");
  const double err = completeness_error();
  if (!(err <= kExactTol)) {
    std::ostringstream os;
    os << kraus_kind_name(kind_) << " channel violates completeness by " << err;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

KrausChannel KrausChannel::identity() {
  return KrausChannel(KrausKind::Custom, 0.0, {Matrix2c::Identity()});
}

double KrausChannel::completeness_error() const {
  Matrix2c sum = Matrix2c::Zero();
  for (const auto& k : ops_) sum += k.adjoint() * k;
  return (sum - Matrix2c::Identity()).cwiseAbs().maxCoeff();
}

KrausChannel kraus_amplitude_damping(double lambda) {
  require_probability(lambda, "lambda");
  Matrix2c a1 = Matrix2c::Zero();
  a1(0, 0) = 1.0;
  a1(1, 1) = std::sqrt(1.0 - lambda);
  Matrix2c a2 = Matrix2c::Zero();
  a2(0, 1) = std::sqrt(lambda);
  return KrausChannel(KrausKind::AmplitudeDamping, lambda, {a1, a2});
}

KrausChannel kraus_dephasing(double mu) {
  require_probability(mu, "mu");
  Matrix2c p1 = std::sqrt(1.0 - mu) * Matrix2c::Identity();
  Matrix2c p2 = Matrix2c::Zero();
  p2(0, 0) = std::sqrt(mu);
  Matrix2c p3 = Matrix2c::Zero();
  p3(1, 1) = std::sqrt(mu);
  return KrausChannel(KrausKind::Dephasing, mu, {p1, p2, p3});
}

KrausChannel kraus_depolarizing(double kappa) {
  require_probability(kappa, "kappa");
  const double s = std::sqrt(kappa / 3.0);
  return KrausChannel(KrausKind::Depolarizing, kappa,
                      {std::sqrt(1.0 - kappa) * Matrix2c::Identity(), s * pauli_x(), s * pauli_y(),
                       s * pauli_z()});
}

DensityMatrix4 make_bell_psi(double delta) {
  if (!std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "phase must be finite");
  Matrix4c m = Matrix4c::Zero();
  m(1, 1) = 0.5;
  m(2, 2) = 0.5;
  m(1, 2) = std::polar(0.5, -delta);
  m(2, 1) = std::polar(0.5, delta);
  return DensityMatrix4(m);
}

DensityMatrix4 make_astro_state(const AstroVisibility& v) {
  Matrix4c m = Matrix4c::Zero();
  m(1, 1) = 0.5;
  m(2, 2) = 0.5;
  m(1, 2) = std::polar(0.5 * v.amplitude(), v.phase());
  m(2, 1) = std::polar(0.5 * v.amplitude(), -v.phase());
  return DensityMatrix4(m);
}

DensityMatrix4 apply_independent_channels(const DensityMatrix4& rho, const KrausChannel& left,
                                          const KrausChannel& right) {
  Matrix4c out = Matrix4c::Zero();
  for (const auto& kl : left.operators()) {
    for (const auto& kr : right.operators()) {
      const Matrix4c k = kron(kl, kr);
      out.noalias() += k * rho.matrix() * k.adjoint();
    }
  }
  return DensityMatrix4(out);
}

XState extract_xstate(const DensityMatrix4& rho, double tol) {
  static constexpr int kOffX[][2] = {{0, 1}, {0, 2}, {1, 0}, {2, 0}, {1, 3}, {3, 1}, {2, 3}, {3, 2}};
  double worst = 0.0;
  int wr = 0, wc = 0;
  for (const auto& rc : kOffX) {
    const double mag = std::abs(rho(rc[0], rc[1]));
    if (mag > worst) {
      worst = mag;
      wr = rc[0];
      wc = rc[1];
    }
  }
  if (worst > tol) throw NotXFormError(worst, wr, wc);

  XState x;
  x.a = rho(0, 0).real();
  x.g = rho(1, 1).real();
  x.f = rho(2, 2).real();
  x.h = rho(3, 3).real();
  const Complex w = rho(2, 1);
  const Complex z = rho(3, 0);
  x.w_a = std::abs(w);
  x.w_p = x.w_a == 0.0 ? 0.0 : wrap_phase(std::arg(w));
  x.z_a = std::abs(z);
  x.z_p = x.z_a == 0.0 ? 0.0 : wrap_phase(std::arg(z));
  return x;
}

double subspace_weight(const XState& x) { return x.g + x.f; }

double concurrence_subspace(const XState& x) {
  const double xi = subspace_weight(x);
  if (!(xi > 1e-15))
    throw Error(ErrorKind::DegenerateResource, "resource has no weight in the single-excitation subspace");
  return 2.0 * x.w_a / xi;
}

double concurrence_wootters_x(const XState& x) {
  const double t1 = x.w_a - std::sqrt(std::max(0.0, x.a * x.h));
  const double t2 = x.z_a - std::sqrt(std::max(0.0, x.g * x.f));
  return 2.0 * std::max({0.0, t1, t2});
}

}  // namespace entbase
