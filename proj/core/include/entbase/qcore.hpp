#pragma once

// Two-qubit density-matrix algebra for mode-entangled single photons.
//
// Basis order is |i_L i_R> with the left arm as the most significant index:
//   0 = |00>, 1 = |01>, 2 = |10>, 3 = |11>.

#include <Eigen/Dense>

#include <complex>
#include <string_view>
#include <vector>

namespace entbase {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kExactTol = 1e-12;   // exact-algebra checks
inline constexpr double kParamTol = 1e-9;    // parameterized invariants
inline constexpr double kPsdFloor = -1e-10;  // minimum admissible eigenvalue

inline constexpr double kPi = 3.14159265358979323846;

/// Maps any finite angle into (-pi, pi].
double wrap_phase(double angle);

struct StateDiagnostics {
  double hermitian_error;  // max |M - M^dagger|
  double trace_error;      // |tr M - 1|
  double min_eigenvalue;
};

StateDiagnostics diagnose(const Matrix4c& m);

/// 4x4 complex Hermitian, unit-trace, positive semidefinite matrix.
/// Construction validates all three properties and throws InvalidState.
class DensityMatrix4 {
 public:
  explicit DensityMatrix4(const Matrix4c& m);

  const Matrix4c& matrix() const noexcept { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  StateDiagnostics diagnostics() const { return diagnose(m_); }

 private:
  Matrix4c m_;
};

/// (a, g, f, h, w, z) parameterization of an X-state. Coherences are stored as
/// magnitude/phase pairs: entry (|01>,|10>) = w_a e^{-i w_p} and
/// entry (|00>,|11>) = z_a e^{-i z_p}.
struct XState {
  double a = 0.0;
  double g = 0.0;
  double f = 0.0;
  double h = 0.0;
  double w_a = 0.0;
  double w_p = 0.0;
  double z_a = 0.0;
  double z_p = 0.0;
};

/// Throws InvalidArgument when the populations, normalization or
/// positivity bounds are violated (slack kParamTol).
void validate(const XState& x);

DensityMatrix4 to_density_matrix(const XState& x);

/// Source photon state: magnitude in [0,1], phase canonical in (-pi, pi].
class AstroVisibility {
 public:
  AstroVisibility(double amplitude, double phase);

  /// Amplitudes overshooting 1 by at most kExactTol are clamped, so flux
  /// normalized visibilities of a single point source are accepted.
  static AstroVisibility from_complex(Complex v);

  double amplitude() const noexcept { return amplitude_; }
  double phase() const noexcept { return phase_; }
  Complex value() const { return std::polar(amplitude_, phase_); }

 private:
  double amplitude_;
  double phase_;
};

enum class KrausKind { AmplitudeDamping, Dephasing, Depolarizing, Custom };

std::string_view kraus_kind_name(KrausKind kind);

/// Single-qubit CPTP map given by Kraus operators. The completeness
/// relation sum K^dagger K = I is checked on construction.
class KrausChannel {
 public:
  KrausChannel(KrausKind kind, double param, std::vector<Matrix2c> operators);

  static KrausChannel identity();

  KrausKind kind() const noexcept { return kind_; }
  double param() const noexcept { return param_; }
  const std::vector<Matrix2c>& operators() const noexcept { return ops_; }

  /// max |sum K^dagger K - I|
  double completeness_error() const;

 private:
  KrausKind kind_;
  double param_;
  std::vector<Matrix2c> ops_;
};

KrausChannel kraus_amplitude_damping(double lambda);
KrausChannel kraus_dephasing(double mu);
KrausChannel kraus_depolarizing(double kappa);

DensityMatrix4 make_bell_psi(double delta);
DensityMatrix4 make_astro_state(const AstroVisibility& v);

/// rho -> sum_ij (K_i^L (x) K_j^R) rho (K_i^L (x) K_j^R)^dagger
DensityMatrix4 apply_independent_channels(const DensityMatrix4& rho, const KrausChannel& left,
                                          const KrausChannel& right);

/// Reads the (a, g, f, h, w, z) parameters off an X-form matrix. w_p is the phase of the
/// (|10>,|01>) entry and z_p the phase of (|11>,|00>). Throws NotXFormError
/// when any entry off the two diagonals exceeds tol.
XState extract_xstate(const DensityMatrix4& rho, double tol = kExactTol);

/// C = 2 w_a / (g + f). Throws DegenerateResource when g + f vanishes.
double concurrence_subspace(const XState& x);

/// Full X-state concurrence 2 max(0, w_a - sqrt(a h), z_a - sqrt(g f)).
double concurrence_wootters_x(const XState& x);

/// xi = g + f, the population of the single-excitation subspace.
double subspace_weight(const XState& x);

}  // namespace entbase
