#pragma once

// One-dimensional, small-angle, monochromatic aperture synthesis: sky
// models, Van Cittert-Zernike forward visibilities, truncated inverse
// transform, and the full observe-then-image pipeline.

#include "entbase/channels.hpp"
#include "entbase/protocol.hpp"
#include "entbase/qcore.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace entbase {

struct PointSource {
  double theta = 0.0;  // radians from the pointing center
  double flux = 0.0;
};

/// Incoherent point sources. Total flux must be positive and every
/// |theta| <= 0.1 rad.
class SkyModel {
 public:
  SkyModel(std::vector<PointSource> sources, double wavelength);

  /// Two equal sources at +/- separation/2.
  static SkyModel two_point(double separation, double wavelength);

  const std::vector<PointSource>& sources() const noexcept { return sources_; }
  double wavelength() const noexcept { return wavelength_; }
  double total_flux() const noexcept { return total_flux_; }

 private:
  std::vector<PointSource> sources_;
  double wavelength_;
  double total_flux_;
};

/// Strictly increasing baselines in (0, B_m].
class BaselinePlan {
 public:
  explicit BaselinePlan(std::vector<double> baselines);
  static BaselinePlan linear(double B_max, std::size_t count);

  const std::vector<double>& baselines() const noexcept { return baselines_; }
  double max_baseline() const { return baselines_.back(); }
  std::size_t size() const noexcept { return baselines_.size(); }

 private:
  std::vector<double> baselines_;
};

struct VisibilitySample {
  double B = 0.0;
  Complex V;
  double dV_a = 0.0;
  double dV_p = 0.0;
};

/// V(B) = sum_k I_k exp(-2 pi i B theta_k / lambda) / sum_k I_k
Complex true_visibility(const SkyModel& sky, double baseline);

struct IntensityProfile {
  std::vector<double> theta;
  std::vector<double> intensity;  // sums to 1
  double max_imag_ratio = 0.0;    // max |Im| / max |Re| before taking the real part
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

/// Dirty image: trapezoidal quadrature of the inverse transform over
/// [-B_m, B_m], with V(0) = 1 and V(-B) = conj V(B). No deconvolution, so
/// sidelobes of the truncated transform remain.
IntensityProfile reconstruct_intensity(std::span<const VisibilitySample> samples,
                                       std::span<const double> theta_grid, double wavelength);

/// Interior local maxima at or above rel_threshold * max.
std::vector<std::size_t> find_peaks(const IntensityProfile& profile, double rel_threshold = 0.5);

/// Delta Theta = lambda / (2 B_m)
double resolution(double B_m, double wavelength);

enum class ErrorRegime { PhaseLimited, AmplitudeLimited };

std::string_view regime_name(ErrorRegime regime);

/// Concurrence at or above which the intensity error follows the phase
/// error (1/sqrt(xi)) rather than the amplitude error (1/(C sqrt(xi))).
inline constexpr double kPhaseLimitedConcurrence = 0.9;

struct IntensityError {
  double dI = 0.0;     // sqrt(dV_a^2 + dV_p^2)
  double scale = 0.0;  // sqrt(C^2 + 1) / (C sqrt(xi))
  ErrorRegime regime = ErrorRegime::AmplitudeLimited;
};

/// dV_a and dV_p should be the maxima over the baseline set.
IntensityError intensity_error(double dV_a, double dV_p, double C, double xi);

using ResourceFactory = std::function<XState(double baseline)>;

struct ImagingScenario {
  SkyModel sky;
  BaselinePlan plan;
  ResourceFactory resource;
  PhaseSettings settings = PhaseSettings::quadrature();
  std::int64_t n_per_setting = 1000000;
  std::uint64_t seed = 1;
  std::vector<double> theta_grid;
  RateModel rates;
  unsigned threads = 1;
};

struct BaselineRecord {
  double B = 0.0;
  Complex V_true;
  VisibilityEstimate estimate;
  double xi = 0.0;
  double C = 0.0;
  double R_M_norm = 0.0;  // R_M / (R_E R_T)
  double R_M = 0.0;
};

/// Event count per setting below which the normal approximation behind the
/// error bars is not trusted.
inline constexpr std::int64_t kMinConfidentEvents = 100;

struct ImagingReport {
  std::vector<BaselineRecord> baselines;
  IntensityProfile exact_image;      // from the true visibilities
  IntensityProfile estimated_image;  // from the simulated measurements
  IntensityError intensity;
  double resolution = 0.0;
  double min_C = 0.0;
  double min_xi = 0.0;
  bool low_confidence = false;
};

/// Per baseline: true visibility, resource from the factory, simulated
/// observation with seed derive_seed(seed, index); then both images.
ImagingReport observe_and_image(const ImagingScenario& scenario);

}  // namespace entbase
