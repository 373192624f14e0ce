#include "entbase/imaging.hpp"

#include "entbase/error.hpp"
#include "entbase/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace entbase {

SkyModel::SkyModel(std::vector<PointSource> sources, double wavelength)
    : sources_(std::move(sources)), wavelength_(wavelength), total_flux_(0.0) {
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_))
    throw Error(ErrorKind::InvalidArgument, "wavelength must be > 0");
  if (sources_.empty()) throw Error(ErrorKind::InvalidArgument, "sky model has no sources");
  for (const auto& s : sources_) {
    if (!std::isfinite(s.theta) || std::abs(s.theta) > 0.1) {
      std::ostringstream os;
      os << "source offset " << s.theta << " rad is outside the small-angle range |theta| <= 0.1";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    if (!(s.flux >= 0.0) || !std::isfinite(s.flux))
      throw Error(ErrorKind::InvalidArgument, "source flux must be finite and nonnegative");
    total_flux_ += s.flux;
  }
  if (!(total_flux_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "sky model has zero total flux");
}

SkyModel SkyModel::two_point(double separation, double wavelength) {
  return SkyModel({{-separation / 2.0, 1.0}, {separation / 2.0, 1.0}}, wavelength);
}

BaselinePlan::BaselinePlan(std::vector<double> baselines) : baselines_(std::move(baselines)) {
  if (baselines_.empty()) throw Error(ErrorKind::InvalidArgument, "baseline plan is empty");
  for (std::size_t i = 0; i < baselines_.size(); ++i) {
    if (!(baselines_[i] > 0.0) || !std::isfinite(baselines_[i]))
      throw Error(ErrorKind::InvalidArgument, "baselines must be positive and finite");
    if (i > 0 && !(baselines_[i] > baselines_[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "baselines must be strictly increasing");
  }
}

BaselinePlan BaselinePlan::linear(double B_max, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "baseline count must be >= 1");
  std::vector<double> b(count);
  for (std::size_t k = 0; k < count; ++k) b[k] = B_max * static_cast<double>(k + 1) / static_cast<double>(count);
  return BaselinePlan(std::move(b));
}

Complex true_visibility(const SkyModel& sky, double baseline) {
  if (!std::isfinite(baseline)) throw Error(ErrorKind::InvalidArgument, "baseline must be finite");
  Complex sum(0.0, 0.0);
  for (const auto& s : sky.sources())
    sum += s.flux * std::polar(1.0, -2.0 * kPi * baseline * s.theta / sky.wavelength());
  return sum / sky.total_flux();
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw Error(ErrorKind::DegenerateGrid, "grid needs >= 2 points and hi > lo");
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j)
    g[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
  return g;
}

IntensityProfile reconstruct_intensity(std::span<const VisibilitySample> samples,
                                       std::span<const double> theta_grid, double wavelength) {
  if (samples.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two visibility samples");
  if (!(wavelength > 0.0)) throw Error(ErrorKind::InvalidArgument, "wavelength must be > 0");
  if (theta_grid.size() < 2) throw Error(ErrorKind::DegenerateGrid, "angle grid needs at least two points");
  for (std::size_t j = 1; j < theta_grid.size(); ++j)
    if (!(theta_grid[j] > theta_grid[j - 1]))
      throw Error(ErrorKind::DegenerateGrid, "angle grid must be strictly increasing");

  // Baselines 0 = B_0 < B_1 < ... < B_n; symmetric trapezoid weights over
  // [-B_n, B_n].
  const std::size_t n = samples.size();
  std::vector<double> b(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    b[k + 1] = samples[k].B;
    if (!(b[k + 1] > b[k])) throw Error(ErrorKind::InvalidArgument, "sample baselines must be positive and increasing");
  }
  std::vector<double> w(n + 1);
  w[0] = b[1];
  for (std::size_t k = 1; k < n; ++k) w[k] = 0.5 * (b[k + 1] - b[k - 1]);
  w[n] = 0.5 * (b[n] - b[n - 1]);

  IntensityProfile out;
  out.theta.assign(theta_grid.begin(), theta_grid.end());
  out.intensity.resize(theta_grid.size());
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t j = 0; j < theta_grid.size(); ++j) {
    Complex acc(w[0], 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      const Complex v = samples[k - 1].V;
      const Complex kernel = std::polar(1.0, 2.0 * kPi * b[k] * theta_grid[j] / wavelength);
      acc += w[k] * (v * kernel + std::conj(v) * std::conj(kernel));
    }
    out.intensity[j] = acc.real();
    max_re = std::max(max_re, std::abs(acc.real()));
    max_im = std::max(max_im, std::abs(acc.imag()));
  }

  double total = 0.0;
  for (double v : out.intensity) total += v;
  if (!std::isfinite(total) || std::abs(total) < 1e-300)
    throw Error(ErrorKind::DegenerateGrid, "reconstructed intensity sums to zero on this grid");
  for (double& v : out.intensity) v /= total;
  out.max_imag_ratio = max_re > 0.0 ? max_im / max_re : 0.0;
  return out;
}

std::vector<std::size_t> find_peaks(const IntensityProfile& profile, double rel_threshold) {
  const auto& I = profile.intensity;
  std::vector<std::size_t> peaks;
  if (I.size() < 3) return peaks;
  const double top = *std::max_element(I.begin(), I.end());
  for (std::size_t j = 1; j + 1 < I.size(); ++j)
    if (I[j] >= rel_threshold * top && I[j] > I[j - 1] && I[j] >= I[j + 1]) peaks.push_back(j);
  return peaks;
}

double resolution(double B_m, double wavelength) {
  if (!(B_m > 0.0) || !(wavelength > 0.0))
    throw Error(ErrorKind::InvalidArgument, "baseline and wavelength must be > 0");
  return wavelength / (2.0 * B_m);
}

std::string_view regime_name(ErrorRegime regime) {
  return regime == ErrorRegime::PhaseLimited ? "phase-limited" : "amplitude-limited";
}

IntensityError intensity_error(double dV_a, double dV_p, double C, double xi) {
  if (dV_a < 0.0 || dV_p < 0.0) throw Error(ErrorKind::InvalidArgument, "errors must be nonnegative");
  IntensityError e;
  e.dI = std::hypot(dV_a, dV_p);
  e.scale = (C > 0.0 && xi > 0.0) ? std::sqrt(C * C + 1.0) / (C * std::sqrt(xi))
                                  : std::numeric_limits<double>::infinity();
  e.regime = C >= kPhaseLimitedConcurrence ? ErrorRegime::PhaseLimited : ErrorRegime::AmplitudeLimited;
  return e;
}

ImagingReport observe_and_image(const ImagingScenario& sc) {
  if (!sc.resource) throw Error(ErrorKind::InvalidArgument, "no resource factory");
  sc.rates.validate();
  const auto& bs = sc.plan.baselines();

  ImagingReport report;
  report.baselines.resize(bs.size());
  parallel_for(bs.size(), sc.threads, [&](std::size_t i) {
    BaselineRecord& rec = report.baselines[i];
    rec.B = bs[i];
    rec.V_true = true_visibility(sc.sky, rec.B);
    const XState x = sc.resource(rec.B);
    validate(x);
    rec.xi = subspace_weight(x);
    rec.estimate = run_observation(AstroVisibility::from_complex(rec.V_true), x, sc.settings, sc.n_per_setting,
                                   derive_seed(sc.seed, i));
    rec.C = rec.estimate.C_used;
    rec.R_M_norm = normalized_measurement_rate(rec.xi);
    rec.R_M = measurement_rate(rec.xi, sc.rates);
  });

  std::vector<VisibilitySample> exact, measured;
  exact.reserve(bs.size());
  measured.reserve(bs.size());
  double max_dVa = 0.0, max_dVp = 0.0;
  report.min_C = std::numeric_limits<double>::infinity();
  report.min_xi = std::numeric_limits<double>::infinity();
  for (const auto& rec : report.baselines) {
    exact.push_back({rec.B, rec.V_true, 0.0, 0.0});
    const auto& e = rec.estimate;
    measured.push_back({rec.B, std::polar(e.V_a_hat, e.V_p_hat), e.dV_a, e.dV_p});
    max_dVa = std::max(max_dVa, e.dV_a);
    max_dVp = std::max(max_dVp, e.dV_p);
    report.min_C = std::min(report.min_C, rec.C);
    report.min_xi = std::min(report.min_xi, rec.xi);
  }

  std::vector<double> grid = sc.theta_grid;
  report.resolution = resolution(sc.plan.max_baseline(), sc.sky.wavelength());
  if (grid.empty()) {
    double lo = sc.sky.sources().front().theta, hi = lo;
    for (const auto& s : sc.sky.sources()) {
      lo = std::min(lo, s.theta);
      hi = std::max(hi, s.theta);
    }
    grid = uniform_grid(lo - 4.0 * report.resolution, hi + 4.0 * report.resolution, 201);
  }
  if (exact.size() >= 2) {
    report.exact_image = reconstruct_intensity(exact, grid, sc.sky.wavelength());
    report.estimated_image = reconstruct_intensity(measured, grid, sc.sky.wavelength());
  }
  report.intensity = intensity_error(max_dVa, max_dVp, report.min_C, report.min_xi);
  report.low_confidence = sc.n_per_setting < kMinConfidentEvents;
  return report;
}

}  // namespace entbase
