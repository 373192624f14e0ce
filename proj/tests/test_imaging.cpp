#include "entbase/error.hpp"
#include "entbase/imaging.hpp"

#include <doctest.h>

#include <cmath>

using namespace entbase;

namespace {

std::vector<VisibilitySample> exact_samples(const SkyModel& sky, const BaselinePlan& plan) {
  std::vector<VisibilitySample> out;
  for (double B : plan.baselines()) out.push_back({B, true_visibility(sky, B)});
  return out;
}

XState ideal(double) { return extract_xstate(make_bell_psi(0.0)); }

}  // namespace

TEST_CASE("sky model validation") {
  CHECK_THROWS_AS(SkyModel({{0.2, 1.0}}, 1.0), Error);
  CHECK_THROWS_AS(SkyModel({{0.0, -1.0}}, 1.0), Error);
  CHECK_THROWS_AS(SkyModel({{0.0, 0.0}}, 1.0), Error);
  CHECK_THROWS_AS(SkyModel({{0.0, 1.0}}, 0.0), Error);
  CHECK(SkyModel::two_point(0.02, 1.0).total_flux() == 2.0);
}

TEST_CASE("baseline plans") {
  const BaselinePlan p = BaselinePlan::linear(10.0, 4);
  CHECK(p.baselines() == std::vector<double>{2.5, 5.0, 7.5, 10.0});
  CHECK_THROWS_AS(BaselinePlan({1.0, 1.0}), Error);
  CHECK_THROWS_AS(BaselinePlan({0.0, 1.0}), Error);
  CHECK_THROWS_AS(BaselinePlan::linear(1.0, 0), Error);
}

TEST_CASE("forward visibilities") {
  const double lambda = 5e-7;
  const SkyModel one({{1e-7, 3.0}}, lambda);
  const Complex v = true_visibility(one, 40.0);
  CHECK(std::abs(v) == doctest::Approx(1.0));
  CHECK(std::arg(v) == doctest::Approx(wrap_phase(-2 * kPi * 40.0 * 1e-7 / lambda)));

  const double sep = 2e-7;
  const SkyModel two = SkyModel::two_point(sep, lambda);
  for (double B : {0.0, 0.3, 1.0, 2.2}) {
    const Complex w = true_visibility(two, B);
    CHECK(w.real() == doctest::Approx(std::cos(kPi * B * sep / lambda)));
    CHECK(std::abs(w.imag()) < 1e-12);
  }
  CHECK(std::abs(true_visibility(two, lambda / (2 * sep))) < 1e-12);
  CHECK(true_visibility(two, lambda / (4 * sep)).real() == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("resolution and intensity error") {
  CHECK(resolution(1.0, 1.0) == 0.5);
  CHECK(resolution(2.0, 1.0) == 0.25);
  CHECK(resolution(100.0, 500e-9) == doctest::Approx(2.5e-9));

  CHECK(intensity_error(0.02, 0.0, 0.5, 0.5).dI == doctest::Approx(0.02));
  const IntensityError ideal_err = intensity_error(0.01, 0.01, 1.0, 1.0);
  CHECK(ideal_err.scale == doctest::Approx(std::sqrt(2.0)));
  CHECK(ideal_err.regime == ErrorRegime::PhaseLimited);
  const IntensityError weak = intensity_error(0.1, 0.01, 1e-9, 1.0);
  CHECK(weak.scale > 1e8);
  CHECK(weak.regime == ErrorRegime::AmplitudeLimited);
  CHECK(std::isinf(intensity_error(0.1, 0.1, 0.0, 1.0).scale));
}

TEST_CASE("reconstruction of a single and a double source") {
  const auto grid = uniform_grid(-0.02, 0.02, 81);
  const SkyModel center({{0.0, 1.0}}, 1.0);
  const auto single = reconstruct_intensity(exact_samples(center, BaselinePlan::linear(200.0, 64)), grid, 1.0);
  const auto sp = find_peaks(single);
  REQUIRE(sp.size() == 1);
  CHECK(single.theta[sp[0]] == doctest::Approx(0.0).epsilon(1e-12));

  const double sep = 0.01;
  const SkyModel two = SkyModel::two_point(sep, 1.0);
  const auto img = reconstruct_intensity(exact_samples(two, BaselinePlan::linear(4.0 / (2 * sep), 64)), grid, 1.0);
  const auto peaks = find_peaks(img);
  REQUIRE(peaks.size() == 2);
  const double cell = grid[1] - grid[0];
  CHECK(std::abs(img.theta[peaks[0]] + sep / 2) <= cell);
  CHECK(std::abs(img.theta[peaks[1]] - sep / 2) <= cell);
  CHECK(img.max_imag_ratio <= 1e-12);

  double sum = 0.0;
  for (double v : img.intensity) sum += v;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("resolvability threshold") {
  const double sep = 0.01;
  const SkyModel two = SkyModel::two_point(sep, 1.0);
  const auto grid = uniform_grid(-2 * sep, 2 * sep, 81);
  const double threshold = 1.0 / (2 * sep);
  auto count = [&](double factor) {
    return find_peaks(reconstruct_intensity(exact_samples(two, BaselinePlan::linear(factor * threshold, 64)), grid, 1.0))
        .size();
  };
  CHECK(count(0.5) == 1);
  CHECK(count(2.0) == 2);
}

TEST_CASE("reconstruction input validation") {
  const std::vector<VisibilitySample> one{{1.0, Complex(1.0, 0.0)}};
  const auto grid = uniform_grid(-1.0, 1.0, 11);
  CHECK_THROWS_AS(reconstruct_intensity(one, grid, 1.0), Error);
  const std::vector<VisibilitySample> two{{1.0, Complex(1.0, 0.0)}, {2.0, Complex(1.0, 0.0)}};
  const std::vector<double> bad_grid{0.0, 0.0, 1.0};
  try {
    reconstruct_intensity(two, bad_grid, 1.0);
    FAIL("expected DegenerateGrid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateGrid);
  }
  CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 5), Error);
}

TEST_CASE("observe_and_image") {
  const double sep = 0.01;
  ImagingScenario sc{SkyModel::two_point(sep, 1.0), BaselinePlan::linear(2.0 / sep, 64), ideal};
  sc.n_per_setting = 1000000;
  sc.seed = 4;
  sc.theta_grid = uniform_grid(-2 * sep, 2 * sep, 81);
  sc.threads = 4;
  const ImagingReport r = observe_and_image(sc);
  CHECK(r.baselines.size() == 64);
  CHECK(r.min_C == 1.0);
  CHECK(r.min_xi == doctest::Approx(1.0));
  CHECK_FALSE(r.low_confidence);
  CHECK(find_peaks(r.estimated_image) == find_peaks(r.exact_image));

  sc.threads = 1;
  const ImagingReport serial = observe_and_image(sc);
  for (std::size_t i = 0; i < r.baselines.size(); ++i) {
    CHECK(serial.baselines[i].estimate.V_a_hat == r.baselines[i].estimate.V_a_hat);
    CHECK(serial.baselines[i].estimate.V_p_hat == r.baselines[i].estimate.V_p_hat);
  }

  sc.n_per_setting = 1;
  const ImagingReport tiny = observe_and_image(sc);
  CHECK(tiny.low_confidence);
}

TEST_CASE("fiber channel rates follow the exponential law per baseline") {
  const double L0 = 3.0;
  ImagingScenario sc{SkyModel::two_point(0.01, 1.0), BaselinePlan::linear(6.0 * L0, 12), [L0](double B) {
                       const AmplitudeDamping ad = FiberLink::equal_arms(B, L0).loss();
                       return xstate_amplitude_damping(ad.lambda_L, ad.lambda_R);
                     }};
  sc.n_per_setting = 10000;
  sc.rates = {1.0, 100.0};
  const ImagingReport r = observe_and_image(sc);
  for (const auto& b : r.baselines) CHECK(std::abs(std::log(b.R_M) - log_rate_fiber(b.B, L0, sc.rates)) <= 1e-12);
}

TEST_CASE("noisy reconstruction converges to the exact one") {
  const double sep = 0.01;
  const auto grid = uniform_grid(-2 * sep, 2 * sep, 81);
  ImagingScenario sc{SkyModel::two_point(sep, 1.0), BaselinePlan::linear(2.0 / sep, 64), ideal};
  sc.theta_grid = grid;
  sc.threads = 4;
  auto mean_distance = [&](std::int64_t N) {
    sc.n_per_setting = N;
    double total = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      sc.seed = s;
      const ImagingReport r = observe_and_image(sc);
      double d = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j)
        d += std::pow(r.estimated_image.intensity[j] - r.exact_image.intensity[j], 2);
      total += std::sqrt(d);
    }
    return total / 20.0;
  };
  const double d1 = mean_distance(10000), d4 = mean_distance(40000);
  CHECK(d1 / d4 == doctest::Approx(2.0).epsilon(0.3));
}
