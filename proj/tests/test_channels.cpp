#include "entbase/channels.hpp"
#include "entbase/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace entbase;

namespace {

double max_dev(const XState& a, const XState& b) {
  return (to_density_matrix(a).matrix() - to_density_matrix(b).matrix()).cwiseAbs().maxCoeff();
}

XState kraus_state(const ChannelParams& p) {
  const auto [L, R] = kraus_pair(p);
  return extract_xstate(apply_independent_channels(make_bell_psi(0.0), L, R));
}

}  // namespace

TEST_CASE("amplitude damping closed form") {
  const XState ideal = xstate_amplitude_damping(0.0, 0.0);
  CHECK(ideal.g == 0.5);
  CHECK(ideal.f == 0.5);
  CHECK(ideal.w_a == 0.5);

  const XState lost = xstate_amplitude_damping(1.0, 1.0);
  CHECK(lost.a == 1.0);
  CHECK(subspace_weight(lost) == 0.0);
  CHECK(lost.w_a == 0.0);

  const XState half = xstate_amplitude_damping(0.5, 0.5);
  CHECK(subspace_weight(half) == doctest::Approx(0.5));
  CHECK(concurrence_subspace(half) == doctest::Approx(1.0));

  // Frozen from the numpy Kraus oracle (tests/oracles/derive_values.py).
  const XState x = xstate_amplitude_damping(0.3, 0.6);
  CHECK(x.a == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(x.g == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(x.f == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(x.w_a == doctest::Approx(0.264575131106459).epsilon(1e-14));
}

TEST_CASE("dephasing closed form") {
  CHECK(max_dev(xstate_dephasing(0.0, 0.0), xstate_amplitude_damping(0.0, 0.0)) < kExactTol);
  const XState dead = xstate_dephasing(1.0, 0.4);
  CHECK(dead.w_a == 0.0);
  CHECK(subspace_weight(dead) == 1.0);
  CHECK(concurrence_subspace(dead) == 0.0);

  const XState half = xstate_dephasing(0.5, 0.5);
  CHECK(concurrence_subspace(half) == doctest::Approx(0.25));
  CHECK(xstate_dephasing(0.2, 0.7).w_a == doctest::Approx(0.12).epsilon(1e-14));
}

TEST_CASE("depolarizing closed form") {
  const auto ideal = xstate_depolarizing(0.0, 0.0);
  CHECK(ideal.x == 0.0);
  CHECK(ideal.state.w_a == 0.5);

  const auto full = xstate_depolarizing(1.0, 1.0);
  CHECK(full.x == doctest::Approx(2.0 / 9.0));
  CHECK(subspace_weight(full.state) == doctest::Approx(5.0 / 9.0));
  CHECK(full.state.w_a == doctest::Approx(1.0 / 18.0));

  const auto boundary = xstate_depolarizing(0.75, 0.0);
  CHECK(boundary.x == doctest::Approx(0.25));
  CHECK(boundary.state.w_a < kExactTol);
  CHECK(concurrence_subspace(boundary.state) < kExactTol);

  const auto frozen = xstate_depolarizing(0.7, 0.2);
  CHECK(frozen.state.a == doctest::Approx(0.23777777777777767).epsilon(1e-14));
  CHECK(frozen.state.g == doctest::Approx(0.26222222222222213).epsilon(1e-14));
  CHECK(frozen.state.w_a == doctest::Approx(0.02444444444444448).epsilon(1e-12));

  // One arm past the fully mixed point flips the coherence sign.
  const auto flipped = xstate_depolarizing(1.0, 0.0);
  CHECK(flipped.degenerate_coherence);
  CHECK(flipped.state.w_p == doctest::Approx(kPi));
  CHECK(max_dev(flipped.state, kraus_state(Depolarizing{1.0, 0.0})) < kExactTol);
}

TEST_CASE("closed forms agree with the Kraus oracle on 11x11 grids") {
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) {
      const double p = i / 10.0, q = j / 10.0;
      for (const ChannelParams& params :
           {ChannelParams(AmplitudeDamping{p, q}), ChannelParams(Dephasing{p, q}), ChannelParams(Depolarizing{p, q})})
        worst = std::max(worst, max_dev(resource_state(params), kraus_state(params)));
    }
  CHECK(worst <= kExactTol);
}

TEST_CASE("depolarizing x stays within [0, 1/3]") {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double x = depolarizing_x(i / 20.0, j / 20.0);
      CHECK(x >= 0.0);
      CHECK(x <= 1.0 / 3.0 + kExactTol);
    }
}

TEST_CASE("fiber and depolarizer parameter maps") {
  CHECK(fiber_loss_prob(0.0, 3.0) == 0.0);
  CHECK(fiber_loss_prob(3.0, 3.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(fiber_loss_prob(1e6, 3.0) == doctest::Approx(1.0));
  CHECK(depol_prob(0.0, 2.0) == 0.0);
  CHECK(depol_prob(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(depol_prob(1e6, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fiber_loss_prob(-1.0, 1.0), Error);
  CHECK_THROWS_AS(fiber_loss_prob(1.0, 0.0), Error);

  const AmplitudeDamping ad = FiberLink::equal_arms(4.0, 2.0).loss();
  CHECK(ad.lambda_L == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(ad.lambda_R == ad.lambda_L);

  const Depolarizing d = DepolarizingFiber{4.0, 0.5}.depolarization();
  CHECK(d.kappa_L == doctest::Approx(1.0 - std::exp(-1.0)));
}

TEST_CASE("memory dephasing") {
  const double tau = 2.0;
  CHECK(max_dev(memory_xstate(0.0, tau, BellSign::Plus), extract_xstate(make_bell_psi(0.0))) < kExactTol);
  CHECK(max_dev(memory_xstate(0.0, tau, BellSign::Minus), extract_xstate(make_bell_psi(kPi))) < kExactTol);
  CHECK(memory_xstate(tau * std::log(2.0), tau, BellSign::Plus).w_a == doctest::Approx(0.25));

  const XState late = memory_xstate(200.0 * tau, tau, BellSign::Plus);
  CHECK(late.w_a < 1e-12);
  CHECK(subspace_weight(late) == doctest::Approx(1.0));

  // Gamma_t on each half equals the Bell-diagonal mixture p psi + (1-p) psi'.
  for (double t : {0.0, 0.3, 1.0, 4.0}) {
    const auto gamma = memory_dephasing_channel(t, tau);
    const Matrix4c kraus = apply_independent_channels(make_bell_psi(0.0), gamma, gamma).matrix();
    const double p = memory_survival(t, tau);
    const Matrix4c mixture = p * make_bell_psi(0.0).matrix() + (1.0 - p) * make_bell_psi(kPi).matrix();
    CHECK((kraus - mixture).cwiseAbs().maxCoeff() <= kExactTol);
  }
}

TEST_CASE("entanglement swapping composes storage times") {
  const double tau = 1.3;
  CHECK(max_dev(swap_memories(0.0, 0.0, tau, BellSign::Minus), extract_xstate(make_bell_psi(kPi))) < kExactTol);
  const double t = tau * std::log(2.0);
  CHECK(swap_memories(t, t, tau, BellSign::Plus).w_a == doctest::Approx(0.125));
  for (double t1 : {0.0, 0.2, 0.9, 3.0})
    for (double t2 : {0.0, 0.1, 1.7})
      for (BellSign s : {BellSign::Plus, BellSign::Minus})
        CHECK(max_dev(swap_memories(t1, t2, tau, s), memory_xstate(t1 + t2, tau, s)) <= kExactTol);
  CHECK_THROWS_AS(swap_memories(-1.0, 0.0, tau, BellSign::Plus), Error);
}

TEST_CASE("measurement rates") {
  const RateModel r{0.8, 50.0};
  CHECK(measurement_rate(1.0, r) == doctest::Approx(20.0));
  CHECK(max_measurement_rate(r) == doctest::Approx(20.0));
  CHECK(measurement_rate(0.0, r) == 0.0);
  CHECK(normalized_measurement_rate(5.0 / 9.0) == doctest::Approx(5.0 / 18.0));
  CHECK_THROWS_AS(measurement_rate(0.5, RateModel{1.5, 1.0}), Error);
  CHECK_THROWS_AS(measurement_rate(0.5, RateModel{0.5, 0.0}), Error);
}

TEST_CASE("fiber log-rate law") {
  const RateModel r{1.0, 10.0};
  const double L0 = 2.5;
  CHECK(log_rate_fiber(0.0, L0, r) == doctest::Approx(std::log(5.0)));
  CHECK(log_rate_fiber(2.0 * L0, L0, r) - log_rate_fiber(0.0, L0, r) == doctest::Approx(-1.0));
  for (double B : {0.0, 1.0, 4.0, 9.0, 15.0}) {
    const AmplitudeDamping ad = FiberLink::equal_arms(B, L0).loss();
    const double direct = std::log(measurement_rate(subspace_weight(xstate_amplitude_damping(ad.lambda_L, ad.lambda_R)), r));
    CHECK(std::abs(log_rate_fiber(B, L0, r) - direct) <= 1e-12);
  }
  const double h = 1e-4, B = 3.0;
  const double fd = (log_rate_fiber(B + h, L0, r) - log_rate_fiber(B - h, L0, r)) / (2 * h);
  CHECK(fd == doctest::Approx(-1.0 / (2.0 * L0)).epsilon(1e-8));
}

TEST_CASE("depolarizing log-rate expansion") {
  const RateModel r{1.0, 1.0};
  const auto far = log_rate_depol_approx(1e4, 1.0, r);
  CHECK(far.valid);
  CHECK(far.value == doctest::Approx(std::log(0.5) + std::log(5.0 / 9.0)));

  const auto mid = log_rate_depol_approx(10.0, 1.0, r);
  CHECK(mid.valid);
  CHECK(std::abs(mid.value - log_rate_depol_exact(10.0, 1.0, r)) <= 0.01);
  // Frozen numpy values for beta L = 10.
  CHECK(log_rate_depol_exact(10.0, 1.0, r) == doctest::Approx(-1.2862657525603332).epsilon(1e-13));
  CHECK(mid.value == doctest::Approx(-1.2863242030613327).epsilon(1e-13));

  CHECK_FALSE(log_rate_depol_approx(0.0, 1.0, r).valid);
  CHECK(std::exp(log_rate_depol_exact(60.0, 1.0, r)) == doctest::Approx(5.0 / 18.0).epsilon(1e-9));
}

TEST_CASE("rates never increase with loss") {
  const RateModel r{1.0, 1.0};
  double prev_ad = 1.0, prev_de = 1.0, prev_dp = 1.0;
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    const double ad = measurement_rate(subspace_weight(xstate_amplitude_damping(p, 0.2)), r);
    const double de = measurement_rate(subspace_weight(xstate_dephasing(p, 0.2)), r);
    const double dp = measurement_rate(subspace_weight(xstate_depolarizing(p, 0.2).state), r);
    CHECK(ad <= prev_ad + kExactTol);
    CHECK(de <= prev_de + kExactTol);
    CHECK(dp <= prev_dp + kExactTol);
    prev_ad = ad;
    prev_de = de;
    prev_dp = dp;
  }
}
