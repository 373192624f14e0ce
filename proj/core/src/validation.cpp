#include "entbase/validation.hpp"

#include "entbase/channels.hpp"
#include "entbase/error.hpp"
#include "entbase/imaging.hpp"
#include "entbase/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace entbase {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

double max_abs_diff(const Matrix4c& a, const Matrix4c& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<double> grid01(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
  return g;
}

XState random_xstate(std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  double p[4];
  double sum = 0.0;
  for (double& v : p) sum += (v = expo(rng));
  XState x;
  x.a = p[0] / sum;
  x.g = p[1] / sum;
  x.f = p[2] / sum;
  x.h = 1.0 - x.a - x.g - x.f;
  x.w_a = unit(rng) * std::sqrt(x.g * x.f);
  x.w_p = angle(rng);
  x.z_a = unit(rng) * std::sqrt(std::max(0.0, x.a * x.h));
  x.z_p = angle(rng);
  return x;
}

Matrix4c random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4c g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = Complex(n(rng), n(rng));
  Matrix4c rho = g * g.adjoint();
  return rho / rho.trace().real();
}

KrausChannel channel_of(int family, double p) {
  switch (family) {
    case 0: return kraus_amplitude_damping(p);
    case 1: return kraus_dephasing(p);
    default: return kraus_depolarizing(p);
  }
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

class Suite {
 public:
  explicit Suite(const SuiteOptions& opt) : opt_(opt) {}

  void add(std::string name, bool passed, std::string detail) {
    results_.push_back({std::move(name), passed, std::move(detail)});
  }

  // Runs a check body, converting an escaped exception into a failure.
  template <class F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, std::string("threw: ") + e.what());
    }
  }

  void qcore_checks() {
    guarded("qcore.kraus_completeness", [&] {
      double worst = 0.0;
      for (double p : grid01(21))
        for (int fam = 0; fam < 3; ++fam) worst = std::max(worst, channel_of(fam, p).completeness_error());
      add("qcore.kraus_completeness", worst <= kExactTol, fmt("max |sum K^dag K - I| = %.3g", worst));
    });

    guarded("qcore.channel_trace_psd", [&] {
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::uniform_int_distribution<int> fam(0, 2);
      double tr = 0.0, herm = 0.0, eig = 1.0;
      for (int k = 0; k < 100; ++k) {
        const DensityMatrix4 rho(random_density(rng));
        const auto L = channel_of(fam(rng), unit(rng));
        const auto R = channel_of(fam(rng), unit(rng));
        const auto d = apply_independent_channels(rho, L, R).diagnostics();
        tr = std::max(tr, d.trace_error);
        herm = std::max(herm, d.hermitian_error);
        eig = std::min(eig, d.min_eigenvalue);
      }
      add("qcore.channel_trace_psd", tr <= kExactTol && herm <= kExactTol && eig >= kPsdFloor,
          fmt("max trace error %.3g, min eigenvalue %.3g", tr, eig));
    });

    guarded("qcore.xform_closure", [&] {
      const DensityMatrix4 bell = make_bell_psi(0.0);
      int failures = 0;
      for (int fl = 0; fl < 3; ++fl)
        for (int fr = 0; fr < 3; ++fr)
          for (double pl : grid01(5))
            for (double pr : grid01(5)) {
              try {
                (void)extract_xstate(apply_independent_channels(bell, channel_of(fl, pl), channel_of(fr, pr)));
              } catch (const NotXFormError&) {
                ++failures;
              }
            }
      add("qcore.xform_closure", failures == 0, fmt("%.0f of 225 channel pairs left X form", failures));
    });

    guarded("qcore.concurrence_monotone", [&] {
      add("qcore.ideal_concurrence", concurrence_subspace(extract_xstate(make_bell_psi(0.0))) == 1.0,
          "C(psi+) == 1");
      bool ok = true;
      const auto g = grid01(21);
      for (int fam = 0; fam < 3; ++fam) {
        double prev = 2.0;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {  // lambda = 1 has xi = 0
          // Past kappa = 3/4 the Pauli channel overshoots the fully mixed
          // state and coherence returns with flipped sign.
          if (fam == 2 && g[i] > 0.75) break;
          const XState x = fam == 0   ? xstate_amplitude_damping(g[i], g[i])
                           : fam == 1 ? xstate_dephasing(g[i], g[i])
                                      : xstate_depolarizing(g[i], g[i]).state;
          const double C = concurrence_subspace(x);
          ok = ok && C <= prev + kParamTol;
          prev = C;
        }
      }
      add("qcore.concurrence_monotone", ok, "equal-arm grids for lambda, mu in [0,1) and kappa in [0,3/4]");
    });
  }

  void channel_checks() {
    guarded("channels.closed_form_oracle", [&] {
      const DensityMatrix4 bell = make_bell_psi(0.0);
      double worst = 0.0;
      const auto g = grid01(11);
      for (int fam = 0; fam < 3; ++fam)
        for (double pl : g)
          for (double pr : g) {
            ChannelParams params = fam == 0   ? ChannelParams(AmplitudeDamping{pl, pr})
                                   : fam == 1 ? ChannelParams(Dephasing{pl, pr})
                                              : ChannelParams(Depolarizing{pl, pr});
            const auto [L, R] = kraus_pair(params);
            const Matrix4c oracle = apply_independent_channels(bell, L, R).matrix();
            worst = std::max(worst, max_abs_diff(to_density_matrix(resource_state(params)).matrix(), oracle));
          }
      add("channels.closed_form_oracle", worst <= kExactTol, fmt("max entry deviation %.3g", worst));
    });

    guarded("channels.depolarizing_x_bound", [&] {
      bool ok = true;
      for (double kl : grid01(21))
        for (double kr : grid01(21)) {
          const double x = depolarizing_x(kl, kr);
          ok = ok && x >= -kExactTol && x <= 1.0 / 3.0 + kExactTol;
        }
      add("channels.depolarizing_x_bound", ok, "0 <= x <= 1/3 on a 21x21 kappa grid");
    });

    guarded("channels.memory_superoperator", [&] {
      double worst = 0.0;
      for (BellSign sign : {BellSign::Plus, BellSign::Minus}) {
        const DensityMatrix4 bell = make_bell_psi(sign == BellSign::Plus ? 0.0 : kPi);
        for (double t : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
          const auto gamma = memory_dephasing_channel(t, 1.0);
          const Matrix4c via_kraus = apply_independent_channels(bell, gamma, gamma).matrix();
          worst = std::max(worst, max_abs_diff(via_kraus, to_density_matrix(memory_xstate(t, 1.0, sign)).matrix()));
        }
      }
      add("channels.memory_superoperator", worst <= kExactTol, fmt("max entry deviation %.3g", worst));
    });

    guarded("channels.swap_composition", [&] {
      double worst = 0.0;
      const double times[] = {0.0, 0.05, 0.3, 1.0, 2.5};
      for (BellSign sign : {BellSign::Plus, BellSign::Minus})
        for (double t1 : times)
          for (double t2 : times) {
            const Matrix4c a = to_density_matrix(swap_memories(t1, t2, 0.7, sign)).matrix();
            const Matrix4c b = to_density_matrix(memory_xstate(t1 + t2, 0.7, sign)).matrix();
            worst = std::max(worst, max_abs_diff(a, b));
          }
      add("channels.swap_composition", worst <= kExactTol, fmt("max entry deviation %.3g", worst));
    });

    guarded("channels.rate_monotone", [&] {
      const RateModel rates{1.0, 1.0};
      bool ok = true;
      const auto g = grid01(21);
      for (int fam = 0; fam < 3; ++fam) {
        double prev = 1.0;
        for (double p : g) {
          const XState x = fam == 0   ? xstate_amplitude_damping(p, 0.3)
                           : fam == 1 ? xstate_dephasing(p, 0.3)
                                      : xstate_depolarizing(p, 0.3).state;
          const double r = measurement_rate(subspace_weight(x), rates);
          ok = ok && r <= prev + kExactTol;
          prev = r;
        }
      }
      add("channels.rate_monotone", ok, "R_M non-increasing in each loss parameter");
    });

    guarded("channels.fiber_rate_slope", [&] {
      const RateModel rates{0.5, 3.0};
      const double L0 = 1.5;
      std::vector<double> B, y;
      for (int i = 0; i <= 60; ++i) {
        B.push_back(6.0 * L0 * i / 60.0);
        y.push_back(log_rate_fiber(B.back(), L0, rates));
      }
      const double err = std::abs(slope(B, y) + 1.0 / (2.0 * L0));
      add("channels.fiber_rate_slope", err <= 1e-9, fmt("slope error %.3g", err));
    });

    guarded("channels.depolarizing_asymptote", [&] {
      const RateModel rates{1.0, 1.0};
      double worst = 0.0;
      for (double bl : {40.0, 60.0, 100.0}) {
        const double r = std::exp(log_rate_depol_exact(bl, 1.0, rates));
        worst = std::max(worst, std::abs(r - 5.0 / 18.0));
      }
      add("channels.depolarizing_asymptote", worst <= 1e-6, fmt("max |R_M - 5/18| = %.3g", worst));
    });
  }

  void protocol_checks() {
    guarded("protocol.closed_form_oracle", [&] {
      std::mt19937_64 rng(22);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::uniform_real_distribution<double> angle(-kPi, kPi);
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const AstroVisibility v(unit(rng), angle(rng));
        const XState x = random_xstate(rng);
        const RawProbabilities a = opt_.closed_form(v, x);
        const RawProbabilities b = raw_probabilities_oracle(make_astro_state(v), to_density_matrix(x));
        worst = std::max({worst, std::abs(a.q_c - b.q_c), std::abs(a.q_ac - b.q_ac)});
      }
      add("protocol.closed_form_oracle", worst <= kExactTol, fmt("max |q - q_oracle| = %.3g", worst));
    });

    guarded("protocol.normalization", [&] {
      std::mt19937_64 rng(23);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::uniform_real_distribution<double> angle(-kPi, kPi);
      double raw = 0.0, post = 0.0;
      for (int k = 0; k < 100; ++k) {
        const AstroVisibility v(unit(rng), angle(rng));
        const XState x = random_xstate(rng);
        const RawProbabilities q = opt_.closed_form(v, x);
        raw = std::max(raw, std::abs(q.q_c + q.q_ac - subspace_weight(x) / 2.0));
        const Postselected p = postselect(q);
        post = std::max(post, std::abs(p.p_c + p.p_ac - 1.0));
      }
      add("protocol.normalization", raw <= kExactTol && post == 0.0,
          fmt("max |q_c + q_ac - xi/2| = %.3g, max |p_c + p_ac - 1| = %.3g", raw, post));
    });

    guarded("protocol.round_trip", [&] {
      std::mt19937_64 rng(24);
      std::uniform_real_distribution<double> unit(0.05, 1.0);
      std::uniform_real_distribution<double> angle(-kPi, kPi);
      double worst = 0.0;
      const PhaseSettings ph = PhaseSettings::quadrature();
      for (int k = 0; k < 100; ++k) {
        const AstroVisibility v(unit(rng), angle(rng));
        XState x = random_xstate(rng);
        x.w_a = std::max(x.w_a, 0.2 * std::sqrt(x.g * x.f));
        double dp[2];
        for (int i = 0; i < 2; ++i) {
          XState s = x;
          s.w_p += ph[i];
          dp[i] = analytic_delta_p(v, s);
        }
        const VisibilityEstimate e = estimate_from_delta_p(dp[0], dp[1], x, ph, 1000);
        worst = std::max({worst, std::abs(e.V_a_hat - v.amplitude()),
                          std::abs(wrap_phase(e.V_p_hat - v.phase()))});
      }
      add("protocol.round_trip", worst <= kExactTol, fmt("max recovery error %.3g", worst));
    });

    guarded("protocol.jacobian_fd", [&] {
      std::mt19937_64 rng(25);
      std::uniform_real_distribution<double> amp(0.2, 0.9);
      std::uniform_real_distribution<double> angle(-kPi, kPi);
      double worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const double C = amp(rng);
        const PhaseSettings ph(angle(rng), angle(rng) + 2.0);
        const double Va = amp(rng), Vp = angle(rng);
        const double dp1 = Va * C * std::cos(Vp - ph.w1());
        const double dp2 = Va * C * std::cos(Vp - ph.w2());
        const ErrorJacobian j = error_jacobian(dp1, dp2, ph, C);

        auto phase_at = [&](double a, double b) { return solve_visibility(a, b, ph, C).phase; };
        const double h1 = 1e-6 * std::max(std::abs(dp1), 1e-3);
        const double h2 = 1e-6 * std::max(std::abs(dp2), 1e-3);
        const double fd1 = wrap_phase(phase_at(dp1 + h1, dp2) - phase_at(dp1 - h1, dp2)) / (2 * h1);
        const double fd2 = wrap_phase(phase_at(dp1, dp2 + h2) - phase_at(dp1, dp2 - h2)) / (2 * h2);

        const double w = ph[j.reference_setting];
        const double dp = j.reference_setting == 0 ? dp1 : dp2;
        const double hd = 1e-6 * std::abs(dp);
        const double hv = 1e-6;
        const double fda = (amplitude_from_setting(dp + hd, Vp, w, C) - amplitude_from_setting(dp - hd, Vp, w, C)) /
                           (2 * hd);
        const double fdv = (amplitude_from_setting(dp, Vp + hv, w, C) - amplitude_from_setting(dp, Vp - hv, w, C)) /
                           (2 * hv);
        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); };
        worst = std::max({worst, rel(j.dVp_ddp1, fd1), rel(j.dVp_ddp2, fd2), rel(j.dVa_ddp, fda),
                          rel(j.dVa_dVp, fdv)});
      }
      add("protocol.jacobian_fd", worst <= 1e-6, fmt("max relative deviation %.3g", worst));
    });

    if (opt_.fast) return;

    guarded("protocol.fringe_bound", [&] {
      const XState x = xstate_amplitude_damping(0.3, 0.5);
      const double C = concurrence_subspace(x);
      const AstroVisibility v(0.8, 0.4);
      bool ok = true;
      for (std::int64_t N : {10, 1000, 100000})
        for (std::uint64_t s = 0; s < 100; ++s) {
          const auto e = run_observation(v, x, PhaseSettings::quadrature(), N, s);
          for (const auto& c : e.counts)
            ok = ok && std::abs(delta_p(c)) <= v.amplitude() * C + 5.0 / std::sqrt(static_cast<double>(N));
        }
      add("protocol.fringe_bound", ok, "|dp| <= V_a C + 5/sqrt(N) for every sampled run");
    });

    guarded("protocol.rmse_slope", [&] {
      const XState x = xstate_dephasing(0.2, 0.2);
      const AstroVisibility v(0.6, 1.0);
      const std::vector<std::int64_t> Ns = {1000, 10000, 100000};
      const int seeds = 200;
      std::vector<double> lx, ly;
      for (std::int64_t N : Ns) {
        std::vector<double> sq(seeds);
        parallel_for(seeds, opt_.threads, [&](std::size_t s) {
          const auto e = run_observation(v, x, PhaseSettings::quadrature(), N, derive_seed(N, s));
          sq[s] = (e.V_a_hat - v.amplitude()) * (e.V_a_hat - v.amplitude());
        });
        double mean = 0.0;
        for (double q : sq) mean += q / seeds;
        lx.push_back(std::log(static_cast<double>(N)));
        ly.push_back(0.5 * std::log(mean));
      }
      const double k = slope(lx, ly);
      add("protocol.rmse_slope", std::abs(k + 0.5) <= 0.05, fmt("log-log slope %.4f", k));
    });
  }

  void imaging_checks() {
    guarded("imaging.flux_normalization", [&] {
      std::mt19937_64 rng(31);
      std::uniform_real_distribution<double> pos(-0.05, 0.05);
      std::uniform_real_distribution<double> flux(0.1, 2.0);
      std::uniform_int_distribution<int> count(1, 5);
      double over = 0.0, single = 0.0;
      for (int k = 0; k < 50; ++k) {
        std::vector<PointSource> src(count(rng));
        for (auto& s : src) s = {pos(rng), flux(rng)};
        const SkyModel sky(src, 1.0);
        for (double B = 0.0; B < 200.0; B += 7.3) {
          const double m = std::abs(true_visibility(sky, B));
          over = std::max(over, m - 1.0);
          if (src.size() == 1) single = std::max(single, std::abs(m - 1.0));
        }
      }
      add("imaging.flux_normalization", over <= kExactTol && single <= kExactTol,
          fmt("max |V| - 1 = %.3g, single-source deviation %.3g", over, single));
    });

    guarded("imaging.hermitian", [&] {
      const SkyModel sky({{-0.01, 1.0}, {0.004, 0.5}, {0.02, 0.7}}, 1.0);
      std::vector<VisibilitySample> samples;
      const BaselinePlan plan = BaselinePlan::linear(120.0, 48);
      for (double B : plan.baselines()) samples.push_back({B, true_visibility(sky, B)});
      const auto grid = uniform_grid(-0.05, 0.05, 201);
      const auto img = reconstruct_intensity(samples, grid, 1.0);
      add("imaging.hermitian", img.max_imag_ratio <= kExactTol, fmt("max |Im|/max |Re| = %.3g", img.max_imag_ratio));
    });

    guarded("imaging.fidelity_monotone", [&] {
      // Gaussian extended source rendered as a dense comb of point sources.
      const double sigma = 0.01;
      std::vector<PointSource> src;
      for (int i = -80; i <= 80; ++i) {
        const double t = i * 0.0005;
        src.push_back({t, std::exp(-0.5 * t * t / (sigma * sigma))});
      }
      const SkyModel sky(src, 1.0);
      const auto grid = uniform_grid(-4 * sigma, 4 * sigma, 161);
      std::vector<double> truth(grid.size());
      double tsum = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) tsum += truth[j] = std::exp(-0.5 * grid[j] * grid[j] / (sigma * sigma));
      for (double& t : truth) t /= tsum;

      std::vector<double> errs;
      for (int octave = 0; octave < 4; ++octave) {
        const std::size_t n = 10u << octave;
        std::vector<VisibilitySample> samples;
        const BaselinePlan plan = BaselinePlan::linear(25.0 * (1 << octave), n);
        for (double B : plan.baselines())
          samples.push_back({B, true_visibility(sky, B)});
        const auto img = reconstruct_intensity(samples, grid, 1.0);
        double e = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) e += std::pow(img.intensity[j] - truth[j], 2);
        errs.push_back(std::sqrt(e));
      }
      bool ok = true;
      for (std::size_t i = 1; i < errs.size(); ++i) ok = ok && errs[i] <= errs[i - 1] + kExactTol;
      add("imaging.fidelity_monotone", ok, fmt("L2 error %.3g at B_m, %.3g at 8 B_m", errs.front(), errs.back()));
    });

    guarded("imaging.resolvability", [&] {
      const double sep = 0.01;
      const SkyModel sky = SkyModel::two_point(sep, 1.0);
      const auto grid = uniform_grid(-2 * sep, 2 * sep, 81);
      auto peaks_at = [&](double factor) {
        std::vector<VisibilitySample> samples;
        const BaselinePlan plan = BaselinePlan::linear(factor / (2 * sep), 64);
        for (double B : plan.baselines())
          samples.push_back({B, true_visibility(sky, B)});
        return find_peaks(reconstruct_intensity(samples, grid, 1.0)).size();
      };
      const auto lo = peaks_at(0.5), hi = peaks_at(2.0);
      add("imaging.resolvability", lo == 1 && hi == 2,
          fmt("%.0f peak(s) at 0.5x threshold, %.0f at 2x", static_cast<double>(lo), static_cast<double>(hi)));
    });
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const SuiteOptions& opt_;
  std::vector<CheckResult> results_;
};

}  // namespace

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options) {
  Suite suite(options);
  suite.qcore_checks();
  suite.channel_checks();
  suite.protocol_checks();
  suite.imaging_checks();
  return suite.take();
}

}  // namespace entbase
