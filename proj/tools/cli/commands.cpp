#include "cli/commands.hpp"

#include "cli/config.hpp"
#include "entbase/error.hpp"
#include "entbase/parallel.hpp"
#include "entbase/validation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace entbase::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// 17 significant digits so that identical doubles give identical bytes.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidState, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::InvalidState, "write failed for " + path.string());
}

fs::path output_dir(const ScenarioConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = opt.output ? *opt.output : fs::path(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::InvalidState, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

// Shared error-to-exit-code mapping for all verbs.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<double> theta_grid_of(const ScenarioConfig& cfg) {
  if (!cfg.theta_grid) return {};
  return uniform_grid(cfg.theta_grid->min, cfg.theta_grid->max, cfg.theta_grid->count);
}

std::string visibility_csv(const ImagingReport& r) {
  std::ostringstream os;
  os << "B,V_true_re,V_true_im,V_a_true,V_p_true,V_a_hat,V_p_hat,dV_a,dV_p,n_c_1,n_ac_1,n_c_2,n_ac_2,xi,C,"
        "R_M_norm,R_M\n";
  for (const auto& b : r.baselines) {
    const auto& e = b.estimate;
    os << num(b.B) << ',' << num(b.V_true.real()) << ',' << num(b.V_true.imag()) << ',' << num(std::abs(b.V_true))
       << ',' << num(std::arg(b.V_true)) << ',' << num(e.V_a_hat) << ',' << num(e.V_p_hat) << ',' << num(e.dV_a)
       << ',' << num(e.dV_p) << ',' << e.counts[0].n_c << ',' << e.counts[0].n_ac << ',' << e.counts[1].n_c << ','
       << e.counts[1].n_ac << ',' << num(b.xi) << ',' << num(b.C) << ',' << num(b.R_M_norm) << ',' << num(b.R_M)
       << '\n';
  }
  return os.str();
}

std::string intensity_csv(const ImagingReport& r) {
  std::ostringstream os;
  os << "theta,I_exact,I_estimated\n";
  for (std::size_t j = 0; j < r.exact_image.theta.size(); ++j)
    os << num(r.exact_image.theta[j]) << ',' << num(r.exact_image.intensity[j]) << ','
       << num(r.estimated_image.intensity[j]) << '\n';
  return os.str();
}

json summary_json(const ScenarioConfig& cfg, const ImagingReport& r) {
  double max_dVa = 0.0, max_dVp = 0.0;
  for (const auto& b : r.baselines) {
    max_dVa = std::max(max_dVa, b.estimate.dV_a);
    max_dVp = std::max(max_dVp, b.estimate.dV_p);
  }
  const double inf = std::numeric_limits<double>::infinity();
  ScalingLaw scale{inf, inf, true};
  if (cfg.rates.R_E > 0.0) scale = scaling_from_resource(r.min_C, r.min_xi, cfg.rates.R_E);

  json peaks = json::array();
  if (!r.estimated_image.theta.empty())
    for (std::size_t j : find_peaks(r.estimated_image)) peaks.push_back(r.estimated_image.theta[j]);

  json s;
  s["channel"] = cfg.channel.kind;
  s["xi"] = r.min_xi;
  s["C"] = r.min_C;
  s["R_M_norm"] = normalized_measurement_rate(r.min_xi);
  s["R_M"] = measurement_rate(r.min_xi, cfg.rates);
  s["dVa_scale"] = finite_or_null(scale.dV_a_scale);
  s["dVp_scale"] = finite_or_null(scale.dV_p_scale);
  s["dI_scale"] = finite_or_null(r.intensity.scale);
  s["dI"] = r.intensity.dI;
  s["error_regime"] = std::string(regime_name(r.intensity.regime));
  s["max_dV_a"] = max_dVa;
  s["max_dV_p"] = max_dVp;
  s["resolution"] = r.resolution;
  s["n_baselines"] = r.baselines.size();
  s["N_per_setting"] = cfg.n_per_setting;
  s["seed"] = cfg.seed;
  s["low_confidence"] = r.low_confidence;
  s["max_imag_ratio"] = r.estimated_image.max_imag_ratio;
  s["estimated_peaks"] = peaks;

  // Resource density matrix at the longest baseline as rows of [re, im].
  const Matrix4c rho = to_density_matrix(make_resource_factory(cfg.channel)(cfg.baselines.back())).matrix();
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back({rho(i, j).real(), rho(i, j).imag()});
    rows.push_back(row);
  }
  s["resource_rho_at_B_max"] = rows;
  return s;
}

std::string run_gnuplot_script() {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set terminal pngcairo size 900,600\n"
         "set output 'intensity.png'\n"
         "set xlabel 'theta [rad]'\n"
         "set ylabel 'normalized intensity'\n"
         "plot 'intensity.csv' using 1:2 with lines, '' using 1:3 with lines\n"
         "set output 'visibility.png'\n"
         "set xlabel 'baseline B'\n"
         "set ylabel 'visibility amplitude'\n"
         "plot 'visibility.csv' using 1:4 with lines, '' using 1:6:8 with yerrorbars\n";
}

std::string sweep_gnuplot_script(const std::string& param, bool monte_carlo) {
  std::string s = "set datafile separator ','\n"
                  "set key autotitle columnhead\n"
                  "set terminal pngcairo size 900,600\n"
                  "set output 'sweep_rate.png'\n"
                  "set xlabel '" + param + "'\n"
                  "set ylabel 'R_M / (R_E R_T)'\n"
                  "plot 'sweep.csv' using 1:4 with linespoints\n";
  if (monte_carlo)
    s += "set output 'sweep_rmse.png'\n"
         "set logscale xy\n"
         "set ylabel 'RMSE'\n"
         "plot 'sweep.csv' using 1:7 with linespoints, '' using 1:8 with linespoints\n";
  return s;
}

struct SweepPoint {
  double B = 0.0;
  std::int64_t N = 1;
  ResourceFactory resource;
};

SweepPoint sweep_point(const ScenarioConfig& cfg, const std::string& param, double value) {
  SweepPoint p;
  p.B = cfg.baselines.back();
  p.N = cfg.n_per_setting;
  ChannelConfig ch = cfg.channel;

  if (param == "B" || param == "L") {
    if (!(value >= 0.0)) throw ConfigError("--values", "baselines must be >= 0");
    p.B = value;
  } else if (param == "N" || param == "N_per_setting") {
    if (!(value >= 1.0) || value != std::floor(value) || value > 9e15)
      throw ConfigError("--values", "N_per_setting values must be integers >= 1");
    p.N = static_cast<std::int64_t>(value);
  } else if (param == "lambda" || param == "mu" || param == "kappa") {
    ch.params[param + "_L"] = value;
    ch.params[param + "_R"] = value;
  } else if (param == "tau_c" || param == "t1" || param == "t2" || param == "L0" || param == "beta" ||
             param == "C" || param.rfind("lambda_", 0) == 0 || param.rfind("mu_", 0) == 0 ||
             param.rfind("kappa_", 0) == 0) {
    ch.params[param] = value;
  } else {
    throw ConfigError("--param", "unknown sweep parameter \"" + param + "\"");
  }
  validate_channel(ch);
  if (ch.kind == "custom_rate" && (p.B < ch.table.front().first || p.B > ch.table.back().first))
    throw ConfigError("--values", "baseline " + num(p.B) + " is outside the custom_rate table range");
  p.resource = make_resource_factory(ch);
  return p;
}

}  // namespace

unsigned threads_from_env() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENTBASE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw ConfigError("ENTBASE_THREADS", "expected a positive integer");
    n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("--values", "empty entry in value list");
    const std::string tok = item.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v)) throw ConfigError("--values", "\"" + tok + "\" is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values", "no values given");
  return out;
}

int cmd_run(const fs::path& config, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = load_config(config);
    ImagingScenario sc{SkyModel(cfg.sources, cfg.wavelength),
                       BaselinePlan(cfg.baselines),
                       make_resource_factory(cfg.channel),
                       PhaseSettings(cfg.w1, cfg.w2),
                       cfg.n_per_setting,
                       cfg.seed,
                       theta_grid_of(cfg),
                       cfg.rates,
                       opt.threads};
    if (sc.plan.size() < 2) throw ConfigError("baselines", "imaging needs at least two baselines");
    const ImagingReport report = observe_and_image(sc);

    const fs::path dir = output_dir(cfg, opt);
    write_file(dir / "visibility.csv", visibility_csv(report));
    write_file(dir / "intensity.csv", intensity_csv(report));
    write_file(dir / "summary.json", summary_json(cfg, report).dump(2) + "\n");
    if (opt.gnuplot) write_file(dir / "plot.gp", run_gnuplot_script());

    out << "channel " << cfg.channel.kind << ": xi=" << num(report.min_xi) << " C=" << num(report.min_C)
        << " resolution=" << num(report.resolution) << '\n';
    if (report.low_confidence)
      out << "warning: N_per_setting < " << kMinConfidentEvents << "; error bars are low-confidence\n";
    out << "wrote " << (dir / "visibility.csv").string() << ", intensity.csv, summary.json\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const fs::path& config, const std::string& param, const std::string& values,
              const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = load_config(config);
    const std::vector<double> vals = parse_value_list(values);
    std::vector<SweepPoint> points;
    for (double v : vals) points.push_back(sweep_point(cfg, param, v));
    const SkyModel sky(cfg.sources, cfg.wavelength);
    const PhaseSettings ph(cfg.w1, cfg.w2);

    struct Row {
      double xi = 0.0, C = 0.0, rate_norm = 0.0, rate = 0.0;
      double rmse_a = std::numeric_limits<double>::quiet_NaN();
      double rmse_p = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Row> rows(points.size());
    std::vector<XState> states(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      states[i] = points[i].resource(points[i].B);
      Row& r = rows[i];
      r.xi = subspace_weight(states[i]);
      r.C = r.xi > 1e-15 ? concurrence_subspace(states[i]) : std::numeric_limits<double>::quiet_NaN();
      r.rate_norm = normalized_measurement_rate(r.xi);
      r.rate = measurement_rate(r.xi, cfg.rates);
    }

    if (cfg.monte_carlo) {
      const std::size_t reps = cfg.monte_carlo->replicates;
      std::vector<double> err_a(points.size() * reps), err_p(points.size() * reps);
      parallel_for(points.size() * reps, opt.threads, [&](std::size_t k) {
        const std::size_t i = k / reps, rep = k % reps;
        if (!(rows[i].C > 0.0)) return;
        const AstroVisibility v = cfg.monte_carlo->V_a
                                      ? AstroVisibility(*cfg.monte_carlo->V_a, *cfg.monte_carlo->V_p)
                                      : AstroVisibility::from_complex(true_visibility(sky, points[i].B));
        const auto e = run_observation(v, states[i], ph, points[i].N, derive_seed(derive_seed(cfg.seed, i), rep));
        err_a[k] = e.V_a_hat - v.amplitude();
        err_p[k] = wrap_phase(e.V_p_hat - v.phase());
      });
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(rows[i].C > 0.0)) continue;
        double sa = 0.0, sp = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
          sa += err_a[i * reps + rep] * err_a[i * reps + rep];
          sp += err_p[i * reps + rep] * err_p[i * reps + rep];
        }
        rows[i].rmse_a = std::sqrt(sa / static_cast<double>(reps));
        rows[i].rmse_p = std::sqrt(sp / static_cast<double>(reps));
      }
    }

    std::ostringstream csv;
    csv << param << ",xi,C,R_M_norm,ln_R_M,log10_R_M";
    if (cfg.monte_carlo) csv << ",rmse_V_a,rmse_V_p";
    csv << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      csv << num(vals[i]) << ',' << num(r.xi) << ',' << num(r.C) << ',' << num(r.rate_norm) << ','
          << num(std::log(r.rate)) << ',' << num(std::log10(r.rate));
      if (cfg.monte_carlo) csv << ',' << num(r.rmse_a) << ',' << num(r.rmse_p);
      csv << '\n';
    }

    const fs::path dir = output_dir(cfg, opt);
    write_file(dir / "sweep.csv", csv.str());
    if (opt.gnuplot) write_file(dir / "sweep.gp", sweep_gnuplot_script(param, cfg.monte_carlo.has_value()));
    out << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(bool fast, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SuiteOptions so;
    so.fast = fast;
    so.threads = opt.threads;
    const auto results = run_invariant_suite(so);
    std::size_t failed = 0;
    for (const auto& r : results) {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      if (!r.passed) ++failed;
    }
    out << results.size() - failed << "/" << results.size() << " invariants passed"
        << (fast ? " (Monte Carlo checks skipped)" : "") << '\n';
    return failed == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitRuntime);
  });
}

}  // namespace entbase::cli
