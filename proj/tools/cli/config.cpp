#include "cli/config.hpp"

#include "entbase/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace entbase::cli {

using nlohmann::json;

namespace {

std::string show(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "required key is missing");
  return obj.at(key);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
  return d;
}

std::int64_t integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(key, "expected an integer");
}

void in_range(double v, double lo, double hi, const std::string& key) {
  if (!(v >= lo && v <= hi)) throw ConfigError(key, show(v) + " is outside [" + show(lo) + "," + show(hi) + "]");
}

void positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key, show(v) + " must be > 0");
}

std::vector<PointSource> parse_sky(const json& sky) {
  if (!sky.is_object()) throw ConfigError("sky", "expected an object");
  reject_unknown(sky, "sky", {"sources"});
  const json& list = require(sky, "sky", "sources");
  if (!list.is_array() || list.empty()) throw ConfigError("sky.sources", "expected a non-empty array");
  std::vector<PointSource> out;
  double total = 0.0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "sky.sources[" + std::to_string(i) + "]";
    const json& s = list[i];
    if (!s.is_object()) throw ConfigError(path, "expected an object");
    reject_unknown(s, path, {"theta", "flux"});
    PointSource p;
    p.theta = number(require(s, path, "theta"), path + ".theta");
    p.flux = number(require(s, path, "flux"), path + ".flux");
    in_range(p.theta, -0.1, 0.1, path + ".theta");
    if (p.flux < 0.0) throw ConfigError(path + ".flux", "must be >= 0");
    total += p.flux;
    out.push_back(p);
  }
  if (!(total > 0.0)) throw ConfigError("sky.sources", "total flux must be > 0");
  return out;
}

std::vector<double> parse_baselines(const json& b) {
  std::vector<double> out;
  if (b.is_array()) {
    for (std::size_t i = 0; i < b.size(); ++i) out.push_back(number(b[i], "baselines[" + std::to_string(i) + "]"));
  } else if (b.is_object()) {
    reject_unknown(b, "baselines", {"B_max", "count", "spacing"});
    const double B_max = number(require(b, "baselines", "B_max"), "baselines.B_max");
    positive(B_max, "baselines.B_max");
    const std::int64_t count = integer(require(b, "baselines", "count"), "baselines.count");
    if (count < 1 || count > 4096) throw ConfigError("baselines.count", "must be in [1, 4096]");
    if (b.contains("spacing") && b.at("spacing") != "linear")
      throw ConfigError("baselines.spacing", "only \"linear\" is supported");
    out = BaselinePlan::linear(B_max, static_cast<std::size_t>(count)).baselines();
  } else {
    throw ConfigError("baselines", "expected an array or {B_max, count, spacing}");
  }
  if (out.empty()) throw ConfigError("baselines", "at least one baseline is required");
  for (std::size_t i = 0; i < out.size(); ++i) {
    positive(out[i], "baselines[" + std::to_string(i) + "]");
    if (i > 0 && !(out[i] > out[i - 1]))
      throw ConfigError("baselines[" + std::to_string(i) + "]", "baselines must be strictly increasing");
  }
  return out;
}

// Numeric keys accepted per channel kind.
const std::map<std::string, std::vector<std::string>>& channel_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"ideal", {}},
      {"amplitude_damping", {"lambda_L", "lambda_R", "L0"}},
      {"dephasing", {"mu_L", "mu_R"}},
      {"depolarizing", {"kappa_L", "kappa_R", "beta"}},
      {"memory_swap", {"tau_c", "t1", "t2"}},
      {"custom_rate", {"C"}},
  };
  return keys;
}

ChannelConfig parse_channel(const json& c) {
  if (!c.is_object()) throw ConfigError("channel", "expected an object");
  const json& kind_v = require(c, "channel", "kind");
  if (!kind_v.is_string()) throw ConfigError("channel.kind", "expected a string");
  ChannelConfig ch;
  ch.kind = kind_v.get<std::string>();
  const auto it = channel_keys().find(ch.kind);
  if (it == channel_keys().end()) throw ConfigError("channel.kind", "unknown channel kind \"" + ch.kind + "\"");

  for (const auto& [key, value] : c.items()) {
    if (key == "kind") continue;
    const std::string path = "channel." + key;
    if (ch.kind == "memory_swap" && key == "sign") {
      if (value == "+") ch.sign = BellSign::Plus;
      else if (value == "-") ch.sign = BellSign::Minus;
      else throw ConfigError(path, "expected \"+\" or \"-\"");
      continue;
    }
    if (ch.kind == "custom_rate" && key == "table") {
      if (!value.is_array()) throw ConfigError(path, "expected an array of [B, R_M_norm] pairs");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string row = path + "[" + std::to_string(i) + "]";
        if (!value[i].is_array() || value[i].size() != 2) throw ConfigError(row, "expected [B, R_M_norm]");
        ch.table.emplace_back(number(value[i][0], row), number(value[i][1], row));
      }
      continue;
    }
    const auto& allowed = it->second;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(path, "unknown key for channel kind \"" + ch.kind + "\"");
    ch.params[key] = number(value, path);
  }
  validate_channel(ch);
  return ch;
}

double param(const ChannelConfig& ch, const std::string& key, double fallback) {
  const auto it = ch.params.find(key);
  return it == ch.params.end() ? fallback : it->second;
}

bool has(const ChannelConfig& ch, const std::string& key) { return ch.params.count(key) > 0; }

}  // namespace

void validate_channel(const ChannelConfig& ch) {
  const auto it = channel_keys().find(ch.kind);
  if (it == channel_keys().end()) throw ConfigError("channel.kind", "unknown channel kind \"" + ch.kind + "\"");
  for (const auto& [key, value] : ch.params)
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
      throw ConfigError("channel." + key, "unknown key for channel kind \"" + ch.kind + "\"");

  auto exclusive = [&](const char* fiber_key, std::initializer_list<const char*> arm_keys) {
    if (!has(ch, fiber_key)) return;
    for (const char* k : arm_keys)
      if (has(ch, k)) throw ConfigError(std::string("channel.") + k, std::string("conflicts with ") + fiber_key);
  };

  if (ch.kind == "amplitude_damping") {
    exclusive("L0", {"lambda_L", "lambda_R"});
    if (has(ch, "L0")) positive(ch.params.at("L0"), "channel.L0");
    for (const char* k : {"lambda_L", "lambda_R"})
      if (has(ch, k)) in_range(ch.params.at(k), 0.0, 1.0, std::string("channel.") + k);
  } else if (ch.kind == "dephasing") {
    for (const char* k : {"mu_L", "mu_R"})
      if (has(ch, k)) in_range(ch.params.at(k), 0.0, 1.0, std::string("channel.") + k);
  } else if (ch.kind == "depolarizing") {
    exclusive("beta", {"kappa_L", "kappa_R"});
    if (has(ch, "beta")) positive(ch.params.at("beta"), "channel.beta");
    for (const char* k : {"kappa_L", "kappa_R"})
      if (has(ch, k)) in_range(ch.params.at(k), 0.0, 1.0, std::string("channel.") + k);
  } else if (ch.kind == "memory_swap") {
    if (!has(ch, "tau_c")) throw ConfigError("channel.tau_c", "required key is missing");
    positive(ch.params.at("tau_c"), "channel.tau_c");
    for (const char* k : {"t1", "t2"})
      if (has(ch, k) && !(ch.params.at(k) >= 0.0)) throw ConfigError(std::string("channel.") + k, "must be >= 0");
  } else if (ch.kind == "custom_rate") {
    in_range(param(ch, "C", 1.0), 0.0, 1.0, "channel.C");
    if (ch.table.size() < 2) throw ConfigError("channel.table", "at least two [B, R_M_norm] rows are required");
    for (std::size_t i = 0; i < ch.table.size(); ++i) {
      const std::string row = "channel.table[" + std::to_string(i) + "]";
      if (ch.table[i].first < 0.0) throw ConfigError(row, "baseline must be >= 0");
      if (i > 0 && !(ch.table[i].first > ch.table[i - 1].first))
        throw ConfigError(row, "baselines must be strictly increasing");
      in_range(ch.table[i].second, 0.0, 0.5, row);
    }
  }
}

ResourceFactory make_resource_factory(const ChannelConfig& ch) {
  validate_channel(ch);
  if (ch.kind == "ideal") return [](double) { return extract_xstate(make_bell_psi(0.0)); };

  if (ch.kind == "amplitude_damping") {
    if (has(ch, "L0")) {
      const double L0 = ch.params.at("L0");
      return [L0](double B) {
        const AmplitudeDamping ad = FiberLink::equal_arms(B, L0).loss();
        return xstate_amplitude_damping(ad.lambda_L, ad.lambda_R);
      };
    }
    const XState x = xstate_amplitude_damping(param(ch, "lambda_L", 0.0), param(ch, "lambda_R", 0.0));
    return [x](double) { return x; };
  }

  if (ch.kind == "dephasing") {
    const XState x = xstate_dephasing(param(ch, "mu_L", 0.0), param(ch, "mu_R", 0.0));
    return [x](double) { return x; };
  }

  if (ch.kind == "depolarizing") {
    if (has(ch, "beta")) {
      const double beta = ch.params.at("beta");
      return [beta](double B) {
        const Depolarizing d = DepolarizingFiber{B, beta}.depolarization();
        return xstate_depolarizing(d.kappa_L, d.kappa_R).state;
      };
    }
    const XState x = xstate_depolarizing(param(ch, "kappa_L", 0.0), param(ch, "kappa_R", 0.0)).state;
    return [x](double) { return x; };
  }

  if (ch.kind == "memory_swap") {
    const XState x = swap_memories(param(ch, "t1", 0.0), param(ch, "t2", 0.0), ch.params.at("tau_c"), ch.sign);
    return [x](double) { return x; };
  }

  // custom_rate: a resource with the tabulated subspace weight and the given
  // subspace concurrence, interpolated linearly in B.
  const double C = param(ch, "C", 1.0);
  const auto table = ch.table;
  return [C, table](double B) {
    if (B < table.front().first || B > table.back().first) {
      throw Error(ErrorKind::InvalidArgument,
                  "baseline " + show(B) + " is outside the custom_rate table range");
    }
    auto hi = std::upper_bound(table.begin(), table.end(), B,
                               [](double b, const std::pair<double, double>& row) { return b < row.first; });
    if (hi == table.end()) --hi;
    const auto lo = std::prev(hi);
    const double t = (B - lo->first) / (hi->first - lo->first);
    const double rate = lo->second + t * (hi->second - lo->second);
    const double xi = std::clamp(2.0 * rate, 0.0, 1.0);
    XState x;
    x.a = 1.0 - xi;
    x.g = x.f = xi / 2.0;
    x.w_a = C * xi / 2.0;
    return x;
  };
}

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"sky", "wavelength", "baselines", "channel", "phase_settings", "N_per_setting", "rates",
                           "seed", "output", "theta_grid", "monte_carlo"});
  ScenarioConfig cfg;
  cfg.sources = parse_sky(require(doc, "", "sky"));
  cfg.wavelength = number(require(doc, "", "wavelength"), "wavelength");
  positive(cfg.wavelength, "wavelength");
  cfg.baselines = parse_baselines(require(doc, "", "baselines"));
  cfg.channel = parse_channel(require(doc, "", "channel"));

  if (doc.contains("phase_settings")) {
    const json& ph = doc.at("phase_settings");
    if (!ph.is_object()) throw ConfigError("phase_settings", "expected an object");
    reject_unknown(ph, "phase_settings", {"w1", "w2"});
    cfg.w1 = number(require(ph, "phase_settings", "w1"), "phase_settings.w1");
    cfg.w2 = number(require(ph, "phase_settings", "w2"), "phase_settings.w2");
    if (std::abs(std::sin(cfg.w2 - cfg.w1)) < 1e-6)
      throw ConfigError("phase_settings.w2", "settings differ by a multiple of pi (DegeneratePhases)");
  }

  cfg.n_per_setting = integer(require(doc, "", "N_per_setting"), "N_per_setting");
  if (cfg.n_per_setting < 1) throw ConfigError("N_per_setting", "must be >= 1");

  if (doc.contains("rates")) {
    const json& r = doc.at("rates");
    if (!r.is_object()) throw ConfigError("rates", "expected an object");
    reject_unknown(r, "rates", {"R_E", "R_T"});
    cfg.rates.R_E = number(require(r, "rates", "R_E"), "rates.R_E");
    cfg.rates.R_T = number(require(r, "rates", "R_T"), "rates.R_T");
    in_range(cfg.rates.R_E, 0.0, 1.0, "rates.R_E");
    positive(cfg.rates.R_T, "rates.R_T");
  }

  const json& seed = require(doc, "", "seed");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
    throw ConfigError("seed", "expected a nonnegative integer");
  cfg.seed = seed.get<std::uint64_t>();

  if (doc.contains("output")) {
    if (!doc.at("output").is_string() || doc.at("output").get<std::string>().empty())
      throw ConfigError("output", "expected a non-empty directory path");
    cfg.output = doc.at("output").get<std::string>();
  }

  if (doc.contains("theta_grid")) {
    const json& g = doc.at("theta_grid");
    if (!g.is_object()) throw ConfigError("theta_grid", "expected an object");
    reject_unknown(g, "theta_grid", {"min", "max", "count"});
    ThetaGrid tg;
    tg.min = number(require(g, "theta_grid", "min"), "theta_grid.min");
    tg.max = number(require(g, "theta_grid", "max"), "theta_grid.max");
    const std::int64_t n = integer(require(g, "theta_grid", "count"), "theta_grid.count");
    if (!(tg.max > tg.min)) throw ConfigError("theta_grid.max", "must exceed theta_grid.min");
    if (n < 3 || n > 100000) throw ConfigError("theta_grid.count", "must be in [3, 100000]");
    tg.count = static_cast<std::size_t>(n);
    cfg.theta_grid = tg;
  }

  if (doc.contains("monte_carlo")) {
    const json& m = doc.at("monte_carlo");
    if (!m.is_object()) throw ConfigError("monte_carlo", "expected an object");
    reject_unknown(m, "monte_carlo", {"replicates", "V_a", "V_p"});
    MonteCarloConfig mc;
    if (m.contains("replicates")) {
      const std::int64_t r = integer(m.at("replicates"), "monte_carlo.replicates");
      if (r < 2 || r > 1000000) throw ConfigError("monte_carlo.replicates", "must be in [2, 1000000]");
      mc.replicates = static_cast<std::size_t>(r);
    }
    if (m.contains("V_a")) {
      mc.V_a = number(m.at("V_a"), "monte_carlo.V_a");
      in_range(*mc.V_a, 0.0, 1.0, "monte_carlo.V_a");
    }
    if (m.contains("V_p")) mc.V_p = number(m.at("V_p"), "monte_carlo.V_p");
    if (mc.V_a.has_value() != mc.V_p.has_value())
      throw ConfigError(mc.V_a ? "monte_carlo.V_p" : "monte_carlo.V_a", "V_a and V_p must be given together");
    cfg.monte_carlo = mc;
  }

  if (cfg.channel.kind == "custom_rate") {
    const auto& t = cfg.channel.table;
    for (std::size_t i = 0; i < cfg.baselines.size(); ++i)
      if (cfg.baselines[i] < t.front().first || cfg.baselines[i] > t.back().first)
        throw ConfigError("baselines[" + std::to_string(i) + "]", "outside the custom_rate table range");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace entbase::cli
