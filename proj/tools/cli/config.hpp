#pragma once

#include "entbase/channels.hpp"
#include "entbase/imaging.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace entbase::cli {

/// Invalid scenario configuration. `key` is the dotted path of the
/// offending entry, e.g. "channel.kappa_L".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("invalid config: " + key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ChannelConfig {
  std::string kind = "ideal";
  std::map<std::string, double> params;  // numeric parameters by config key
  BellSign sign = BellSign::Plus;        // memory_swap only
  std::vector<std::pair<double, double>> table;  // custom_rate: (B, R_M_norm)
};

struct ThetaGrid {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct MonteCarloConfig {
  std::size_t replicates = 200;
  std::optional<double> V_a;
  std::optional<double> V_p;
};

struct ScenarioConfig {
  std::vector<PointSource> sources;
  double wavelength = 0.0;
  std::vector<double> baselines;
  ChannelConfig channel;
  double w1 = 0.0;
  double w2 = kPi / 2.0;
  std::int64_t n_per_setting = 0;
  RateModel rates;
  std::uint64_t seed = 0;
  std::string output = "out";
  std::optional<ThetaGrid> theta_grid;
  std::optional<MonteCarloConfig> monte_carlo;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Range and consistency checks for a channel block; also used after a
/// sweep rewrites one parameter.
void validate_channel(const ChannelConfig& channel);

/// Resource X-state as a function of baseline for the configured channel.
ResourceFactory make_resource_factory(const ChannelConfig& channel);

}  // namespace entbase::cli
