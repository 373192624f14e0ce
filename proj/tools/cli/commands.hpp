#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace entbase::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

struct CommandOptions {
  unsigned threads = 1;
  bool gnuplot = false;
  std::optional<std::filesystem::path> output;  // overrides the config's output directory
};

/// Worker count: hardware concurrency, capped by ENTBASE_THREADS when set.
/// Throws ConfigError for a malformed value.
unsigned threads_from_env();

/// Parses "a,b,c" into numbers. Throws ConfigError naming --values.
std::vector<double> parse_value_list(const std::string& text);

int cmd_run(const std::filesystem::path& config, const CommandOptions& options, std::ostream& out,
            std::ostream& err);

int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::string& values,
              const CommandOptions& options, std::ostream& out, std::ostream& err);

int cmd_validate(bool fast, const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace entbase::cli
