#include "cli/commands.hpp"
#include "cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace entbase::cli;

  CLI::App app{"entbase: entanglement-assisted interferometry simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool gnuplot = false;

  auto* run = app.add_subcommand("run", "Simulate one observation and reconstruct the image");
  run->add_option("config", config, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Override the config's output directory");
  run->add_flag("--gnuplot", gnuplot, "Also write a gnuplot script next to the CSVs");

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Tabulate rates and estimator errors over one parameter");
  sweep->add_option("config", config, "Scenario JSON file")->required();
  sweep->add_option("--param", param, "Parameter to vary (B, L, N, lambda, mu, kappa or a channel key)")->required();
  sweep->add_option("--values", values, "Comma-separated list of values")->required();
  sweep->add_option("--out", out_dir, "Override the config's output directory");
  sweep->add_flag("--gnuplot", gnuplot, "Also write a gnuplot script next to sweep.csv");

  bool fast = false;
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_flag("--fast", fast, "Skip Monte Carlo invariants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  CommandOptions opt;
  try {
    opt.threads = threads_from_env();
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  opt.gnuplot = gnuplot;
  if (!out_dir.empty()) opt.output = out_dir;

  if (*run) return cmd_run(config, opt, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(config, param, values, opt, std::cout, std::cerr);
  return cmd_validate(fast, opt, std::cout, std::cerr);
}
