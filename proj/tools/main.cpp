#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "tchedge/config.hpp"
#include "tchedge/error.hpp"
#include "tchedge/runner.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> paths;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config (YAML)")->required();
  cmd->add_option("--seed", o.seed, "override the config seed");
  cmd->add_option("--out", o.out, "override the output directory");
  cmd->add_option("--paths", o.paths, "override the Monte Carlo size");
}

tchedge::ExperimentConfig load(const Overrides& o) {
  auto c = tchedge::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output = *o.out;
  if (o.paths) {
    if (*o.paths < 2) throw tchedge::ConfigError("--paths: need at least 2 paths");
    c.paths = *o.paths;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case hedging under time-changed noise"};
  app.require_subcommand(1);
  Overrides o;
  std::size_t sweep = 1;
  auto* simulate = app.add_subcommand("simulate", "simulate paths and write paths.csv");
  auto* hedge = app.add_subcommand("hedge", "run the hedging pipeline and write a summary");
  auto* risk = app.add_subcommand("risk", "estimate the risk measure over the scenario family");
  auto* validate = app.add_subcommand("validate", "run the property suites");
  for (auto* cmd : {simulate, hedge, risk, validate}) add_common(cmd, o);
  validate->add_option("--seeds", sweep, "number of consecutive seeds to sweep")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const auto config = load(o);
    tchedge::RunOutput out;
    if (simulate->parsed()) out = tchedge::run_simulate(config);
    if (hedge->parsed()) out = tchedge::run_hedge(config);
    if (risk->parsed()) out = tchedge::run_risk(config);
    if (validate->parsed()) out = tchedge::run_validate(config, sweep);
    for (const auto& f : out.files) std::cout << f.string() << '\n';
    if (validate->parsed() && !out.summary.value("passed", false)) {
      std::cerr << "validation failed\n";
      return 1;
    }
    return 0;
  } catch (const tchedge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
