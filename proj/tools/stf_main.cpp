#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace stf::cli;
  CLI::App app{"stf: stationary symmetric alpha-stable fields over countable groups"};
  app.set_version_flag("--version", std::string("stf ") + kVersion);
  app.require_subcommand(1, 1);

  Overrides flags;
  std::string config, out;
  std::uint64_t seed = 0;
  int workers = 1;
  static const std::map<std::string, std::string> help{
      {"gross", "Gross-criterion averages over Folner sets or balls"},
      {"mpns", "Maharam-extension return masses of a base set"},
      {"truncation", "audit the three truncation inequalities"},
      {"fmix", "Monte Carlo F-mixing estimate (seeded)"},
      {"boundary-decay", "exact A(K, o, g) masses on the free-group boundary"},
      {"cond-suff", "ball averages of the boundary sufficient condition"},
      {"bms", "BMS masses and translation invariance"},
      {"cond-suff2", "ball averages of the geodesic-flow sufficient condition"},
      {"walk", "random-walk hitting frequencies against PS masses (seeded)"},
      {"simulate", "LePage-series samples of the field (seeded)"},
      {"audit", "cocycle, Maharam and stationarity audits of every built-in"},
      {"report", "aggregate manifests in --out against ground truth"}};
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "master seed (u64)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_flag("--strict", flags.strict, "exit 3 when any verdict is inconclusive");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) flags.config_path = config;
  if (sub->count("--out")) flags.out = out;
  if (sub->count("--seed")) flags.seed = seed;
  if (sub->count("--workers")) flags.workers = workers;

  ExperimentConfig cfg;
  try {
    cfg = load_config(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return run(sub->get_name(), cfg, std::cerr);
}
