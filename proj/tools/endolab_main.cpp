#include "endolab/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for perturbed toral endomorphisms"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, out_set = false;
  int workers = 1;

  const char* scenarios[] = {"spectrum",     "periodic",  "conjugacy",
                             "specialness",  "holonomy",  "quasi-isometry",
                             "thmB-scan",    "report",    "fixtures"};
  for (const char* name : scenarios) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--out", out_dir, "override the output directory")
        ->each([&](const std::string&) { out_set = true; });
    sub->add_option("--workers", workers, "worker threads");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    endolab::ExperimentConfig cfg = endolab::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (out_set) cfg.out_dir = out_dir;

    std::string name = app.get_subcommands().front()->get_name();
    endolab::ScenarioResult res = endolab::run_scenario(name, cfg, workers);
    for (const auto& line : res.lines) std::cout << line << "\n";
    return res.status;
  } catch (const endolab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
