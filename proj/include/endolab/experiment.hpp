#pragma once

#include "endolab/conjugacy.hpp"
#include "endolab/foliation.hpp"
#include "endolab/lyapunov.hpp"
#include "endolab/periodic.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace endolab {

/// One shear move as declared in the config; the direction selector is
/// resolved against the model's splitting at build time.
struct MoveConfig {
  std::string direction;  // "su-eigvec" | "axis:k"
  double amplitude = 0.0;
  TrigPoly modulator;
};

/// Flat experiment description. One document per experiment; all
/// tolerances live in the thresholds block, the mandatory seed makes runs
/// reproducible, and the hash of the raw document is stamped into every
/// output.
struct ExperimentConfig {
  nlohmann::json raw;
  std::uint64_t hash = 0;

  // model block
  IntMatrix matrix;
  std::string kind = "none";  // none | shear-chain | manufactured | generic
  std::vector<MoveConfig> moves;
  TrigDisplacement bump, eta;
  double epsilon = 0.0;

  // run block
  std::uint64_t seed = 0;
  int orbits = 8;
  long steps = 20000;
  long burn_in = 1000;
  int grid = 64;
  std::vector<int> grids;        // refinement ladder for conjugacy
  std::vector<int> periods{1, 2, 3};
  int points = 50;
  int chain_len = 60;
  int chains = 12;
  long samples = 200000;
  int bins = 8;
  int pair_count = 4000;
  double segment_length = 20.0;
  double leaf_step = 1e-3;
  double transversal_len = 0.2;
  int holonomy_samples = 16;
  std::vector<double> wu_offsets{0.1, 0.2, 0.4};
  std::vector<double> amplitudes_a, amplitudes_b;
  int holder_kmin = 4, holder_kmax = 10;
  int holder_bases = 24;
  std::string expect = "none";  // none | special | nonspecial | transfer | ac | non-ac

  // thresholds block (always positive, defaults pinned here)
  std::map<std::string, double> thresholds;

  // output block
  std::string out_dir = "out";

  double threshold(const std::string& name) const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& doc);
std::uint64_t config_hash(const nlohmann::json& doc);

EndomorphismModel build_model(const ExperimentConfig& cfg);
/// Same model with the two shear amplitudes replaced (thmB scan cells).
EndomorphismModel build_model_with_amplitudes(const ExperimentConfig& cfg,
                                              double ea, double eb);

struct ScenarioResult {
  int status = 0;  // 0 pass, 2 assertion failure, 3 numerical, 4 config
  std::vector<std::string> lines;  // human-readable summary, also logged
};

/// Runs one named scenario, writing CSV tables and a manifest under
/// cfg.out_dir. Known names: spectrum, periodic, conjugacy, specialness,
/// holonomy, quasi-isometry, thmB-scan, report, fixtures.
ScenarioResult run_scenario(const std::string& name,
                            const ExperimentConfig& cfg, int workers = 1);

/// Recomputes every derived fixture value from its oracle and writes a
/// deterministic manifest; throws OracleMismatch if an existing manifest
/// in the output directory disagrees.
ScenarioResult regenerate_fixtures(const ExperimentConfig& cfg);

}  // namespace endolab
