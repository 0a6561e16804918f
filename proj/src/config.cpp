#include "endolab/experiment.hpp"

#include <fstream>

namespace endolab {

using nlohmann::json;

std::uint64_t config_hash(const json& doc) {
  // FNV-1a over the canonical (sorted-key) dump
  std::string s = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

TrigPoly parsePoly(const json& j, int dim, const std::string& where) {
  TrigPoly p;
  p.dim = dim;
  if (!j.contains("terms") || !j["terms"].is_array())
    throw ConfigError(where + ": expected a terms array");
  for (const auto& t : j["terms"]) {
    TrigTerm term;
    auto freq = t.at("freq");
    if (static_cast<int>(freq.size()) != dim)
      throw ConfigError(where + ": freq length must equal the dimension");
    for (int k = 0; k < dim; ++k) term.freq[static_cast<size_t>(k)] = freq[static_cast<size_t>(k)].get<int>();
    term.c = t.value("cos", 0.0);
    term.s = t.value("sin", 0.0);
    p.terms.push_back(term);
  }
  return p;
}

TrigDisplacement parseDisplacement(const json& j, int dim,
                                   const std::string& where) {
  TrigDisplacement d;
  d.dim = dim;
  if (!j.contains("components") || static_cast<int>(j["components"].size()) != dim)
    throw ConfigError(where + ": expected " + std::to_string(dim) + " components");
  int i = 0;
  for (const auto& comp : j["components"]) {
    d.comps.push_back(parsePoly(comp, dim, where + ".components[" + std::to_string(i) + "]"));
    ++i;
  }
  return d;
}

void applyDefaults(std::map<std::string, double>& t) {
  auto put = [&](const char* k, double v) {
    if (!t.count(k)) t[k] = v;
  };
  put("linear_spectrum", 1e-10);
  put("det_identity", 1e-9);
  put("log_degree", 1e-8);
  put("volume_rel", 1e-8);
  put("volume_violation_rel", 1e-6);
  put("stable_pin", 1e-3);
  put("periodic_stable", 1e-8);
  put("sum_sigma", 3.0);
  put("conj_residual", 1e-6);
  put("conj_order", 1.8);
  put("special_variance", 1e-10);
  put("generic_variance", 1e-4);
  put("qi_drift", 0.1);
  put("linear_exact", 1e-10);
  put("holonomy_linear", 1e-8);
  put("frame_invariance", 1e-8);
}

}  // namespace

double ExperimentConfig::threshold(const std::string& name) const {
  auto it = thresholds.find(name);
  if (it == thresholds.end())
    throw ConfigError("thresholds." + name + " is not defined");
  return it->second;
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  cfg.raw = doc;
  cfg.hash = config_hash(doc);

  if (!doc.contains("model")) throw ConfigError("model: block is required");
  const json& m = doc["model"];
  if (!m.contains("matrix")) throw ConfigError("model.matrix is required");
  std::vector<std::vector<long long>> rows;
  for (const auto& r : m["matrix"]) {
    std::vector<long long> row;
    for (const auto& v : r) row.push_back(v.get<long long>());
    rows.push_back(row);
  }
  cfg.matrix = IntMatrix::fromRows(rows);
  const int dim = cfg.matrix.dim;

  if (m.contains("perturbation")) {
    const json& p = m["perturbation"];
    cfg.kind = p.value("kind", "none");
    if (cfg.kind == "shear-chain") {
      for (const auto& mv : p.at("moves")) {
        MoveConfig mc;
        mc.direction = mv.at("direction").get<std::string>();
        mc.amplitude = mv.at("amplitude").get<double>();
        mc.modulator = parsePoly(mv.at("modulator"), dim,
                                 "model.perturbation.moves.modulator");
        cfg.moves.push_back(std::move(mc));
      }
    } else if (cfg.kind == "manufactured") {
      cfg.bump = parseDisplacement(p.at("bump"), dim, "model.perturbation.bump");
    } else if (cfg.kind == "generic") {
      cfg.eta = parseDisplacement(p.at("eta"), dim, "model.perturbation.eta");
      cfg.epsilon = p.at("epsilon").get<double>();
    } else if (cfg.kind != "none") {
      throw ConfigError("model.perturbation.kind: unknown kind '" + cfg.kind + "'");
    }
  }

  if (!doc.contains("seed")) throw ConfigError("seed is required");
  cfg.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("run")) {
    const json& r = doc["run"];
    cfg.orbits = r.value("orbits", cfg.orbits);
    cfg.steps = r.value("steps", cfg.steps);
    cfg.burn_in = r.value("burn_in", cfg.burn_in);
    cfg.grid = r.value("grid", cfg.grid);
    if (r.contains("grids")) cfg.grids = r["grids"].get<std::vector<int>>();
    if (r.contains("periods")) cfg.periods = r["periods"].get<std::vector<int>>();
    cfg.points = r.value("points", cfg.points);
    cfg.chain_len = r.value("chain_len", cfg.chain_len);
    cfg.chains = r.value("chains", cfg.chains);
    cfg.samples = r.value("samples", cfg.samples);
    cfg.bins = r.value("bins", cfg.bins);
    cfg.pair_count = r.value("pair_count", cfg.pair_count);
    cfg.segment_length = r.value("segment_length", cfg.segment_length);
    cfg.leaf_step = r.value("leaf_step", cfg.leaf_step);
    cfg.transversal_len = r.value("transversal_len", cfg.transversal_len);
    cfg.holonomy_samples = r.value("holonomy_samples", cfg.holonomy_samples);
    if (r.contains("wu_offsets")) cfg.wu_offsets = r["wu_offsets"].get<std::vector<double>>();
    if (r.contains("amplitudes_a")) cfg.amplitudes_a = r["amplitudes_a"].get<std::vector<double>>();
    if (r.contains("amplitudes_b")) cfg.amplitudes_b = r["amplitudes_b"].get<std::vector<double>>();
    cfg.holder_kmin = r.value("holder_kmin", cfg.holder_kmin);
    cfg.holder_kmax = r.value("holder_kmax", cfg.holder_kmax);
    cfg.holder_bases = r.value("holder_bases", cfg.holder_bases);
    cfg.expect = r.value("expect", cfg.expect);
  }

  if (doc.contains("thresholds"))
    for (auto it = doc["thresholds"].begin(); it != doc["thresholds"].end(); ++it) {
      double v = it.value().get<double>();
      if (!(v > 0.0))
        throw ConfigError("thresholds." + it.key() + " must be positive");
      cfg.thresholds[it.key()] = v;
    }
  applyDefaults(cfg.thresholds);

  if (doc.contains("output")) cfg.out_dir = doc["output"].value("dir", cfg.out_dir);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

EndomorphismModel build_model(const ExperimentConfig& cfg) {
  PerturbationSpec pert;
  if (cfg.kind == "none") {
    pert.kind = PerturbationKind::None;
  } else if (cfg.kind == "shear-chain") {
    pert.kind = PerturbationKind::ShearChain;
    SpectralSplitting split = spectral_splitting(cfg.matrix);
    for (const auto& mc : cfg.moves) {
      ShearMove mv;
      mv.direction = resolveDirection(mc.direction, split);
      mv.amplitude = mc.amplitude;
      mv.modulator = mc.modulator;
      pert.moves.push_back(std::move(mv));
    }
  } else if (cfg.kind == "manufactured") {
    pert.kind = PerturbationKind::ManufacturedConjugacy;
    pert.bump = cfg.bump;
  } else if (cfg.kind == "generic") {
    pert.kind = PerturbationKind::GenericDisplacement;
    pert.eta = cfg.eta;
    pert.epsilon = cfg.epsilon;
  }
  return EndomorphismModel::make(cfg.matrix, std::move(pert));
}

EndomorphismModel build_model_with_amplitudes(const ExperimentConfig& cfg,
                                              double ea, double eb) {
  if (cfg.kind != "shear-chain" || cfg.moves.size() != 2)
    throw ConfigError("amplitude scan needs a two-move shear-chain model");
  ExperimentConfig c = cfg;
  c.moves[0].amplitude = ea;
  c.moves[1].amplitude = eb;
  return build_model(c);
}

}  // namespace endolab
