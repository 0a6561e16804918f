#include "endolab/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace endolab {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Collects pass/fail lines and manifest entries for one scenario run.
struct Runner {
  const ExperimentConfig& cfg;
  std::string name;
  ScenarioResult res;
  std::vector<std::string> manifest;

  Runner(const ExperimentConfig& c, std::string n) : cfg(c), name(std::move(n)) {
    fs::create_directories(cfg.out_dir);
    manifest.push_back("scenario = " + name);
    manifest.push_back("config_hash = " + hex64(cfg.hash));
    manifest.push_back("seed = " + std::to_string(cfg.seed));
  }

  void check(const std::string& label, bool ok, const std::string& detail) {
    std::string line = std::string(ok ? "PASS" : "FAIL") + " " + label +
                       (detail.empty() ? "" : " (" + detail + ")");
    res.lines.push_back(line);
    manifest.push_back(label + " = " + (ok ? "pass" : "fail"));
    if (!ok) res.status = 2;
  }

  void info(const std::string& key, const std::string& value) {
    res.lines.push_back("INFO " + key + " = " + value);
    manifest.push_back(key + " = " + value);
  }

  std::ofstream csv(const std::string& file, const std::string& header) {
    std::ofstream out(fs::path(cfg.out_dir) / file);
    out << std::setprecision(17);
    out << header << "\n";
    return out;
  }

  ScenarioResult finish() {
    std::ofstream out(fs::path(cfg.out_dir) / (name + ".manifest"));
    for (const auto& l : manifest) out << l << "\n";
    return res;
  }
};

int statusForException(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 4;
  if (dynamic_cast<const NotHyperbolic*>(&e) ||
      dynamic_cast<const ComplexUnstablePair*>(&e) ||
      dynamic_cast<const UnsupportedDimension*>(&e))
    return 4;
  if (dynamic_cast<const OracleMismatch*>(&e)) return 2;
  if (dynamic_cast<const Error*>(&e)) return 3;  // numerical infrastructure
  return 3;
}

// ------------------------------------------------------------- scenarios

ScenarioResult runSpectrum(const ExperimentConfig& cfg, int workers) {
  Runner r(cfg, "spectrum");
  EndomorphismModel f = build_model(cfg);
  EnsembleReport ens = ensemble_spectrum(f, cfg.orbits, cfg.steps, cfg.seed,
                                         workers, cfg.burn_in);
  const int d = f.dim();

  auto out = r.csv("spectrum.csv", [&] {
    std::string h = "orbit";
    for (int i = 0; i < d; ++i) h += ",exponent_" + std::to_string(i);
    return h + ",avg_log_jac,unstable_sum";
  }());
  double max_det_dev = 0.0;
  for (int i = 0; i < cfg.orbits; ++i) {
    const auto& orb = ens.orbits[static_cast<size_t>(i)];
    out << i;
    double total = 0.0;
    for (double e : orb.exponents) {
      out << "," << e;
      total += e;
    }
    out << "," << orb.avg_log_jac << "," << orb.unstable_sums.back() << "\n";
    max_det_dev = std::max(max_det_dev, std::abs(total - orb.avg_log_jac));
  }
  out << "mean";
  for (double e : ens.mean_exponents) out << "," << e;
  out << "," << ens.mean_avg_log_jac << "," << ens.mean_unstable_pair_sum << "\n";

  r.check("sum_of_exponents_equals_avg_log_jacobian",
          max_det_dev <= cfg.threshold("det_identity"), "max dev " + num(max_det_dev));
  if (f.conservative()) {
    double dev = std::abs(ens.mean_avg_log_jac - std::log(static_cast<double>(f.degree())));
    r.check("avg_log_jacobian_equals_log_degree",
            dev <= cfg.threshold("log_degree"), "dev " + num(dev));
  }
  if (cfg.kind == "none") {
    double dev = 0.0;
    for (int i = 0; i < d; ++i)
      dev = std::max(dev, std::abs(ens.mean_exponents[static_cast<size_t>(i)] -
                                   std::log(f.splitting().moduli[static_cast<size_t>(i)])));
    r.check("linear_exponents_match_eigen_moduli",
            dev <= cfg.threshold("linear_spectrum"), "max dev " + num(dev));
  }
  for (int i = 0; i < d; ++i)
    r.info("mean_exponent_" + std::to_string(i),
           num(ens.mean_exponents[static_cast<size_t>(i)]) + " +- " +
               num(ens.stderrs[static_cast<size_t>(i)]));
  return r.finish();
}

ScenarioResult runPeriodic(const ExperimentConfig& cfg) {
  Runner r(cfg, "periodic");
  EndomorphismModel f = build_model(cfg);
  auto out = r.csv("periodic.csv",
                   "period,index,coords,jacobian,stable_modulus,residual");

  for (int n : cfg.periods) {
    long long expected = count_linear_periodic(f.matrix(), n);
    ContinuationResult cont = continue_all_periodic(f, n);
    r.info("count_period_" + std::to_string(n),
           std::to_string(cont.records.size()) + " of " + std::to_string(expected));
    int idx = 0;
    for (const auto& rec : cont.records) {
      out << n << "," << idx++ << ",";
      for (int k = 0; k < f.dim(); ++k)
        out << (k ? ";" : "") << rec.point[k];
      out << "," << rec.jacobian << "," << rec.moduli.front() << ","
          << rec.residual << "\n";
    }
    VolumeVerdict vol = volume_criterion(cont.records, f.degree());
    if (f.conservative())
      r.check("volume_identity_period_" + std::to_string(n),
              vol.max_relative_deviation <= cfg.threshold("volume_rel"),
              "max rel dev " + num(vol.max_relative_deviation));
    else
      r.info("volume_max_rel_dev_period_" + std::to_string(n),
             num(vol.max_relative_deviation));
    if (f.conservative()) {
      SpecialnessVerdict sp = periodic_specialness_certificate(f, cont.records);
      r.check("stable_moduli_pinned_period_" + std::to_string(n),
              sp.max_deviation <= cfg.threshold("periodic_stable"),
              "max dev " + num(sp.max_deviation));
    }
  }
  return r.finish();
}

void writeFieldGrid(const fs::path& path, const ConjugacyField& field,
                    double residual) {
  std::ofstream out(path, std::ios::binary);
  std::ostringstream head;
  head << std::setprecision(17);
  head << "dim " << field.dim() << "\n";
  head << "resolution " << field.gridN() << "\n";
  head << "components " << field.dim() << "\n";
  head << "basis";
  for (int i = 0; i < field.dim(); ++i)
    for (int j = 0; j < field.dim(); ++j) head << " " << field.basis()(i, j);
  head << "\n";
  head << "residual " << residual << "\n\n";
  out << head.str();
  for (int c = 0; c < field.dim(); ++c) {
    const auto& data = field.component(c);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
}

ScenarioResult runConjugacy(const ExperimentConfig& cfg) {
  Runner r(cfg, "conjugacy");
  EndomorphismModel f = build_model(cfg);
  std::vector<int> grids = cfg.grids.empty() ? std::vector<int>{cfg.grid} : cfg.grids;

  auto out = r.csv("conjugacy.csv", "grid,residual,h_inverse_sup_error,sweeps");
  std::vector<double> errs;
  double finest_res = 0.0;
  for (size_t gi = 0; gi < grids.size(); ++gi) {
    int n = grids[gi];
    SolveReport rep;
    ConjugacyField field = solve_unstable_component(f, n, 1e-11, 200, Vec(), &rep);
    if (f.conservative() || cfg.kind == "manufactured")
      attach_stable(f, field, 1e-11, 200, &rep);
    double res = conjugacy_residual(field, f, 2000, deriveStream(cfg.seed, n));

    double sup_err = 0.0;
    if (cfg.kind == "manufactured") {
      Rng rng(deriveStream(cfg.seed, 0x77u + n));
      for (int s = 0; s < 500; ++s) {
        Vec x = rng.uniformVec(f.dim());
        Vec diff = field.evalH(x) - f.conjHInvLift(x);
        sup_err = std::max(sup_err, diff.cwiseAbs().maxCoeff());
      }
      errs.push_back(sup_err);
    }
    int sweeps = 0;
    for (int s : rep.sweeps) sweeps = std::max(sweeps, s);
    out << n << "," << res << "," << sup_err << "," << sweeps << "\n";
    if (gi + 1 == grids.size()) {
      finest_res = res;
      writeFieldGrid(fs::path(cfg.out_dir) / ("conjugacy_" + std::to_string(n) + ".grid"),
                     field, res);
    }
    r.info("apriori_bound_grid_" + std::to_string(n), num(field.aprioriBound()));
  }

  if (cfg.kind == "manufactured") {
    r.check("residual_at_finest_grid", finest_res <= cfg.threshold("conj_residual"),
            "residual " + num(finest_res));
    if (errs.size() >= 2) {
      double order = std::log(errs.front() / errs.back()) /
                     std::log(static_cast<double>(grids.back()) / grids.front());
      r.check("h_inverse_convergence_order", order >= cfg.threshold("conj_order"),
              "order " + num(order));
    }
  } else {
    r.info("residual_at_finest_grid", num(finest_res));
  }
  return r.finish();
}

ScenarioResult runSpecialness(const ExperimentConfig& cfg) {
  Runner r(cfg, "specialness");
  EndomorphismModel f = build_model(cfg);
  SpecialnessDiagnostic diag = specialness_scan(f, cfg.points, cfg.chain_len,
                                                cfg.chains, cfg.seed);
  auto out = r.csv("specialness.csv", "point,variance");
  for (size_t i = 0; i < diag.per_point_variance.size(); ++i)
    out << i << "," << diag.per_point_variance[i] << "\n";
  r.info("max_variance", num(diag.max_variance));
  if (cfg.expect == "special")
    r.check("stable_sums_chain_independent",
            diag.max_variance < cfg.threshold("special_variance"),
            "max variance " + num(diag.max_variance));
  else if (cfg.expect == "nonspecial")
    r.check("stable_sums_chain_dependent",
            diag.max_variance > cfg.threshold("generic_variance"),
            "max variance " + num(diag.max_variance));
  return r.finish();
}

ScenarioResult runHolonomy(const ExperimentConfig& cfg) {
  Runner r(cfg, "holonomy");
  EndomorphismModel f = build_model(cfg);
  Rng rng(cfg.seed);
  Vec base = rng.uniformVec(f.dim());
  HolonomyReport rep = holonomy_jacobian(f, base, cfg.wu_offsets,
                                         cfg.transversal_len,
                                         cfg.holonomy_samples, cfg.leaf_step,
                                         deriveStream(cfg.seed, 0xF0u));
  auto out = r.csv("holonomy.csv", "offset,sample,ratio");
  for (size_t o = 0; o < rep.wu_offsets.size(); ++o)
    for (size_t i = 0; i < rep.ratios[o].size(); ++i)
      out << rep.wu_offsets[o] << "," << i << "," << rep.ratios[o][i] << "\n";
  r.info("max_abs_log_ratio", num(rep.max_abs_log_ratio));
  for (size_t o = 0; o < rep.concentration.size(); ++o)
    r.info("concentration_offset_" + num(rep.wu_offsets[o]), num(rep.concentration[o]));
  for (size_t l = 0; l < rep.refine_concentration.size(); ++l)
    r.info("concentration_refine_" + std::to_string(rep.refine_samples[l]),
           num(rep.refine_concentration[l]));

  if (cfg.kind == "none")
    r.check("linear_holonomy_ratios_are_one",
            rep.max_abs_log_ratio <= cfg.threshold("holonomy_linear"),
            "max |log ratio| " + num(rep.max_abs_log_ratio));
  if (cfg.expect == "ac")
    r.check("holonomy_in_ac_band", rep.ac_band, "band T " + num(rep.band_t));
  else if (cfg.expect == "non-ac")
    r.check("holonomy_concentration_grows", rep.growing_trend, "");
  return r.finish();
}

ScenarioResult runQuasiIsometry(const ExperimentConfig& cfg) {
  Runner r(cfg, "quasi-isometry");
  EndomorphismModel f = build_model(cfg);
  Rng rng(cfg.seed);
  Vec base = rng.uniformVec(f.dim());
  // the strong-unstable leaves are the unambiguous 1D unstable foliation;
  // weak sub-leaves need not be rectifiable when the splitting inside the
  // unstable plane is only measurable
  Bundle bundle = Bundle::StrongUnstable;

  // the graph-transform parametrization follows leaves even where the
  // direction field is too rough to integrate pointwise
  LeafSegment long_seg =
      cfg.kind == "generic"
          ? integrate_leaf(f, base, bundle, 2.0 * cfg.segment_length,
                           cfg.leaf_step, deriveStream(cfg.seed, 0xA1u))
          : leaf_segment_dynamic(f, base, bundle, 2.0 * cfg.segment_length,
                                 cfg.leaf_step);
  LeafSegment short_seg = long_seg;
  short_seg.points.resize(short_seg.points.size() / 2 + 1);

  QuasiIsometryReport q1 = quasi_isometry_scan(f, short_seg, cfg.pair_count,
                                               deriveStream(cfg.seed, 0xB1u));
  QuasiIsometryReport q2 = quasi_isometry_scan(f, long_seg, cfg.pair_count,
                                               deriveStream(cfg.seed, 0xB2u));
  auto out = r.csv("quasi_isometry.csv", "length,q,r_hat");
  out << q1.segment_length << "," << q1.q << "," << q1.r_hat << "\n";
  out << q2.segment_length << "," << q2.q << "," << q2.r_hat << "\n";

  double drift = std::abs(q2.q - q1.q) / q1.q;
  r.check("q_finite_and_stable_under_doubling",
          std::isfinite(q2.q) && drift <= cfg.threshold("qi_drift"),
          "Q " + num(q2.q) + ", drift " + num(drift));
  if (cfg.kind == "none") {
    r.check("linear_q_is_one", q2.q == 1.0, "Q " + num(q2.q));
    r.check("linear_leaf_offset_is_zero", q2.r_hat <= cfg.threshold("linear_exact"),
            "R_c " + num(q2.r_hat));
  } else {
    r.info("r_hat", num(q2.r_hat));
    r.info("angle_trend_decreasing", q2.angle_trend_decreasing ? "yes" : "no");
  }
  return r.finish();
}

HolderReport holderForModel(const EndomorphismModel& f,
                            const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<LeafPair> pairs;
  Rng rng(seed);
  for (int b = 0; b < cfg.holder_bases; ++b) {
    Vec base = rng.uniformVec(f.dim());
    for (int k = cfg.holder_kmin; k <= cfg.holder_kmax; ++k) {
      double s = std::pow(2.0, -k) * (0.75 + 0.5 * rng.uniform());
      int depth = std::min(40, k + 14);
      LeafPair p;
      p.x = wrap(base);
      p.y = leaf_point_dynamic(f, p.x, Bundle::WeakUnstable, s, depth);
      p.leaf_dist = (p.y - p.x).norm();
      pairs.push_back(std::move(p));
    }
  }
  auto h = [&f](const Vec& x) { return x + series_displacement(f, x); };
  return holder_exponent_wu(pairs, h, 400, deriveStream(seed, 0xC0DEu));
}

ScenarioResult runThmBScan(const ExperimentConfig& cfg, int workers) {
  Runner r(cfg, "thmB-scan");
  if (cfg.amplitudes_a.empty() || cfg.amplitudes_b.empty())
    throw ConfigError("run.amplitudes_a and run.amplitudes_b are required");

  SpectralSplitting split = spectral_splitting(cfg.matrix);
  auto logs = split.unstableLogModuli();
  double target_sum = 0.0;
  for (double l : logs) target_sum += l;
  double lam_wu_a = logs.front();

  auto out = r.csv("thmB_scan.csv",
                   "eps_a,eps_b,lambda_s,lambda_wu,lambda_su,stderr_wu,"
                   "delta_wu,sum_dev,sum_stderr,sum_ok,shift_detected");
  bool all_sums_ok = true, control_ok = true, transfer = false;
  double best_shift = 0.0, best_ea = 0.0, best_eb = 0.0;
  std::uint64_t cell = 0;
  const double sigma = cfg.threshold("sum_sigma");
  for (double ea : cfg.amplitudes_a)
    for (double eb : cfg.amplitudes_b) {
      EndomorphismModel f = build_model_with_amplitudes(cfg, ea, eb);
      EnsembleReport ens = ensemble_spectrum(f, cfg.orbits, cfg.steps,
                                             deriveStream(cfg.seed, cell++),
                                             workers, cfg.burn_in);
      double lam_wu = ens.mean_exponents[1];
      double se_wu = ens.stderrs[1];
      double dwu = lam_wu - lam_wu_a;
      double sum_dev = std::abs(ens.mean_unstable_pair_sum - target_sum);
      bool sum_ok = sum_dev <= sigma * ens.unstable_pair_sum_stderr;
      bool shift = std::abs(dwu) > sigma * se_wu;
      all_sums_ok = all_sums_ok && sum_ok;
      if (eb == 0.0 && shift) control_ok = false;
      if (eb != 0.0 && shift) {
        transfer = true;
        if (std::abs(dwu) > std::abs(best_shift)) {
          best_shift = dwu;
          best_ea = ea;
          best_eb = eb;
        }
      }
      out << ea << "," << eb << "," << ens.mean_exponents[0] << "," << lam_wu
          << "," << ens.mean_exponents[2] << "," << se_wu << "," << dwu << ","
          << sum_dev << "," << ens.unstable_pair_sum_stderr << "," << sum_ok
          << "," << shift << "\n";
    }

  r.check("unstable_sum_pinned_across_scan", all_sums_ok,
          "target " + num(target_sum));
  r.check("control_row_shows_no_shift", control_ok, "");
  if (cfg.expect == "transfer") {
    r.check("weak_exponent_shift_detected", transfer,
            "best shift " + num(best_shift) + " at (" + num(best_ea) + "," +
                num(best_eb) + ")");
    if (transfer) {
      EndomorphismModel f = build_model_with_amplitudes(cfg, best_ea, best_eb);
      HolderReport h = holderForModel(f, cfg, deriveStream(cfg.seed, 0xA0DEu));
      r.info("holder_alpha", num(h.alpha));
      r.info("holder_ci", num(h.ci_lo) + ".." + num(h.ci_hi));
    }
  }
  return r.finish();
}

ScenarioResult runReport(const ExperimentConfig& cfg, int workers) {
  Runner r(cfg, "report");
  const char* names[] = {"spectrum", "periodic", "specialness"};
  for (const char* n : names) {
    ScenarioResult sub = run_scenario(n, cfg, workers);
    for (const auto& l : sub.lines) r.res.lines.push_back(std::string(n) + ": " + l);
    r.manifest.push_back(std::string(n) + "_status = " + std::to_string(sub.status));
    if (sub.status > r.res.status) r.res.status = sub.status;
  }
  return r.finish();
}

}  // namespace

ScenarioResult regenerate_fixtures(const ExperimentConfig& cfg) {
  Runner r(cfg, "fixtures");
  std::vector<std::string>& m = r.manifest;

  SpectralSplitting split = spectral_splitting(cfg.matrix);
  for (int i = 0; i < split.dim(); ++i)
    m.push_back("eigen_modulus_" + std::to_string(i) + " = " +
                num(split.moduli[static_cast<size_t>(i)]));
  m.push_back("degree = " + std::to_string(split.degree));
  m.push_back("gap_to_one = " + num(split.gapToOne()));
  for (int n = 1; n <= 4; ++n)
    m.push_back("periodic_count_" + std::to_string(n) + " = " +
                std::to_string(count_linear_periodic(cfg.matrix, n)));
  {
    auto offs = preimage_offsets(cfg.matrix);
    std::ostringstream os;
    for (const auto& o : offs) {
      os << "(";
      for (int k = 0; k < cfg.matrix.dim; ++k) os << (k ? "," : "") << o[k];
      os << ")";
    }
    m.push_back("preimage_offsets = " + os.str());
  }
  {
    IntMatrix found = search_irreducible_model(6);
    std::ostringstream os;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) os << (i + j ? " " : "") << found.at(i, j);
    m.push_back("irreducible_model = " + os.str());
  }
  {
    EndomorphismModel f = build_model(cfg);
    double gsup = 0.0;
    const int per_axis = 17;
    long cells = 1;
    for (int k = 0; k < f.dim(); ++k) cells *= per_axis;
    for (long idx = 0; idx < cells; ++idx) {
      Vec x(f.dim());
      long t = idx;
      for (int k = f.dim() - 1; k >= 0; --k) {
        x[k] = static_cast<double>(t % per_axis) / per_axis;
        t /= per_axis;
      }
      gsup = std::max(gsup, f.displacement(x).cwiseAbs().maxCoeff());
    }
    m.push_back("displacement_sup = " + num(gsup));
    m.push_back("c1_estimate = " + num(f.c1DistanceEstimate()));
    m.push_back("c1_budget = " + num(f.c1Budget()));
  }

  fs::path path = fs::path(cfg.out_dir) / "fixtures.manifest";
  std::ostringstream fresh;
  for (const auto& l : m) fresh << l << "\n";
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::stringstream old;
    old << in.rdbuf();
    if (old.str() != fresh.str()) {
      std::string msg = "fixture manifest drift in " + path.string();
      throw OracleMismatch(msg);
    }
  }
  std::ofstream out(path);
  out << fresh.str();
  r.res.lines.push_back("PASS fixtures written (" + std::to_string(m.size()) +
                        " entries)");
  return r.res;
}

ScenarioResult run_scenario(const std::string& name,
                            const ExperimentConfig& cfg, int workers) {
  try {
    if (name == "spectrum") return runSpectrum(cfg, workers);
    if (name == "periodic") return runPeriodic(cfg);
    if (name == "conjugacy") return runConjugacy(cfg);
    if (name == "specialness") return runSpecialness(cfg);
    if (name == "holonomy") return runHolonomy(cfg);
    if (name == "quasi-isometry") return runQuasiIsometry(cfg);
    if (name == "thmB-scan") return runThmBScan(cfg, workers);
    if (name == "report") return runReport(cfg, workers);
    if (name == "fixtures") return regenerate_fixtures(cfg);
    throw ConfigError("unknown scenario: " + name);
  } catch (const std::exception& e) {
    ScenarioResult res;
    res.status = statusForException(e);
    res.lines.push_back(std::string("ERROR ") + e.what());
    return res;
  }
}

}  // namespace endolab
