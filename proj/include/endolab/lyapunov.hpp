#pragma once

#include "endolab/maps.hpp"

#include <functional>

namespace endolab {

/// Per-orbit Lyapunov spectrum estimate from QR iteration of the
/// derivative cocycle.
struct LyapunovReport {
  std::vector<double> exponents;       // ascending, lambda^s first
  std::vector<int> multiplicities;     // all 1 in supported configurations
  std::vector<double> unstable_sums;   // Sum_{i<=k}, weak to strong
  long n_steps = 0;
  long burn_in = 0;
  Vec orbit_seed;
  double avg_log_jac = 0.0;            // independent route for the telescope identity
  std::vector<double> stderrs;         // batch-means, per exponent
  std::vector<std::vector<double>> batch_means;  // [exponent][batch]
};

/// Lebesgue-ensemble average over independent orbits.
struct EnsembleReport {
  std::vector<double> mean_exponents;
  std::vector<double> stderrs;         // max(batch-means, across-orbit)
  double mean_unstable_pair_sum = 0.0; // lambda^wu + lambda^su (d=3) or lambda^u (d=2)
  double unstable_pair_sum_stderr = 0.0;
  double mean_avg_log_jac = 0.0;
  int orbit_count = 0;
  long steps = 0;
  std::uint64_t seed = 0;
  std::vector<LyapunovReport> orbits;
};

enum class StartMode {
  Uniform,       // Lebesgue starts
  PushForwardH,  // H(uniform), for ManufacturedConjugacy models
};

inline constexpr int kBatchCount = 20;
// The batch-means estimator cannot resolve variation below the
// floating-point accumulation noise of the log sums; reported standard
// errors are floored there.
inline constexpr double kStderrFloor = 1e-12;

LyapunovReport qr_spectrum(const EndomorphismModel& f, const Vec& x0, long n,
                           long burn_in = 1000);

EnsembleReport ensemble_spectrum(const EndomorphismModel& f, int orbit_count,
                                 long n, std::uint64_t seed, int workers = 1,
                                 long burn_in = 1000,
                                 StartMode start = StartMode::Uniform);

/// Sum of the k smallest (weak-to-strong) unstable exponents.
double exponent_sums(const LyapunovReport& r, int k);
double exponent_sums(const EnsembleReport& r, int stable_dim, int k);

/// Sum of positive exponents (the Pesin scalar).
double pesin_scalar(const LyapunovReport& r);

}  // namespace endolab
