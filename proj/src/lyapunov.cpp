#include "endolab/lyapunov.hpp"

#include <numeric>
#include <sstream>
#include <atomic>
#include <thread>

namespace endolab {

LyapunovReport qr_spectrum(const EndomorphismModel& f, const Vec& x0, long n,
                           long burn_in) {
  if (n < 1) throw ConfigError("qr_spectrum requires n >= 1");
  const int d = f.dim();
  Vec x = wrap(x0);
  Mat b(d, d);
  Vec rdiag(d);
  // generic initial frame: an identity start is flag-degenerate for
  // block-diagonal models and locks columns onto the wrong filtration
  Mat q(d, d);
  {
    Mat seed_frame(d, d);
    double v = 0.501;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        seed_frame(i, j) = v;
        v = std::fmod(v * 3.9 * (1.0 - v) + 0.127, 1.0) + 0.05;
      }
    mgsQR(seed_frame, q, rdiag);
  }

  // burn-in: align the frame with the Oseledets flag, no accumulation
  for (long t = 0; t < burn_in; ++t) {
    b = f.differential(x) * q;
    mgsQR(b, q, rdiag);
    x = f.apply(x);
  }

  LyapunovReport rep;
  rep.n_steps = n;
  rep.burn_in = burn_in;
  rep.orbit_seed = wrap(x0);

  std::vector<std::vector<KahanSum>> batch(
      static_cast<size_t>(d), std::vector<KahanSum>(kBatchCount));
  std::vector<long> batch_len(kBatchCount, 0);
  KahanSum jac_sum;

  for (long t = 0; t < n; ++t) {
    b = f.differential(x) * q;
    mgsQR(b, q, rdiag);
    int bi = static_cast<int>((t * kBatchCount) / n);
    for (int i = 0; i < d; ++i) {
      double r = rdiag[i];
      if (!(r > 1e-300)) {
        std::ostringstream os;
        os << "QR frame collapse at step " << t << ", column " << i;
        throw FrameCollapse(os.str());
      }
      batch[static_cast<size_t>(i)][static_cast<size_t>(bi)].add(std::log(r));
    }
    ++batch_len[static_cast<size_t>(bi)];
    jac_sum.add(f.logJacobian(x));
    x = f.apply(x);
  }

  // QR columns order exponents descending; reports use ascending order.
  rep.exponents.resize(static_cast<size_t>(d));
  rep.batch_means.assign(static_cast<size_t>(d), {});
  rep.stderrs.resize(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    int col = d - 1 - i;  // ascending
    double total = 0.0;
    auto& means = rep.batch_means[static_cast<size_t>(i)];
    for (int bi = 0; bi < kBatchCount; ++bi) {
      double s = batch[static_cast<size_t>(col)][static_cast<size_t>(bi)].value();
      total += s;
      means.push_back(s / static_cast<double>(batch_len[static_cast<size_t>(bi)]));
    }
    rep.exponents[static_cast<size_t>(i)] = total / static_cast<double>(n);
    double mean = std::accumulate(means.begin(), means.end(), 0.0) / kBatchCount;
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    var /= (kBatchCount - 1);
    rep.stderrs[static_cast<size_t>(i)] =
        std::max(kStderrFloor, std::sqrt(var / kBatchCount));
  }
  rep.multiplicities.assign(static_cast<size_t>(d), 1);
  rep.avg_log_jac = jac_sum.value() / static_cast<double>(n);

  int stable = f.splitting().stable_dim;
  double acc = 0.0;
  for (int i = stable; i < d; ++i) {
    acc += rep.exponents[static_cast<size_t>(i)];
    rep.unstable_sums.push_back(acc);
  }
  return rep;
}

static double pairSum(const LyapunovReport& r, int stable_dim) {
  double s = 0.0;
  for (size_t i = static_cast<size_t>(stable_dim); i < r.exponents.size(); ++i)
    s += r.exponents[i];
  return s;
}

EnsembleReport ensemble_spectrum(const EndomorphismModel& f, int orbit_count,
                                 long n, std::uint64_t seed, int workers,
                                 long burn_in, StartMode start) {
  if (orbit_count < 2) throw ConfigError("ensemble_spectrum requires M >= 2");
  const int d = f.dim();
  EnsembleReport rep;
  rep.orbit_count = orbit_count;
  rep.steps = n;
  rep.seed = seed;
  rep.orbits.resize(static_cast<size_t>(orbit_count));

  auto runOrbit = [&](int i) {
    std::uint64_t s = deriveStream(seed, static_cast<std::uint64_t>(i));
    Rng rng(s);
    Vec x0 = rng.uniformVec(d);
    if (start == StartMode::PushForwardH &&
        f.perturbation().kind == PerturbationKind::ManufacturedConjugacy)
      x0 = wrap(f.conjHLift(x0));
    rep.orbits[static_cast<size_t>(i)] = qr_spectrum(f, x0, n, burn_in);
  };

  if (workers <= 1) {
    for (int i = 0; i < orbit_count; ++i) runOrbit(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < orbit_count; i = next.fetch_add(1))
          runOrbit(i);
      });
    for (auto& t : pool) t.join();
  }

  // order-independent aggregation: sequential over orbit index
  rep.mean_exponents.assign(static_cast<size_t>(d), 0.0);
  rep.stderrs.assign(static_cast<size_t>(d), 0.0);
  std::vector<KahanSum> sums(static_cast<size_t>(d));
  KahanSum pair_acc, jac_acc;
  for (const auto& orb : rep.orbits) {
    for (int i = 0; i < d; ++i) sums[static_cast<size_t>(i)].add(orb.exponents[static_cast<size_t>(i)]);
    pair_acc.add(pairSum(orb, f.splitting().stable_dim));
    jac_acc.add(orb.avg_log_jac);
  }
  const double M = orbit_count;
  for (int i = 0; i < d; ++i)
    rep.mean_exponents[static_cast<size_t>(i)] = sums[static_cast<size_t>(i)].value() / M;
  rep.mean_unstable_pair_sum = pair_acc.value() / M;
  rep.mean_avg_log_jac = jac_acc.value() / M;

  for (int i = 0; i < d; ++i) {
    double var = 0.0, batch_se = 0.0;
    for (const auto& orb : rep.orbits) {
      double dlt = orb.exponents[static_cast<size_t>(i)] - rep.mean_exponents[static_cast<size_t>(i)];
      var += dlt * dlt;
      batch_se += orb.stderrs[static_cast<size_t>(i)];
    }
    var /= (M - 1.0);
    double across = std::sqrt(var / M);
    double within = (batch_se / M) / std::sqrt(M);
    rep.stderrs[static_cast<size_t>(i)] = std::max({kStderrFloor, across, within});
  }
  {
    double var = 0.0;
    for (const auto& orb : rep.orbits) {
      double dlt = pairSum(orb, f.splitting().stable_dim) - rep.mean_unstable_pair_sum;
      var += dlt * dlt;
    }
    var /= (M - 1.0);
    rep.unstable_pair_sum_stderr = std::max(kStderrFloor, std::sqrt(var / M));
  }
  return rep;
}

double exponent_sums(const LyapunovReport& r, int k) {
  if (k < 1 || k > static_cast<int>(r.unstable_sums.size()))
    throw ConfigError("exponent_sums: k out of range");
  return r.unstable_sums[static_cast<size_t>(k - 1)];
}

double exponent_sums(const EnsembleReport& r, int stable_dim, int k) {
  int unstable = static_cast<int>(r.mean_exponents.size()) - stable_dim;
  if (k < 1 || k > unstable) throw ConfigError("exponent_sums: k out of range");
  double s = 0.0;
  for (int i = stable_dim; i < stable_dim + k; ++i)
    s += r.mean_exponents[static_cast<size_t>(i)];
  return s;
}

double pesin_scalar(const LyapunovReport& r) {
  double s = 0.0;
  for (double e : r.exponents)
    if (e > 0.0) s += e;
  return s;
}

}  // namespace endolab
