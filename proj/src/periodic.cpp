#include "endolab/periodic.hpp"

#include <sstream>

namespace endolab {

std::vector<Vec> linear_periodic_points(const IntMatrix& a, int n) {
  if (n < 1) throw ConfigError("period must be >= 1");
  const int d = a.dim;
  IntMatrix b = a.pow(n).minusIdentity();
  long long det = b.det();
  if (det == 0) {
    std::ostringstream os;
    os << "A^" << n << " - I is singular; periodic points are not isolated";
    throw DegeneratePeriod(os.str());
  }
  IntMatrix adj = b.adjugate();

  // Fixed points of A^n lift to B x = m with x in [0,1)^d, so m ranges over
  // the integer points of B [0,1)^d. Componentwise bounds from column sums.
  std::array<long long, kMaxDim> lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    long long mn = 0, mx = 0;
    for (int j = 0; j < d; ++j) {
      long long v = b.at(i, j);
      if (v < 0) mn += v; else mx += v;
    }
    lo[static_cast<size_t>(i)] = mn;
    hi[static_cast<size_t>(i)] = mx;
  }

  std::vector<Vec> points;
  points.reserve(static_cast<size_t>(std::llabs(det)));
  std::array<long long, kMaxDim> m{};
  for (int i = 0; i < d; ++i) m[static_cast<size_t>(i)] = lo[static_cast<size_t>(i)];
  while (true) {
    // x = adj(B) m / det, exact membership test for [0,1)^d
    bool inside = true;
    std::array<long long, kMaxDim> num{};
    for (int i = 0; i < d && inside; ++i) {
      long long s = 0;
      for (int j = 0; j < d; ++j) s += adj.at(i, j) * m[static_cast<size_t>(j)];
      num[static_cast<size_t>(i)] = s;
      if (det > 0) inside = (s >= 0 && s < det);
      else inside = (s <= 0 && s > det);
    }
    if (inside) {
      Vec x(d);
      for (int i = 0; i < d; ++i)
        x[i] = static_cast<double>(num[static_cast<size_t>(i)]) / static_cast<double>(det);
      points.push_back(x);
    }
    int k = d - 1;
    while (k >= 0 && ++m[static_cast<size_t>(k)] > hi[static_cast<size_t>(k)]) {
      m[static_cast<size_t>(k)] = lo[static_cast<size_t>(k)];
      --k;
    }
    if (k < 0) break;
  }

  if (static_cast<long long>(points.size()) != std::llabs(det)) {
    std::ostringstream os;
    os << "periodic point enumeration found " << points.size() << ", expected "
       << std::llabs(det);
    throw OracleMismatch(os.str());
  }
  return points;
}

static Mat orbitDifferential(const EndomorphismModel& f, const Vec& x, int n,
                             Vec* end = nullptr) {
  Mat j = Mat::Identity(f.dim(), f.dim());
  Vec cur = x;
  for (int t = 0; t < n; ++t) {
    j = f.differential(cur) * j;
    cur = f.applyLift(cur);
  }
  if (end) *end = cur;
  return j;
}

namespace {

// damped Newton for F^n(x) = x + m; returns false if it stalls
bool newtonPeriodic(const EndomorphismModel& f, int n, const IVec& m, Vec& x,
                    double& res_out) {
  const int d = f.dim();
  auto residualAt = [&](const Vec& p, Vec& r, Mat* j) {
    Vec end;
    Mat jac = orbitDifferential(f, p, n, &end);
    r = end - p;
    for (int i = 0; i < d; ++i) r[i] -= static_cast<double>(m[i]);
    if (j) *j = jac - Mat::Identity(d, d);
    return r.cwiseAbs().maxCoeff();
  };

  Vec r(d);
  Mat g(d, d);
  double res = residualAt(x, r, &g);
  bool ok = res < 1e-12;
  for (int it = 0; it < 100 && !ok; ++it) {
    Vec step = g.inverse() * r;
    // backtracking: far-from-linear perturbations need damped steps
    double damp = 1.0;
    Vec trial;
    double trial_res = 0.0;
    Vec tr(d);
    for (int half = 0; half < 25; ++half) {
      trial = x - damp * step;
      trial_res = residualAt(trial, tr, nullptr);
      if (trial_res < res * (1.0 - 0.25 * damp) || trial_res < 1e-12) break;
      damp *= 0.5;
    }
    if (trial_res >= res && res < 1e30) break;
    x = trial;
    res = residualAt(x, r, &g);
    ok = res < 1e-12;
  }
  res_out = res;
  return ok;
}

}  // namespace

PeriodicOrbitRecord continue_periodic(const EndomorphismModel& f, int n,
                                      const Vec& seed) {
  const int d = f.dim();
  // lattice displacement of the linear seed, held fixed during Newton
  IntMatrix b = f.matrix().pow(n).minusIdentity();
  IVec m(d);
  Vec bseed = b.real() * seed;
  for (int i = 0; i < d; ++i) m[i] = std::llround(bseed[i]);

  Vec x = seed;
  double res = 0.0;
  if (!newtonPeriodic(f, n, m, x, res)) {
    // amplitude homotopy from the linear seed with adaptive steps
    x = seed;
    double t = 0.0, dt = 0.25;
    bool stuck = false;
    while (t < 1.0 && !stuck) {
      double t_next = std::min(1.0, t + dt);
      Vec trial = x;
      if (newtonPeriodic(f.scaledPerturbation(t_next), n, m, trial, res)) {
        x = trial;
        t = t_next;
        dt = std::min(0.25, dt * 2.0);
      } else {
        dt *= 0.5;
        if (dt < 1e-4) stuck = true;
      }
    }
    if (stuck) {
      std::ostringstream os;
      os << "periodic continuation diverged at period " << n << " from seed ("
         << seed.transpose() << "), residual " << res;
      throw NewtonDivergence(os.str());
    }
  }

  PeriodicOrbitRecord rec;
  rec.period = n;
  rec.point = wrap(x);
  rec.lattice = m;
  rec.residual = res;
  Mat j = orbitDifferential(f, x, n);
  rec.jacobian = std::abs(j.determinant());
  for (const auto& ev : smallEigenvalues(j)) rec.moduli.push_back(std::abs(ev));
  return rec;
}

ContinuationResult continue_all_periodic(const EndomorphismModel& f, int n) {
  auto seeds = linear_periodic_points(f.matrix(), n);
  ContinuationResult out;
  for (const auto& s : seeds) {
    PeriodicOrbitRecord rec = continue_periodic(f, n, s);
    bool dup = false;
    for (const auto& r : out.records)
      if (torusDist(r.point, rec.point) < 1e-8) {
        dup = true;
        break;
      }
    if (dup) ++out.duplicates;
    else out.records.push_back(std::move(rec));
  }
  return out;
}

VolumeVerdict volume_criterion(const std::vector<PeriodicOrbitRecord>& records,
                               long long degree_k) {
  VolumeVerdict v;
  for (const auto& r : records) {
    double kn = std::pow(static_cast<double>(degree_k), r.period);
    double rel = std::abs(r.jacobian - kn) / kn;
    bool pass = rel <= 1e-8;
    v.per_record.push_back(pass);
    v.consistent_with_volume = v.consistent_with_volume && pass;
    v.max_relative_deviation = std::max(v.max_relative_deviation, rel);
  }
  return v;
}

SpecialnessVerdict periodic_specialness_certificate(
    const EndomorphismModel& f,
    const std::vector<PeriodicOrbitRecord>& records) {
  SpecialnessVerdict v;
  double target = f.splitting().stableLogModulus();
  for (const auto& r : records) {
    double lam = std::log(r.moduli.front()) / static_cast<double>(r.period);
    double dev = std::abs(lam - target);
    v.max_deviation = std::max(v.max_deviation, dev);
    if (dev > 1e-8) v.pass = false;
  }
  return v;
}

}  // namespace endolab
