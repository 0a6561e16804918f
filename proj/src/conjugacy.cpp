#include "endolab/conjugacy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace endolab {

namespace {

// periodic multilinear interpolation of a flat grid array
double interpGrid(const std::vector<double>& data, int n, int d, const Vec& x,
                  const Vec& phase) {
  std::array<int, kMaxDim> i0{};
  std::array<double, kMaxDim> fr{};
  for (int k = 0; k < d; ++k) {
    double t = x[k] * n - (phase.size() ? phase[k] : 0.0);
    double fl = std::floor(t);
    fr[static_cast<size_t>(k)] = t - fl;
    long cell = static_cast<long>(fl) % n;
    if (cell < 0) cell += n;
    i0[static_cast<size_t>(k)] = static_cast<int>(cell);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    long idx = 0;
    for (int k = 0; k < d; ++k) {
      int bit = (corner >> k) & 1;
      int ik = i0[static_cast<size_t>(k)] + bit;
      if (ik == n) ik = 0;
      idx = idx * n + ik;
      w *= bit ? fr[static_cast<size_t>(k)] : 1.0 - fr[static_cast<size_t>(k)];
    }
    acc += w * data[static_cast<size_t>(idx)];
  }
  return acc;
}

}  // namespace

ConjugacyField::ConjugacyField(int dim, int grid_n,
                               const SpectralSplitting& split, const Vec& phase)
    : dim_(dim),
      grid_n_(grid_n),
      stable_dim_(split.stable_dim),
      phase_(phase.size() ? phase : Vec(Vec::Zero(dim))),
      basis_(split.basis),
      adapted_inverse_(split.adapted_inverse) {
  cells_ = 1;
  for (int k = 0; k < dim; ++k) cells_ *= grid_n;
  comps_.assign(static_cast<size_t>(dim),
                std::vector<double>(static_cast<size_t>(cells_), 0.0));
}

Vec ConjugacyField::gridPoint(long idx) const {
  Vec x(dim_);
  for (int k = dim_ - 1; k >= 0; --k) {
    x[k] = (static_cast<double>(idx % grid_n_) + phase_[k]) / grid_n_;
    idx /= grid_n_;
  }
  return x;
}

double ConjugacyField::evalComponent(int c, const Vec& x) const {
  return interpGrid(comps_[static_cast<size_t>(c)], grid_n_, dim_, x, phase_);
}

Vec ConjugacyField::evalU(const Vec& x) const {
  Vec c(dim_);
  for (int k = 0; k < dim_; ++k) c[k] = evalComponent(k, x);
  return basis_ * c;
}

ConjugacyField solve_unstable_component(const EndomorphismModel& f, int grid_n,
                                        double tol, int max_sweeps,
                                        const Vec& phase, SolveReport* rep) {
  const int d = f.dim();
  const auto& split = f.splitting();
  ConjugacyField field(d, grid_n, split, phase);
  const long cells = field.cells();

  // forward images of the grid, and the sup of the adapted displacement
  std::vector<double> fx(static_cast<size_t>(cells) * static_cast<size_t>(d));
  double gsup = 0.0;
  for (long idx = 0; idx < cells; ++idx) {
    Vec x = field.gridPoint(idx);
    Vec y = f.applyLift(x);
    for (int k = 0; k < d; ++k) fx[static_cast<size_t>(idx * d + k)] = y[k];
    Vec gt = split.adapted_inverse * (y - f.linearReal() * x);
    gsup = std::max(gsup, gt.cwiseAbs().maxCoeff());
  }
  field.setAprioriBound(2.0 * gsup / split.gapToOne());

  if (rep) {
    rep->sweeps.assign(static_cast<size_t>(d), 0);
    rep->final_update.assign(static_cast<size_t>(d), 0.0);
    rep->update_ratio.assign(static_cast<size_t>(d), 0.0);
  }

  for (int c = split.stable_dim; c < d; ++c) {
    double lambda = split.eigenvalues[static_cast<size_t>(c)].real();
    // adapted displacement component at each grid point
    std::vector<double> gt(static_cast<size_t>(cells));
    for (long idx = 0; idx < cells; ++idx) {
      Vec x = field.gridPoint(idx);
      double s = 0.0;
      for (int k = 0; k < d; ++k)
        s += split.adapted_inverse(c, k) *
             (fx[static_cast<size_t>(idx * d + k)] - (f.linearReal() * x)[k]);
      gt[static_cast<size_t>(idx)] = s;
    }

    std::vector<double>& cur = field.component(c);
    std::vector<double> nxt(static_cast<size_t>(cells));
    double prev_update = 0.0;
    bool done = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double update = 0.0;
      Vec y(d);
      for (long idx = 0; idx < cells; ++idx) {
        for (int k = 0; k < d; ++k) y[k] = fx[static_cast<size_t>(idx * d + k)];
        double v = (interpGrid(cur, grid_n, d, y, field.phase()) +
                    gt[static_cast<size_t>(idx)]) /
                   lambda;
        update = std::max(update, std::abs(v - cur[static_cast<size_t>(idx)]));
        nxt[static_cast<size_t>(idx)] = v;
      }
      cur.swap(nxt);
      if (rep) {
        rep->sweeps[static_cast<size_t>(c)] = sweep + 1;
        rep->final_update[static_cast<size_t>(c)] = update;
        if (prev_update > 0.0)
          rep->update_ratio[static_cast<size_t>(c)] = update / prev_update;
      }
      if (update < tol) {
        done = true;
        break;
      }
      prev_update = update;
    }
    if (!done) {
      std::ostringstream os;
      os << "unstable-component sweep did not reach " << tol << " in "
         << max_sweeps << " sweeps (component " << c << ")";
      throw NoConvergence(os.str());
    }
  }
  return field;
}

void attach_stable(const EndomorphismModel& f, ConjugacyField& field,
                   double tol, int max_sweeps, SolveReport* rep) {
  const int d = f.dim();
  const auto& split = f.splitting();
  if (split.stable_dim != 1)
    throw UnsupportedDimension("stable attachment expects a 1D stable bundle");
  const long cells = field.cells();
  const double lambda = split.eigenvalues[0].real();

  // offset-0 inverse branch of each grid point, and g^s there
  std::vector<double> pre(static_cast<size_t>(cells) * static_cast<size_t>(d));
  std::vector<double> gts(static_cast<size_t>(cells));
  for (long idx = 0; idx < cells; ++idx) {
    Vec x = field.gridPoint(idx);
    Vec y = wrap(f.liftInverse(x));
    for (int k = 0; k < d; ++k) pre[static_cast<size_t>(idx * d + k)] = y[k];
    Vec g = f.displacement(y);
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += split.adapted_inverse(0, k) * g[k];
    gts[static_cast<size_t>(idx)] = s;
  }

  std::vector<double>& cur = field.component(0);
  std::vector<double> nxt(static_cast<size_t>(cells));
  bool done = false;
  Vec y(d);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double update = 0.0;
    for (long idx = 0; idx < cells; ++idx) {
      for (int k = 0; k < d; ++k) y[k] = pre[static_cast<size_t>(idx * d + k)];
      double v = lambda * interpGrid(cur, field.gridN(), d, y, field.phase()) -
                 gts[static_cast<size_t>(idx)];
      update = std::max(update, std::abs(v - cur[static_cast<size_t>(idx)]));
      nxt[static_cast<size_t>(idx)] = v;
    }
    cur.swap(nxt);
    if (rep && !rep->sweeps.empty()) {
      rep->sweeps[0] = sweep + 1;
      rep->final_update[0] = update;
    }
    if (update < tol) {
      done = true;
      break;
    }
  }
  if (!done)
    throw NoConvergence("stable-component attachment did not converge");
  field.markStable();
}

StableSumSample stable_backward_sum(const EndomorphismModel& f, const Vec& x,
                                    int chain_len, int n_chains,
                                    std::uint64_t stream) {
  const auto& split = f.splitting();
  if (split.stable_dim != 1)
    throw UnsupportedDimension("stable sums expect a 1D stable bundle");
  const double lambda = split.eigenvalues[0].real();
  const int d = f.dim();

  StableSumSample out;
  out.values.reserve(static_cast<size_t>(n_chains));
  for (int c = 0; c < n_chains; ++c) {
    auto chain = f.randomBackwardOrbit(x, chain_len,
                                       deriveStream(stream, static_cast<std::uint64_t>(c)));
    KahanSum acc;
    double w = 1.0;  // lambda^{j-1}
    for (const auto& xm : chain) {
      Vec g = f.displacement(xm);
      double gs = 0.0;
      for (int k = 0; k < d; ++k) gs += split.adapted_inverse(0, k) * g[k];
      acc.add(-w * gs);
      w *= lambda;
    }
    out.values.push_back(acc.value());
  }
  double m = std::accumulate(out.values.begin(), out.values.end(), 0.0) /
             static_cast<double>(n_chains);
  double var = 0.0;
  for (double v : out.values) var += (v - m) * (v - m);
  out.mean = m;
  out.variance = n_chains > 1 ? var / (n_chains - 1) : 0.0;
  return out;
}

SpecialnessDiagnostic specialness_scan(const EndomorphismModel& f, int n_points,
                                       int chain_len, int n_chains,
                                       std::uint64_t seed) {
  SpecialnessDiagnostic diag;
  diag.chain_len = chain_len;
  diag.chains_per_point = n_chains;
  Rng rng(seed);
  for (int i = 0; i < n_points; ++i) {
    Vec x = rng.uniformVec(f.dim());
    auto s = stable_backward_sum(f, x, chain_len, n_chains,
                                 deriveStream(seed, 0x5000u + static_cast<std::uint64_t>(i)));
    diag.per_point_variance.push_back(s.variance);
    diag.max_variance = std::max(diag.max_variance, s.variance);
  }
  return diag;
}

double conjugacy_residual(const ConjugacyField& field,
                          const EndomorphismModel& f, int n_test,
                          std::uint64_t seed) {
  Rng rng(seed);
  double sup = 0.0;
  for (int i = 0; i < n_test; ++i) {
    Vec x = rng.uniformVec(f.dim());
    Vec lhs = field.evalH(f.apply(x));
    Vec rhs = f.linearReal() * field.evalH(x);
    sup = std::max(sup, torusDist(wrap(lhs), wrap(rhs)));
  }
  return sup;
}

Vec series_displacement(const EndomorphismModel& f, const Vec& x,
                        int forward_terms, int backward_terms) {
  const auto& split = f.splitting();
  const int d = f.dim();
  Vec c = Vec::Zero(d);

  // unstable components along the forward orbit
  {
    std::vector<KahanSum> acc(static_cast<size_t>(d - split.stable_dim));
    std::vector<double> w(static_cast<size_t>(d - split.stable_dim));
    for (int j = split.stable_dim; j < d; ++j)
      w[static_cast<size_t>(j - split.stable_dim)] =
          1.0 / split.eigenvalues[static_cast<size_t>(j)].real();
    Vec cur = wrap(x);
    for (int t = 0; t < forward_terms; ++t) {
      Vec g = f.displacement(cur);
      for (int j = split.stable_dim; j < d; ++j) {
        double gj = 0.0;
        for (int k = 0; k < d; ++k) gj += split.adapted_inverse(j, k) * g[k];
        size_t jj = static_cast<size_t>(j - split.stable_dim);
        acc[jj].add(w[jj] * gj);
        w[jj] /= split.eigenvalues[static_cast<size_t>(j)].real();
      }
      cur = f.apply(cur);
    }
    for (int j = split.stable_dim; j < d; ++j)
      c[j] = acc[static_cast<size_t>(j - split.stable_dim)].value();
  }

  // stable component along the offset-0 backward branch
  if (split.stable_dim == 1) {
    const double lambda = split.eigenvalues[0].real();
    KahanSum acc;
    double w = 1.0;
    Vec cur = wrap(x);
    for (int t = 0; t < backward_terms; ++t) {
      cur = wrap(f.liftInverse(cur));
      Vec g = f.displacement(cur);
      double gs = 0.0;
      for (int k = 0; k < d; ++k) gs += split.adapted_inverse(0, k) * g[k];
      acc.add(-w * gs);
      w *= lambda;
    }
    c[0] = acc.value();
  }
  return split.basis * c;
}

Vec series_conjugacy_inverse(const EndomorphismModel& f, const Vec& y,
                             int max_iter, double tol) {
  Vec z = y;
  for (int it = 0; it < max_iter; ++it) {
    Vec zn = y - series_displacement(f, z);
    double delta = (zn - z).cwiseAbs().maxCoeff();
    z = zn;
    if (delta < tol) return z;
  }
  throw NoConvergence("conjugacy inversion fixed point stalled");
}

HolderReport holder_exponent_wu(const std::vector<LeafPair>& pairs,
                                const std::function<Vec(const Vec&)>& h,
                                int bootstrap, std::uint64_t seed) {
  HolderReport rep;
  for (const auto& p : pairs) {
    double disp = torusDist(wrap(h(p.x)), wrap(h(p.y)));
    if (disp <= 0.0 || p.leaf_dist <= 0.0) continue;
    rep.log_scale.push_back(std::log(p.leaf_dist));
    rep.log_disp.push_back(std::log(disp));
  }
  const size_t m = rep.log_scale.size();
  if (m < 8) throw InsufficientScales("too few usable leaf pairs for the regression");

  auto slope = [&](const std::vector<size_t>& pick) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i : pick) {
      double xv = rep.log_scale[i], yv = rep.log_disp[i];
      sx += xv;
      sy += yv;
      sxx += xv * xv;
      sxy += xv * yv;
    }
    double n = static_cast<double>(pick.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };

  std::vector<size_t> all(m);
  std::iota(all.begin(), all.end(), size_t{0});
  rep.alpha = slope(all);

  Rng rng(seed);
  std::vector<double> boots;
  boots.reserve(static_cast<size_t>(bootstrap));
  std::vector<size_t> pick(m);
  for (int b = 0; b < bootstrap; ++b) {
    for (size_t i = 0; i < m; ++i) pick[i] = static_cast<size_t>(rng.below(m));
    boots.push_back(slope(pick));
  }
  std::sort(boots.begin(), boots.end());
  rep.ci_lo = boots[static_cast<size_t>(0.025 * bootstrap)];
  rep.ci_hi = boots[static_cast<size_t>(0.975 * (bootstrap - 1))];
  return rep;
}

DensityReport pushforward_density(const std::function<Vec(const Vec&)>& h,
                                  int dim, long samples, int bins_per_axis,
                                  std::uint64_t seed) {
  DensityReport rep;
  rep.bins_per_axis = bins_per_axis;
  rep.samples = samples;
  long bins = 1;
  for (int k = 0; k < dim; ++k) bins *= bins_per_axis;
  rep.counts.assign(static_cast<size_t>(bins), 0.0);

  Rng rng(seed);
  for (long s = 0; s < samples; ++s) {
    Vec y = wrap(h(rng.uniformVec(dim)));
    long idx = 0;
    for (int k = 0; k < dim; ++k) {
      int b = static_cast<int>(y[k] * bins_per_axis);
      if (b >= bins_per_axis) b = bins_per_axis - 1;
      idx = idx * bins_per_axis + b;
    }
    rep.counts[static_cast<size_t>(idx)] += 1.0;
  }

  double expect = static_cast<double>(samples) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (double c : rep.counts) chi2 += (c - expect) * (c - expect) / expect;
  rep.chi2 = chi2;
  rep.dof = bins - 1;
  // Wilson-Hilferty cube-root normalization of the chi-square statistic
  double k = static_cast<double>(rep.dof);
  rep.z = (std::cbrt(chi2 / k) - (1.0 - 2.0 / (9.0 * k))) /
          std::sqrt(2.0 / (9.0 * k));
  rep.within_99 = std::abs(rep.z) < 2.576;
  return rep;
}

}  // namespace endolab
