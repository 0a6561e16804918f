#include "endolab/foliation.hpp"

#include "endolab/conjugacy.hpp"

#include <algorithm>
#include <sstream>

namespace endolab {

namespace {

Vec cross3(const Vec& a, const Vec& b) {
  Vec c(3);
  c[0] = a[1] * b[2] - a[2] * b[1];
  c[1] = a[2] * b[0] - a[0] * b[2];
  c[2] = a[0] * b[1] - a[1] * b[0];
  return c;
}

double angleBetween(const Vec& a, const Vec& b) {
  double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  if (c > 1.0) c = 1.0;
  return std::acos(c);
}

Vec genericVec(int d, int which) {
  Vec v(d);
  if (which == 0) {
    v[0] = 0.8423;
    v[1] = -0.5231;
    if (d == 3) v[2] = 0.1294;
  } else {
    v[0] = 0.2113;
    v[1] = 0.6722;
    if (d == 3) v[2] = -0.7081;
  }
  return v / v.norm();
}

// orthonormalize two columns in place, Gram-Schmidt
void orthonormalize2(Vec& a, Vec& b) {
  a /= a.norm();
  b -= a.dot(b) * a;
  b /= b.norm();
}

struct CocycleData {
  std::vector<Mat> fwd_df;   // Df along x0 .. x_{n-1}
  std::vector<Mat> back_df;  // Df along the backward chain, deepest last
};

CocycleData cocycleData(const EndomorphismModel& f, const Vec& x, int n_fwd,
                        std::uint64_t chain_stream) {
  CocycleData cd;
  Vec cur = wrap(x);
  cd.fwd_df.reserve(static_cast<size_t>(n_fwd));
  for (int t = 0; t < n_fwd; ++t) {
    cd.fwd_df.push_back(f.differential(cur));
    cur = f.apply(cur);
  }
  auto chain = f.randomBackwardOrbit(x, n_fwd, chain_stream);
  cd.back_df.reserve(chain.size());
  for (const auto& p : chain) cd.back_df.push_back(f.differential(p));
  return cd;
}

Vec pullbackDir(const CocycleData& cd, Vec v) {
  for (auto it = cd.fwd_df.rbegin(); it != cd.fwd_df.rend(); ++it) {
    v = it->inverse() * v;
    v /= v.norm();
  }
  return v;
}

void pullbackPlane(const CocycleData& cd, Vec& a, Vec& b) {
  for (auto it = cd.fwd_df.rbegin(); it != cd.fwd_df.rend(); ++it) {
    Mat inv = it->inverse();
    a = inv * a;
    b = inv * b;
    orthonormalize2(a, b);
  }
}

Vec pushforwardDir(const CocycleData& cd, Vec v) {
  // back_df[j] = Df(x_{-(j+1)}), deepest chain point first application
  for (auto it = cd.back_df.rbegin(); it != cd.back_df.rend(); ++it) {
    v = (*it) * v;
    v /= v.norm();
  }
  return v;
}

void pushforwardPlane(const CocycleData& cd, Vec& a, Vec& b) {
  for (auto it = cd.back_df.rbegin(); it != cd.back_df.rend(); ++it) {
    a = (*it) * a;
    b = (*it) * b;
    orthonormalize2(a, b);
  }
}

void orientWith(Vec& v, const Vec& ref) {
  if (v.dot(ref) < 0.0) v = -v;
}

}  // namespace

SplittingFrame splitting_at(const EndomorphismModel& f, const Vec& x, int n_fwd,
                            std::uint64_t chain_stream, double residual_tol) {
  const int d = f.dim();
  const auto& split = f.splitting();
  CocycleData cd = cocycleData(f, x, n_fwd, chain_stream);

  SplittingFrame fr;
  fr.x = wrap(x);
  fr.chain_stream = chain_stream;
  fr.frame.resize(d, d);
  fr.residuals = Vec::Zero(d);

  // stable direction, with a second generic start as convergence witness
  Vec es = pullbackDir(cd, genericVec(d, 0));
  Vec es2 = pullbackDir(cd, genericVec(d, 1));
  fr.residuals[0] = angleBetween(es, es2);
  orientWith(es, split.basis.col(0));
  fr.frame.col(0) = es;

  if (d == 2) {
    Vec eu = pushforwardDir(cd, genericVec(d, 0));
    Vec eu2 = pushforwardDir(cd, genericVec(d, 1));
    fr.residuals[1] = angleBetween(eu, eu2);
    orientWith(eu, split.basis.col(1));
    fr.frame.col(1) = eu;
  } else {
    // weak plane E^s + E^wu by pullback, unstable plane by pushforward
    Vec a = genericVec(3, 0), b = genericVec(3, 1);
    pullbackPlane(cd, a, b);
    Vec n_weak = cross3(a, b);
    Vec a2(3), b2(3);
    a2 << 0.5774, 0.5774, -0.5774;
    b2 << -0.3015, 0.9045, 0.3015;
    pullbackPlane(cd, a2, b2);
    Vec n_weak2 = cross3(a2, b2);

    Vec u1 = genericVec(3, 0), u2 = genericVec(3, 1);
    pushforwardPlane(cd, u1, u2);
    Vec n_u = cross3(u1, u2);
    Vec u3(3), u4(3);
    u3 << 0.5774, 0.5774, -0.5774;
    u4 << -0.3015, 0.9045, 0.3015;
    pushforwardPlane(cd, u3, u4);
    Vec n_u2 = cross3(u3, u4);

    Vec esu = pushforwardDir(cd, genericVec(3, 0));
    Vec esu2 = pushforwardDir(cd, genericVec(3, 1));
    fr.residuals[2] = angleBetween(esu, esu2);
    orientWith(esu, split.basis.col(2));
    fr.frame.col(2) = esu;

    Vec ewu = cross3(n_weak, n_u);
    ewu /= ewu.norm();
    Vec ewu2 = cross3(n_weak2, n_u2);
    ewu2 /= ewu2.norm();
    fr.residuals[1] = angleBetween(ewu, ewu2);
    orientWith(ewu, split.basis.col(1));
    fr.frame.col(1) = ewu;
  }

  fr.min_angle = 3.15;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      fr.min_angle = std::min(fr.min_angle,
                              angleBetween(fr.frame.col(i), fr.frame.col(j)));

  for (int i = 0; i < d; ++i)
    if (fr.residuals[i] > residual_tol) {
      std::ostringstream os;
      os << "splitting direction " << i << " did not dominate: residual "
         << fr.residuals[i] << " after " << n_fwd << " steps";
      throw NoDomination(os.str());
    }
  return fr;
}

Vec bundle_direction(const EndomorphismModel& f, const Vec& x, Bundle b,
                     int n_fwd, std::uint64_t chain_stream) {
  SplittingFrame fr = splitting_at(f, x, n_fwd, chain_stream);
  switch (b) {
    case Bundle::Stable:
      return fr.frame.col(0);
    case Bundle::WeakUnstable:
      return fr.frame.col(f.dim() == 2 ? 1 : 1);
    case Bundle::StrongUnstable:
      if (f.dim() == 2) return fr.frame.col(1);
      return fr.frame.col(2);
    case Bundle::Unstable:
      break;
  }
  throw ConfigError("bundle has no single direction");
}

LeafSegment integrate_leaf(const EndomorphismModel& f, const Vec& x, Bundle b,
                           double arclength, double step,
                           std::uint64_t chain_stream, int n_fwd) {
  if (step > 1e-3 + 1e-15) throw ConfigError("leaf step must be <= 1e-3");
  LeafSegment seg;
  seg.bundle = b;
  seg.base = wrap(x);
  seg.step = step;
  seg.chain_stream = chain_stream;

  Vec ref;  // orientation carried by continuity
  {
    const auto& basis = f.splitting().basis;
    int col = (b == Bundle::Stable) ? 0
              : (b == Bundle::WeakUnstable || f.dim() == 2) ? 1
                                                            : 2;
    ref = basis.col(col);
  }

  auto field = [&](const Vec& p, const Vec& orient) {
    Vec dir = bundle_direction(f, wrap(p), b, n_fwd, chain_stream);
    double align = dir.dot(orient);
    if (std::abs(align) < 0.1) {
      std::ostringstream os;
      os << "frame orientation lost near lift point (" << p.transpose() << ")";
      throw OrientationFlip(os.str());
    }
    if (align < 0.0) dir = -dir;
    return dir;
  };

  long n_steps = static_cast<long>(std::ceil(arclength / step));
  Vec p = seg.base;
  seg.points.push_back(p);
  Vec prev_tangent;
  for (long i = 0; i < n_steps; ++i) {
    Vec k1 = field(p, ref);
    Vec k2 = field(p + 0.5 * step * k1, k1);
    Vec k3 = field(p + 0.5 * step * k2, k2);
    Vec k4 = field(p + step * k3, k3);
    Vec tangent = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    p += step * tangent;
    seg.points.push_back(p);
    ref = k4;
    if (prev_tangent.size()) {
      double turn = angleBetween(prev_tangent, tangent) / step;
      seg.max_curvature = std::max(seg.max_curvature, turn);
    }
    prev_tangent = tangent;
  }
  return seg;
}

Vec leaf_point(const LeafSegment& seg, double s) {
  if (s < 0.0) throw ConfigError("leaf arclength must be nonnegative");
  double t = s / seg.step;
  auto i = static_cast<size_t>(t);
  if (i >= seg.points.size() - 1) {
    if (s > seg.length() + 1e-9) throw ConfigError("arclength beyond segment");
    return seg.points.back();
  }
  double fr = t - static_cast<double>(i);
  return (1.0 - fr) * seg.points[i] + fr * seg.points[i + 1];
}

Vec leaf_point_dynamic(const EndomorphismModel& f, const Vec& x, Bundle b,
                       double offset, int depth) {
  const int d = f.dim();
  if (b == Bundle::Stable || b == Bundle::Unstable)
    throw ConfigError("dynamic leaf points cover the wu and su bundles");
  if (d == 2) b = Bundle::StrongUnstable;  // single unstable direction
  const auto& split = f.splitting();
  const int col = (b == Bundle::StrongUnstable) ? d - 1 : 1;
  Vec e = split.basis.col(col);
  e /= e.norm();
  if (offset == 0.0) return x;

  if (f.perturbation().kind == PerturbationKind::ManufacturedConjugacy) {
    // leaves are exact images of the eigenlines under H
    return f.conjHLift(f.conjHInvLift(x) + offset * e);
  }

  const double lam = split.moduli[static_cast<size_t>(col)];
  const Mat& basis = split.basis;
  const Mat& binv = split.adapted_inverse;
  // the differential propagates differences without cancellation and is
  // exact when the map is linear
  const bool always_diff = f.perturbation().kind == PerturbationKind::None;
  auto projectUnstable = [&](Vec& delta) {
    Vec c = binv * delta;
    for (int i = 0; i < split.stable_dim; ++i) c[i] = 0.0;
    delta = basis * c;
  };

  // The seed offset is scaled so that the linear model returns exactly
  // x + offset * e; the perturbed leaf parameter differs from offset by
  // the bounded cocycle distortion.
  Vec delta(d);
  if (b == Bundle::StrongUnstable) {
    // forward graph transform from a straight seed at the depth-th point
    // of the deterministic lift-inverse branch
    std::vector<Vec> ys(static_cast<size_t>(depth) + 1);
    ys[0] = wrap(x);
    for (int j = 0; j < depth; ++j)
      ys[static_cast<size_t>(j) + 1] = wrap(f.liftInverse(ys[static_cast<size_t>(j)]));
    delta = offset * std::pow(lam, -depth) * e;
    for (int j = depth; j >= 1; --j) {
      const Vec& y = ys[static_cast<size_t>(j)];
      // tiny differences go through the differential: the exact finite
      // difference would lose them to cancellation against y
      if (always_diff || delta.norm() < 1e-8) delta = f.differential(y) * delta;
      else delta = f.applyLift(y + delta) - f.applyLift(y);
      projectUnstable(delta);
    }
  } else {
    // backward graph transform from a straight seed at f^depth(x); the
    // difference recursion keeps every evaluation at torus scale
    std::vector<Vec> xs(static_cast<size_t>(depth) + 1);
    xs[0] = wrap(x);
    for (int j = 0; j < depth; ++j)
      xs[static_cast<size_t>(j) + 1] = f.apply(xs[static_cast<size_t>(j)]);
    delta = offset * std::pow(lam, depth) * e;
    for (int j = depth; j >= 1; --j) {
      const Vec& prev = xs[static_cast<size_t>(j) - 1];
      if (always_diff || delta.norm() < 1e-8) {
        delta = f.differential(prev).inverse() * delta;
      } else {
        Vec z = f.applyLift(prev);
        delta = f.liftInverse(z + delta) - prev;
      }
      projectUnstable(delta);
    }
  }
  return x + delta;
}

LeafSegment leaf_segment_dynamic(const EndomorphismModel& f, const Vec& x,
                                 Bundle b, double arclength, double step,
                                 int depth) {
  if (step > 1e-3 + 1e-15) throw ConfigError("leaf step must be <= 1e-3");
  LeafSegment seg;
  seg.bundle = b;
  seg.base = wrap(x);
  seg.step = step;

  // raw polyline in the leaf parameter, spacing adapted to hold the point
  // spacing near the requested step
  std::vector<Vec> raw{seg.base};
  std::vector<double> arc{0.0};
  double tau = 0.0, dtau = step;
  while (arc.back() < arclength) {
    tau += dtau;
    Vec p = leaf_point_dynamic(f, seg.base, b, tau, depth);
    double ds = (p - raw.back()).norm();
    if (ds > 4.0 * step && dtau > 0.25 * step) {
      tau -= dtau;
      dtau *= 0.5;
      continue;
    }
    raw.push_back(p);
    arc.push_back(arc.back() + ds);
    if (ds < 0.5 * step) dtau *= 1.5;
    else if (ds > 2.0 * step) dtau *= 0.75;
    if (raw.size() > 4000000)
      throw NoConvergence("dynamic leaf segment did not reach the arclength");
  }

  // resample to uniform arclength
  long n_steps = static_cast<long>(std::ceil(arclength / step));
  seg.points.reserve(static_cast<size_t>(n_steps) + 1);
  seg.points.push_back(seg.base);
  size_t j = 0;
  Vec prev_tangent;
  for (long i = 1; i <= n_steps; ++i) {
    double s = static_cast<double>(i) * step;
    while (j + 2 < arc.size() && arc[j + 1] < s) ++j;
    double span = arc[j + 1] - arc[j];
    double t = span > 0.0 ? (s - arc[j]) / span : 0.0;
    Vec p = (1.0 - t) * raw[j] + t * raw[j + 1];
    Vec tangent = p - seg.points.back();
    if (prev_tangent.size() && tangent.norm() > 0.0) {
      double turn = angleBetween(prev_tangent, tangent) / step;
      seg.max_curvature = std::max(seg.max_curvature, turn);
    }
    if (tangent.norm() > 0.0) prev_tangent = tangent;
    seg.points.push_back(p);
  }
  return seg;
}

QuasiIsometryReport quasi_isometry_scan(const EndomorphismModel& f,
                                        const LeafSegment& seg, int pair_count,
                                        std::uint64_t seed) {
  QuasiIsometryReport rep;
  rep.segment_length = seg.length();
  if (rep.segment_length < 20.0)
    throw ConfigError("quasi-isometry scan needs segment length >= 20");

  const auto& basis = f.splitting().basis;
  int col = (seg.bundle == Bundle::Stable) ? 0
            : (seg.bundle == Bundle::WeakUnstable || f.dim() == 2) ? 1
                                                                   : 2;
  Vec e = basis.col(col);
  e /= e.norm();

  // offset from the linear leaf through the base
  for (const auto& p : seg.points) {
    Vec d = p - seg.base;
    Vec off = d - d.dot(e) * e;
    rep.r_hat = std::max(rep.r_hat, off.norm());
  }

  Rng rng(seed);
  const size_t n = seg.points.size();
  struct PairObs {
    double dm, angle;
  };
  std::vector<PairObs> obs;
  double q_needed = 0.0;
  for (int k = 0; k < pair_count; ++k) {
    size_t i = static_cast<size_t>(rng.below(n));
    size_t j = static_cast<size_t>(rng.below(n));
    if (i == j) continue;
    double dw = std::abs(static_cast<double>(i) - static_cast<double>(j)) * seg.step;
    Vec diff = seg.points[i] - seg.points[j];
    double dm = diff.norm();
    q_needed = std::max(q_needed, dw / (dm + 1.0));
    obs.push_back({dm, angleBetween(diff, e)});
  }
  rep.q = std::max(1.0, q_needed);

  // binned angle-to-linear-direction trend over pair distance
  const int n_bins = 6;
  double dmax = 0.0;
  for (const auto& o : obs) dmax = std::max(dmax, o.dm);
  std::vector<double> sums(n_bins, 0.0), dsum(n_bins, 0.0);
  std::vector<int> cnt(n_bins, 0);
  for (const auto& o : obs) {
    int b = static_cast<int>(o.dm / (dmax + 1e-12) * n_bins);
    if (b >= n_bins) b = n_bins - 1;
    sums[static_cast<size_t>(b)] += o.angle;
    dsum[static_cast<size_t>(b)] += o.dm;
    ++cnt[static_cast<size_t>(b)];
  }
  for (int b = 0; b < n_bins; ++b)
    if (cnt[static_cast<size_t>(b)] > 0) {
      rep.angle_bin_dist.push_back(dsum[static_cast<size_t>(b)] / cnt[static_cast<size_t>(b)]);
      rep.angle_bin_mean.push_back(sums[static_cast<size_t>(b)] / cnt[static_cast<size_t>(b)]);
    }
  if (rep.angle_bin_mean.size() >= 2) {
    bool mostly = true;
    for (size_t b = 1; b < rep.angle_bin_mean.size(); ++b)
      if (rep.angle_bin_mean[b] > rep.angle_bin_mean[b - 1] * 1.1 + 1e-9)
        mostly = false;
    rep.angle_trend_decreasing =
        mostly && rep.angle_bin_mean.back() <= rep.angle_bin_mean.front() + 1e-12;
  }
  return rep;
}

HolonomyReport holonomy_jacobian(const EndomorphismModel& f, const Vec& base,
                                 const std::vector<double>& wu_offsets,
                                 double transversal_len, int samples,
                                 double step, std::uint64_t chain_stream,
                                 double band_t) {
  if (f.dim() != 3)
    throw UnsupportedDimension("holonomy sampling needs the 3D flag");
  if (samples < 3) throw ConfigError("holonomy needs at least 3 samples");
  (void)chain_stream;
  HolonomyReport rep;
  rep.band_t = band_t;
  rep.wu_offsets = wu_offsets;

  // Transversal pair = straight strong-direction segments inside one
  // unstable plaque, sliding = weak-unstable leaves. Leaves are labeled by
  // the strong coordinate of the conjugacy image, so matching needs no
  // curve intersection.
  const auto& split = f.splitting();
  const Mat& binv = split.adapted_inverse;
  Vec p0 = wrap(base);
  const int depth = 24;
  const double len = transversal_len;
  Vec e_su = split.basis.col(2);
  e_su /= e_su.norm();

  struct Curve {
    std::vector<Vec> pts;   // lift points
    std::vector<double> s;  // arclength
  };
  auto suSegment = [&](const Vec& anchor, double hi, int npts) {
    Curve c;
    c.pts.reserve(static_cast<size_t>(npts) + 1);
    for (int j = 0; j <= npts; ++j) {
      double t = hi * static_cast<double>(j) / npts;
      c.pts.push_back(anchor + t * e_su);
      c.s.push_back(t);
    }
    return c;
  };

  // A-side strong coordinate: constant on weak-unstable leaves (which the
  // conjugacy h maps to straight weak lines) and drifting monotonically
  // across them along the strong direction.
  auto chi = [&](const Vec& p) {
    Vec hp = p + series_displacement(f, p);
    return (binv * hp)[2];
  };
  (void)step;

  const int oversample = 8;
  const int refine_levels = 4;  // increment counts samples, 2x, 4x, 8x
  const int max_levels = samples << (refine_levels - 1);
  const int fine = std::max(256, max_levels * oversample);
  Curve t1 = suSegment(p0, len, fine);

  auto chiAlong = [&](const Curve& c) {
    std::vector<double> v(c.pts.size());
    for (size_t j = 0; j < c.pts.size(); ++j) v[j] = chi(c.pts[j]);
    return v;
  };
  // first arclength at which the curve reaches leaf label `level`; first
  // crossings stay monotone in the level even where chi wiggles backwards
  auto firstCrossing = [](const std::vector<double>& chis,
                          const std::vector<double>& s, double level) {
    if (level <= chis.front()) return s.front();
    for (size_t j = 1; j < chis.size(); ++j)
      if (chis[j] >= level) {
        double lo = chis[j - 1], hi = chis[j];
        double fr = (hi > lo) ? std::min(1.0, std::max(0.0, (level - lo) / (hi - lo))) : 1.0;
        return s[j - 1] + fr * (s[j] - s[j - 1]);
      }
    return -1.0;  // level not reached
  };

  std::vector<double> chi1 = chiAlong(t1);
  double c_start = chi1.front(), c_end = chi1.front();
  for (double c : chi1) c_end = std::max(c_end, c);
  if (!(c_end > c_start))
    throw MatchingFailure("near transversal does not advance across leaves");

  auto levelsAt = [&](int n) {
    std::vector<double> lv(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
      lv[static_cast<size_t>(i)] =
          c_start + (c_end - c_start) * static_cast<double>(i) / n;
    return lv;
  };
  auto crossingsAt = [&](const std::vector<double>& chis,
                         const std::vector<double>& s,
                         const std::vector<double>& lv) {
    std::vector<double> out(lv.size());
    for (size_t i = 0; i < lv.size(); ++i) {
      out[i] = firstCrossing(chis, s, lv[i]);
      if (out[i] < 0.0)
        throw MatchingFailure("far transversal does not reach a leaf label");
    }
    return out;
  };

  for (int r = 0; r < refine_levels; ++r)
    rep.refine_samples.push_back(samples << r);
  rep.refine_concentration.assign(static_cast<size_t>(refine_levels), 0.0);

  bool all_in_band = true;
  for (double offset : wu_offsets) {
    // both transversals are anchored on the same leaf (chi(p1) == chi(p0)
    // up to the leaf approximation), so first crossings are measured from
    // the anchors; the far scan is extended until it covers every label
    Vec p1 = leaf_point_dynamic(f, p0, Bundle::WeakUnstable, offset, depth);
    double hi = len + 0.3;
    Curve t2;
    std::vector<double> chi2;
    for (;;) {
      int k2 = static_cast<int>(std::ceil(hi / len * fine));
      t2 = suSegment(p1, hi, k2);
      chi2 = chiAlong(t2);
      double c2_max = *std::max_element(chi2.begin(), chi2.end());
      if (c2_max >= c_end) break;
      hi += 0.3;
      if (hi > len + 1.6)
        throw MatchingFailure("far transversal never covers the leaf labels");
    }

    for (int r = 0; r < refine_levels; ++r) {
      const int n = samples << r;
      std::vector<double> lv = levelsAt(n);
      std::vector<double> s1 = crossingsAt(chi1, t1.s, lv);
      std::vector<double> s2 = crossingsAt(chi2, t2.s, lv);
      std::vector<double> ratios;
      double outside = 0.0;
      for (int i = 0; i + 1 <= n; ++i) {
        double num = s2[static_cast<size_t>(i) + 1] - s2[static_cast<size_t>(i)];
        double den = s1[static_cast<size_t>(i) + 1] - s1[static_cast<size_t>(i)];
        if (den <= 0.0 || num < 0.0)
          throw MatchingFailure("degenerate transversal increment");
        double rt = std::max(num / den, 1e-300);
        ratios.push_back(rt);
        if (rt < 1.0 / band_t || rt > band_t) outside += 1.0;
        rep.max_abs_log_ratio =
            std::max(rep.max_abs_log_ratio, std::abs(std::log(rt)));
      }
      double conc = outside / static_cast<double>(ratios.size());
      if (conc > 0.0) all_in_band = false;
      rep.refine_concentration[static_cast<size_t>(r)] +=
          conc / static_cast<double>(wu_offsets.size());
      if (r == 0) {
        rep.ratios.push_back(std::move(ratios));
        rep.concentration.push_back(conc);
      }
    }
  }
  rep.ac_band = all_in_band;
  if (refine_levels >= 2) {
    bool nondec = true;
    for (int r = 1; r < refine_levels; ++r)
      if (rep.refine_concentration[static_cast<size_t>(r)] + 0.02 <
          rep.refine_concentration[static_cast<size_t>(r) - 1])
        nondec = false;
    rep.growing_trend =
        nondec &&
        rep.refine_concentration.back() >
            rep.refine_concentration.front() + 0.02 &&
        rep.refine_concentration.back() > 0.1;
  }
  return rep;
}

PHConstants estimate_ph_constants(const EndomorphismModel& f, const Vec& x0,
                                  int n_samples, int n_fwd,
                                  std::uint64_t chain_stream) {
  const int d = f.dim();
  PHConstants c;
  c.nu = 0.0;
  c.mu = 1e300;
  c.gamma1 = 1e300;
  c.gamma2 = 0.0;
  Vec x = wrap(x0);
  for (int i = 0; i < n_samples; ++i) {
    SplittingFrame fr = splitting_at(f, x, n_fwd,
                                     deriveStream(chain_stream, static_cast<std::uint64_t>(i)));
    Mat df = f.differential(x);
    double rs = (df * fr.frame.col(0)).norm();
    c.nu = std::max(c.nu, rs);
    if (d == 3) {
      double rwu = (df * fr.frame.col(1)).norm();
      double rsu = (df * fr.frame.col(2)).norm();
      c.gamma1 = std::min(c.gamma1, rwu);
      c.gamma2 = std::max(c.gamma2, rwu);
      c.mu = std::min(c.mu, rsu);
    } else {
      double ru = (df * fr.frame.col(1)).norm();
      c.mu = std::min(c.mu, ru);
      c.gamma1 = c.gamma2 = 1.0;
    }
    x = f.apply(x);
  }
  c.C = 1.0;
  return c;
}

}  // namespace endolab
