#pragma once

#include "endolab/maps.hpp"

#include <functional>

namespace endolab {

/// Grid-sampled displacement u of the conjugacy h = Id + u with
/// h o f = A o h, stored componentwise in the adapted basis of A.
/// Component j solves lambda_j c_j(x) = c_j(f(x)) + g_j(x) with
/// g = adapted_inverse (f - A); unstable components by forward
/// contraction, the stable one by backward-branch attachment.
class ConjugacyField {
 public:
  ConjugacyField(int dim, int grid_n, const SpectralSplitting& split,
                 const Vec& phase);

  int dim() const { return dim_; }
  int gridN() const { return grid_n_; }
  const Vec& phase() const { return phase_; }
  bool hasStable() const { return has_stable_; }
  double aprioriBound() const { return apriori_bound_; }
  double residualSup() const { return residual_sup_; }

  /// Periodic multilinear interpolation of adapted component c.
  double evalComponent(int c, const Vec& x) const;
  /// u(x) in the original coordinates (missing stable part counts as 0).
  Vec evalU(const Vec& x) const;
  Vec evalH(const Vec& x) const { return x + evalU(x); }

  std::vector<double>& component(int c) { return comps_[static_cast<size_t>(c)]; }
  const std::vector<double>& component(int c) const {
    return comps_[static_cast<size_t>(c)];
  }
  long cells() const { return cells_; }
  Vec gridPoint(long idx) const;

  void markStable() { has_stable_ = true; }
  void setAprioriBound(double b) { apriori_bound_ = b; }
  void setResidual(double r) { residual_sup_ = r; }
  const Mat& basis() const { return basis_; }
  const Mat& adaptedInverse() const { return adapted_inverse_; }
  int stableDim() const { return stable_dim_; }

 private:
  int dim_, grid_n_, stable_dim_;
  long cells_;
  Vec phase_;
  Mat basis_, adapted_inverse_;
  std::vector<std::vector<double>> comps_;  // [component][cell]
  bool has_stable_ = false;
  double apriori_bound_ = 0.0, residual_sup_ = 0.0;
};

struct SolveReport {
  std::vector<int> sweeps;           // per component
  std::vector<double> final_update;  // sup update at the last sweep
  std::vector<double> update_ratio;  // geometric-rate estimate
};

/// Solves the unstable components by full-grid Jacobi iteration from zero.
/// `phase` shifts every grid point by phase/N (grid-phase consistency test).
ConjugacyField solve_unstable_component(const EndomorphismModel& f, int grid_n,
                                        double tol = 1e-11,
                                        int max_sweeps = 200,
                                        const Vec& phase = Vec(),
                                        SolveReport* rep = nullptr);

/// Attaches the stable component by backward-branch contraction along the
/// offset-0 inverse branch. Meaningful for maps whose stable sums are
/// branch-independent; callers should check the specialness diagnostic
/// first.
void attach_stable(const EndomorphismModel& f, ConjugacyField& field,
                   double tol = 1e-11, int max_sweeps = 200,
                   SolveReport* rep = nullptr);

struct StableSumSample {
  std::vector<double> values;  // one truncated sum per chain
  double mean = 0.0;
  double variance = 0.0;
};

/// Truncated stable sums u^s(x) = -sum_{j>=1} lambda_s^{j-1} g^s(x_{-j})
/// over independent random backward chains.
StableSumSample stable_backward_sum(const EndomorphismModel& f, const Vec& x,
                                    int chain_len, int n_chains,
                                    std::uint64_t stream);

struct SpecialnessDiagnostic {
  std::vector<double> per_point_variance;
  double max_variance = 0.0;
  int chain_len = 0;
  int chains_per_point = 0;
};

/// Chain-dependence of the stable sums over random base points. Variance
/// near zero certifies the special (well-defined unstable direction)
/// regime; large variance witnesses non-specialness.
SpecialnessDiagnostic specialness_scan(const EndomorphismModel& f,
                                       int n_points, int chain_len,
                                       int n_chains, std::uint64_t seed);

/// sup over n_test random points of the quotient distance between h(f(x))
/// and A h(x).
double conjugacy_residual(const ConjugacyField& field,
                          const EndomorphismModel& f, int n_test,
                          std::uint64_t seed);

/// Grid-free evaluation of u(x) by truncated geometric series along the
/// forward orbit (unstable components) and the offset-0 backward orbit
/// (stable component). Resolves structure below any grid scale; used for
/// the regularity estimates.
Vec series_displacement(const EndomorphismModel& f, const Vec& x,
                        int forward_terms = 48, int backward_terms = 48);

/// Inverse of h = Id + u on the lift, u evaluated by the truncated series;
/// fixed-point iteration z <- y - u(z).
Vec series_conjugacy_inverse(const EndomorphismModel& f, const Vec& y,
                             int max_iter = 80, double tol = 1e-12);

struct LeafPair {
  Vec x, y;
  double leaf_dist = 0.0;
};

struct HolderReport {
  double alpha = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // bootstrap 95%
  std::vector<double> log_scale;     // per pair
  std::vector<double> log_disp;      // per pair
};

/// Regresses log |h(x) - h(y)| on log leaf-distance over pairs sampled on
/// weak-unstable leaves; slope estimates the Hoelder exponent of h along
/// that direction. Bootstrap CI over pair resampling.
HolderReport holder_exponent_wu(const std::vector<LeafPair>& pairs,
                                const std::function<Vec(const Vec&)>& h,
                                int bootstrap = 400, std::uint64_t seed = 1);

struct DensityReport {
  int bins_per_axis = 0;
  long samples = 0;
  std::vector<double> counts;  // flattened histogram of h(uniform)
  double chi2 = 0.0;
  long dof = 0;
  double z = 0.0;  // Wilson-Hilferty normal score of chi2
  bool within_99 = false;
};

/// Pushes a uniform sample through h and tests the image histogram for
/// uniformity (chi-square with normal approximation).
DensityReport pushforward_density(const std::function<Vec(const Vec&)>& h,
                                  int dim, long samples, int bins_per_axis,
                                  std::uint64_t seed);

}  // namespace endolab
