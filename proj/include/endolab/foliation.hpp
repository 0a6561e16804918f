#pragma once

#include "endolab/maps.hpp"

namespace endolab {

enum class Bundle { Stable, WeakUnstable, StrongUnstable, Unstable };

/// Pointwise invariant frame. Columns of `frame`: e^s, e^{wu}, e^{su}
/// (d = 3) or e^s, e^u (d = 2), unit vectors oriented to agree with the
/// corresponding eigenbasis column of the linearization.
struct SplittingFrame {
  Vec x;
  Mat frame;
  std::uint64_t chain_stream = 0;  // backward chain used for the su part
  Vec residuals;                   // per-column convergence residual (radians)
  double min_angle = 0.0;          // min pairwise angle between columns
};

/// Frame from finite-time cocycle data: stable direction and the weak
/// 2-plane by pullback along the forward orbit, strong-unstable direction
/// and the unstable plane by pushforward along a random backward chain.
SplittingFrame splitting_at(const EndomorphismModel& f, const Vec& x,
                            int n_fwd = 200, std::uint64_t chain_stream = 1,
                            double residual_tol = 1e-6);

/// Convenience: the requested unit direction at x.
Vec bundle_direction(const EndomorphismModel& f, const Vec& x, Bundle b,
                     int n_fwd = 200, std::uint64_t chain_stream = 1);

struct LeafSegment {
  Bundle bundle = Bundle::WeakUnstable;
  Vec base;
  std::vector<Vec> points;  // lift, unwrapped, uniform arclength spacing
  double step = 0.0;
  double max_curvature = 0.0;  // turning angle per unit length, max
  std::uint64_t chain_stream = 0;

  double length() const {
    return step * static_cast<double>(points.size() - 1);
  }
};

/// 4th-order integration of the unit frame field on the lift, orientation
/// propagated by continuity from the base point.
LeafSegment integrate_leaf(const EndomorphismModel& f, const Vec& x, Bundle b,
                           double arclength, double step = 1e-3,
                           std::uint64_t chain_stream = 1, int n_fwd = 100);

/// Point at arclength s along the polyline (linear interpolation).
Vec leaf_point(const LeafSegment& seg, double s);

/// Point on the strong/weak-unstable leaf through x by the graph
/// transform: a straight segment is propagated through the dynamics
/// (backward for wu, forward for su) as a difference, re-projected onto
/// the invariant unstable plane at every step. Valid for models whose
/// unstable plane equals the linear one (linear and the canonical shear
/// families) and for manufactured-conjugacy models (closed form via H).
/// `offset` is the segment parameter at the far end of the propagation;
/// the realized leaf separation is offset scaled by the cocycle.
Vec leaf_point_dynamic(const EndomorphismModel& f, const Vec& x, Bundle b,
                       double offset, int depth = 24);

/// Leaf segment from the graph-transform parametrization, resampled to
/// uniform arclength spacing. Unlike `integrate_leaf` this does not need a
/// pointwise dominated direction field, so it also works where the weak
/// splitting is only measurable; validity matches `leaf_point_dynamic`.
LeafSegment leaf_segment_dynamic(const EndomorphismModel& f, const Vec& x,
                                 Bundle b, double arclength,
                                 double step = 1e-3, int depth = 24);

struct QuasiIsometryReport {
  double q = 0.0;            // minimal Q with d_leaf <= Q d + Q over pairs
  double r_hat = 0.0;        // max offset from the linear leaf via the base
  double segment_length = 0.0;
  std::vector<double> angle_bin_dist;   // mean pair distance per bin
  std::vector<double> angle_bin_mean;   // mean angle to the linear direction
  bool angle_trend_decreasing = false;
};

QuasiIsometryReport quasi_isometry_scan(const EndomorphismModel& f,
                                        const LeafSegment& seg, int pair_count,
                                        std::uint64_t seed);

struct HolonomyReport {
  std::vector<double> wu_offsets;              // transversal separations
  std::vector<std::vector<double>> ratios;     // divided-difference ratios
  std::vector<double> concentration;           // mass outside [1/T, T]
  std::vector<int> refine_samples;             // increments per refinement level
  std::vector<double> refine_concentration;    // mean over offsets per level
  double band_t = 2.0;
  double max_abs_log_ratio = 0.0;
  bool ac_band = false;  // all ratios inside the band at every offset and level
  bool growing_trend = false;  // refinement concentration grows and ends positive
};

/// Holonomy along weak-unstable leaves between two strong-unstable
/// transversal curves inside one unstable plaque, at each separation in
/// `wu_offsets`. Derivative ratios by divided differences of matched
/// arclengths.
HolonomyReport holonomy_jacobian(const EndomorphismModel& f, const Vec& base,
                                 const std::vector<double>& wu_offsets,
                                 double transversal_len, int samples,
                                 double step = 1e-3,
                                 std::uint64_t chain_stream = 1,
                                 double band_t = 2.0);

/// Finite-orbit estimates of the partial-hyperbolicity rates from frame
/// expansion factors sampled along an orbit.
PHConstants estimate_ph_constants(const EndomorphismModel& f, const Vec& x0,
                                  int n_samples = 200, int n_fwd = 150,
                                  std::uint64_t chain_stream = 1);

}  // namespace endolab
