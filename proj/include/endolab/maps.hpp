#pragma once

#include "endolab/lattice.hpp"
#include "endolab/trig.hpp"

namespace endolab {

enum class PerturbationKind { None, ShearChain, ManufacturedConjugacy, GenericDisplacement };

/// Volume-preserving shear x -> x + amplitude * modulator(x) * direction.
/// The modulator may only depend on coordinates annihilated by the
/// direction, which makes the move exactly torus-periodic, volume
/// preserving and invertible in closed form.
struct ShearMove {
  Vec direction;       // unit vector
  TrigPoly modulator;  // depends only on coords j with direction[j] == 0
  double amplitude = 0.0;
};

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::None;
  std::vector<ShearMove> moves;  // ShearChain, applied in order
  TrigDisplacement bump;         // ManufacturedConjugacy: H = Id + bump
  TrigDisplacement eta;          // GenericDisplacement: phi = Id + eps*eta
  double epsilon = 0.0;
};

/// Smooth endomorphism model f = A o phi on T^d with closed-form
/// perturbation families. Immutable after construction; all evaluation
/// methods are pure and safe for concurrent use.
class EndomorphismModel {
 public:
  static EndomorphismModel make(const IntMatrix& a, PerturbationSpec pert,
                                double spectral_tol = 1e-9);
  static EndomorphismModel linear(const IntMatrix& a) {
    return make(a, PerturbationSpec{});
  }

  int dim() const { return a_.dim; }
  long long degree() const { return split_.degree; }
  const IntMatrix& matrix() const { return a_; }
  const SpectralSplitting& splitting() const { return split_; }
  const PerturbationSpec& perturbation() const { return pert_; }
  bool conservative() const {
    return pert_.kind == PerturbationKind::None ||
           pert_.kind == PerturbationKind::ShearChain;
  }

  /// f on the torus.
  Vec apply(const Vec& x) const { return wrap(applyLift(x)); }
  /// Lift of f to R^d.
  Vec applyLift(const Vec& x) const;
  /// The lift of f is a diffeomorphism of R^d; this is its inverse.
  Vec liftInverse(const Vec& y) const;
  Mat differential(const Vec& x) const;
  double logJacobian(const Vec& x) const;

  /// All degree-many preimages of y on the torus, ordered by coset offset.
  std::vector<Vec> preimages(const Vec& y) const;
  /// Uniform random inverse branch chain x_{-1}, ..., x_{-n}.
  std::vector<Vec> randomBackwardOrbit(const Vec& x0, int n,
                                       std::uint64_t stream) const;
  /// phi and its inverse (identity unless the kind composes with A directly).
  Vec phiLift(const Vec& x) const;
  Vec phiInverseLift(const Vec& z) const;

  /// Periodic displacement g = f~ - A~.
  Vec displacement(const Vec& x) const {
    return applyLift(x) - areal_ * x;
  }

  /// Analytic coefficient-sum bound on ||Df - A||, measured in the adapted
  /// basis (multiplied by cond of the eigenbasis).
  double c1DistanceEstimate() const { return c1_bound_; }
  /// Deterministic grid sup of ||Df - A|| (cross-check, Euclidean norm).
  double c1GridSup(int per_axis = 64) const;
  double c1Budget() const { return c1_budget_; }
  bool certifiedAnosov() const { return c1_bound_ <= c1_budget_; }

  /// Same model with the perturbation scaled by t in [0, 1]; used for
  /// homotopy continuation of periodic points.
  EndomorphismModel scaledPerturbation(double t) const;

  // ManufacturedConjugacy helpers (H = Id + bump).
  Vec conjHLift(const Vec& x) const;
  Vec conjHInvLift(const Vec& x) const;
  Mat conjDH(const Vec& x) const;

  const Mat& linearReal() const { return areal_; }
  const Mat& linearInverse() const { return ainv_; }
  const std::vector<IVec>& cosetOffsets() const { return offsets_; }

 private:
  IntMatrix a_;
  SpectralSplitting split_;
  PerturbationSpec pert_;
  Mat areal_, ainv_;
  std::vector<IVec> offsets_;
  double c1_bound_ = 0.0, c1_budget_ = 0.0;

  Vec newtonPreimage(const Vec& target, const Vec& seed) const;
};

/// Resolves a direction selector ("su-eigvec" | "axis:k") against the
/// splitting of A.
Vec resolveDirection(const std::string& selector, const SpectralSplitting& s);

/// Validates that a shear move is structurally volume preserving.
void validateShear(const ShearMove& move, int dim);

}  // namespace endolab
