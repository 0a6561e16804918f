#pragma once

#include "endolab/core.hpp"

namespace endolab {

/// One Fourier mode: c cos(2 pi k.x) + s sin(2 pi k.x).
struct TrigTerm {
  std::array<int, kMaxDim> freq{};
  double c = 0.0;
  double s = 0.0;
};

/// Real trigonometric polynomial on T^d with a finite coefficient table.
struct TrigPoly {
  int dim = 0;
  std::vector<TrigTerm> terms;

  double eval(const Vec& x) const;
  Vec grad(const Vec& x) const;

  /// Coefficient-sum bound on |g|.
  double supBound() const;
  /// Coefficient-sum bound on ||grad g||.
  double gradBound() const;
  /// Coefficient-sum bound on the second derivatives (largest entry).
  double hessBound() const;
};

/// A d-component trig-polynomial displacement field T^d -> R^d.
struct TrigDisplacement {
  int dim = 0;
  std::vector<TrigPoly> comps;

  bool empty() const { return comps.empty(); }
  Vec eval(const Vec& x) const;
  Mat jacobian(const Vec& x) const;  // row i = grad of component i
  double supBound() const;           // sqrt of sum of per-component bounds^2
  double jacBound() const;           // upper bound on ||D eta||_2
  double hessBound() const;
};

}  // namespace endolab
