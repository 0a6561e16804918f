#pragma once

#include "endolab/core.hpp"

namespace endolab {

/// Integer matrix inducing a toral endomorphism. Row-major storage, exact
/// integer arithmetic for determinants, powers and adjugates (d <= 3).
struct IntMatrix {
  int dim = 0;
  std::array<long long, 9> e{};

  static IntMatrix fromRows(const std::vector<std::vector<long long>>& rows);
  static IntMatrix identity(int d);
  /// Companion matrix of the monic cubic x^3 + a x^2 + b x + c.
  static IntMatrix companionCubic(long long a, long long b, long long c);
  /// Block-diagonal of a 2x2 integer matrix and a scalar.
  static IntMatrix blockDiag(const IntMatrix& m2, long long scalar);

  long long at(int i, int j) const { return e[static_cast<size_t>(i * dim + j)]; }
  long long& at(int i, int j) { return e[static_cast<size_t>(i * dim + j)]; }

  long long det() const;
  IntMatrix adjugate() const;  // det * inverse, exact
  IntMatrix mul(const IntMatrix& o) const;
  IntMatrix pow(int n) const;
  IntMatrix minusIdentity() const;
  IVec apply(const IVec& v) const;

  long long degree() const { return std::llabs(det()); }
  bool invertible() const { return degree() == 1; }

  /// Monic characteristic polynomial coefficients c[0] + c[1] x + ... + x^d.
  std::vector<long long> charPoly() const;

  Mat real() const;
  bool operator==(const IntMatrix& o) const { return dim == o.dim && e == o.e; }
};

/// Eigen-data of the linearization: eigenvalues sorted by ascending modulus,
/// adapted basis with E^s columns first, then the unstable blocks.
struct SpectralSplitting {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> moduli;
  int stable_dim = 0;
  std::vector<int> unstable_dims;
  Mat basis;
  Mat adapted_inverse;
  long long degree = 0;

  int dim() const { return static_cast<int>(moduli.size()); }
  int unstableCount() const { return dim() - stable_dim; }
  /// log-moduli of the unstable eigenvalues, weak to strong.
  std::vector<double> unstableLogModuli() const;
  double stableLogModulus() const;  // requires stable_dim == 1
  /// min over eigenvalues of | |lambda| - 1 |.
  double gapToOne() const;
};

/// Constants of the partially hyperbolic definition: 0 < nu < g1 <= g2 < mu.
struct PHConstants {
  double nu = 0, gamma1 = 0, gamma2 = 0, mu = 0, C = 1;
  bool valid() const {
    return nu > 0 && nu < gamma1 && gamma1 <= gamma2 && gamma2 < mu && nu < 1 &&
           mu > 1 && C >= 1;
  }
};

SpectralSplitting spectral_splitting(const IntMatrix& m, double tol = 1e-9);

/// True iff the characteristic polynomial has no rational root (sufficient
/// for irreducibility over Q at degree 2 and 3).
bool check_irreducible(const IntMatrix& m);

/// Deterministic lexicographic scan over 3x3 companion matrices of monic
/// cubics with |coefficients| <= coeff_bound. Returns the first matrix with
/// one root of modulus < 1, two distinct real roots of modulus > 1,
/// |det| >= 2 and irreducible characteristic polynomial.
IntMatrix search_irreducible_model(int coeff_bound);

/// Coset representatives of Z^d / M Z^d, |det M| of them, each with
/// coordinates in [0, |det M|), in lexicographic scan order.
std::vector<IVec> preimage_offsets(const IntMatrix& m);

/// |det(M^n - I)| = number of n-periodic points of the induced toral map.
long long count_linear_periodic(const IntMatrix& m, int n);

}  // namespace endolab
