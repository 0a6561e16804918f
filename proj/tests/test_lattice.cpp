#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"

using namespace endolab;
using namespace endolab::testhelp;

TEST_CASE("integer matrix arithmetic is exact") {
  IntMatrix a = mat2();
  CHECK(a.det() == 2);
  CHECK(a.degree() == 2);

  IntMatrix adj = a.adjugate();
  IntMatrix prod = a.mul(adj);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(prod.at(i, j) == (i == j ? 2 : 0));

  IntMatrix a2 = a.pow(2);
  CHECK(a2.at(0, 0) == 10);
  CHECK(a2.at(0, 1) == 4);
  CHECK(a2.at(1, 0) == 4);
  CHECK(a2.at(1, 1) == 2);

  auto cp = a.charPoly();  // x^2 - 4x + 2
  REQUIRE(cp.size() == 3);
  CHECK(cp[0] == 2);
  CHECK(cp[1] == -4);
  CHECK(cp[2] == 1);

  IntMatrix b = mat3();
  CHECK(b.det() == 4);
  auto cp3 = b.charPoly();  // (x - 2)(x^2 - 4x + 2)
  REQUIRE(cp3.size() == 4);
  CHECK(cp3[0] == -4);
  CHECK(cp3[1] == 10);
  CHECK(cp3[2] == -6);
  CHECK(cp3[3] == 1);
}

TEST_CASE("spectral splitting of the planar model") {
  SpectralSplitting s = spectral_splitting(mat2());
  REQUIRE(s.dim() == 2);
  CHECK(s.stable_dim == 1);
  CHECK(s.degree == 2);
  CHECK(s.moduli[0] == doctest::Approx(2.0 - kSqrt2).epsilon(1e-13));
  CHECK(s.moduli[1] == doctest::Approx(2.0 + kSqrt2).epsilon(1e-13));
  CHECK(s.gapToOne() == doctest::Approx(kSqrt2 - 1.0).epsilon(1e-13));

  // adapted basis diagonalizes the matrix
  Mat ar = mat2().real();
  for (int j = 0; j < 2; ++j) {
    Vec v = s.basis.col(j);
    double lam = s.eigenvalues[static_cast<size_t>(j)].real();
    CHECK((ar * v - lam * v).norm() < 1e-12);
  }
  CHECK((s.adapted_inverse * s.basis - Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("spectral splitting of the block model") {
  SpectralSplitting s = spectral_splitting(mat3());
  REQUIRE(s.dim() == 3);
  CHECK(s.stable_dim == 1);
  REQUIRE(s.unstable_dims.size() == 2);
  CHECK(s.unstable_dims[0] == 1);
  CHECK(s.unstable_dims[1] == 1);
  CHECK(s.degree == 4);
  CHECK(s.moduli[0] == doctest::Approx(2.0 - kSqrt2).epsilon(1e-13));
  CHECK(s.moduli[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(s.moduli[2] == doctest::Approx(2.0 + kSqrt2).epsilon(1e-13));

  auto ulog = s.unstableLogModuli();
  REQUIRE(ulog.size() == 2);
  CHECK(ulog[0] == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(ulog[1] == doctest::Approx(std::log(2.0 + kSqrt2)).epsilon(1e-13));
  CHECK(s.stableLogModulus() ==
        doctest::Approx(std::log(2.0 - kSqrt2)).epsilon(1e-13));

  // weak-unstable direction of the block model is the scalar axis
  Vec wu = s.basis.col(1);
  CHECK(std::abs(wu[2]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("irreducibility test and companion search") {
  CHECK(check_irreducible(mat2()));
  CHECK_FALSE(check_irreducible(mat3()));  // factors through the scalar block

  IntMatrix found = search_irreducible_model(6);
  CHECK(found == IntMatrix::companionCubic(-6, -6, 2));
  CHECK(check_irreducible(found));
  SpectralSplitting s = spectral_splitting(found);
  CHECK(s.stable_dim == 1);
  CHECK(s.unstable_dims.size() == 2);
  CHECK(s.moduli[1] > 1.0);
  CHECK(s.moduli[2] > s.moduli[1] + 1e-9);
  CHECK(s.degree >= 2);
}

TEST_CASE("coset representatives of the preimage lattice") {
  auto offs2 = preimage_offsets(mat2());
  REQUIRE(static_cast<long long>(offs2.size()) == mat2().degree());

  // distinct modulo A Z^d: adj(A) (u - v) != 0 mod det
  IntMatrix adj = mat2().adjugate();
  long long det = mat2().det();
  for (size_t i = 0; i < offs2.size(); ++i)
    for (size_t j = i + 1; j < offs2.size(); ++j) {
      IVec d = offs2[i] - offs2[j];
      IVec w = adj.apply(d);
      bool zero = true;
      for (int k = 0; k < 2; ++k)
        if (w[k] % det != 0) zero = false;
      CHECK_FALSE(zero);
    }

  auto offs3 = preimage_offsets(mat3());
  REQUIRE(offs3.size() == 4);
  long long expected[4][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 3; ++k) CHECK(offs3[static_cast<size_t>(i)][k] == expected[i][k]);
}

TEST_CASE("periodic point counts match the determinant formula") {
  long long c2[] = {1, 7, 31, 119};
  long long c3[] = {1, 21, 217, 1785};
  for (int n = 1; n <= 4; ++n) {
    CHECK(count_linear_periodic(mat2(), n) == c2[n - 1]);
    CHECK(count_linear_periodic(mat3(), n) == c3[n - 1]);
  }
}

TEST_CASE("closed-form eigenvalue solvers") {
  auto q = solveMonicQuadratic(-4.0, 2.0);
  double qlo = std::min(q[0].real(), q[1].real());
  double qhi = std::max(q[0].real(), q[1].real());
  CHECK(std::abs(qlo - (2.0 - kSqrt2)) < 1e-13);
  CHECK(std::abs(qhi - (2.0 + kSqrt2)) < 1e-13);

  // (x - 1)(x - 2)(x - 3) = x^3 - 6x^2 + 11x - 6
  auto c = solveMonicCubic(-6.0, 11.0, -6.0);
  std::vector<double> roots;
  for (auto z : c) {
    CHECK(std::abs(z.imag()) < 1e-10);
    roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(roots[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(roots[2] == doctest::Approx(3.0).epsilon(1e-10));

  auto ev = smallEigenvalues(mat3().real());
  REQUIRE(ev.size() == 3);
  CHECK(std::abs(ev[0]) == doctest::Approx(2.0 - kSqrt2).epsilon(1e-12));
  CHECK(std::abs(ev[2]) == doctest::Approx(2.0 + kSqrt2).epsilon(1e-12));
}
