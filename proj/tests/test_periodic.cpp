#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace endolab;
using namespace endolab::testhelp;

TEST_CASE("lattice enumeration finds every linear periodic point") {
  auto lin2 = EndomorphismModel::linear(mat2());
  long long expected[] = {1, 7, 31};
  for (int n = 1; n <= 3; ++n) {
    auto pts = linear_periodic_points(mat2(), n);
    CHECK(static_cast<long long>(pts.size()) == expected[n - 1]);
    for (const auto& p : pts) {
      Vec y = p;
      for (int k = 0; k < n; ++k) y = lin2.apply(y);
      CHECK(torusDist(y, p) < 1e-9);
    }
  }
  auto pts3 = linear_periodic_points(mat3(), 2);
  CHECK(pts3.size() == 21);
}

TEST_CASE("continuation from a linear seed is a fixed point of Newton") {
  auto lin = EndomorphismModel::linear(mat3());
  auto pts = linear_periodic_points(mat3(), 2);
  auto rec = continue_periodic(lin, 2, pts[3]);
  CHECK(rec.period == 2);
  CHECK(rec.residual < 1e-12);
  CHECK(torusDist(rec.point, pts[3]) < 1e-10);
  CHECK(rec.jacobian == doctest::Approx(16.0).epsilon(1e-10));  // degree^n
  REQUIRE(rec.moduli.size() == 3);
  CHECK(rec.moduli[0] ==
        doctest::Approx(std::pow(2.0 - kSqrt2, 2)).epsilon(1e-10));
}

TEST_CASE("periodic continuation of the shear family") {
  auto f = crossShear(0.1, 0.1);
  auto res = continue_all_periodic(f, 2);
  CHECK(res.records.size() == 21);  // count is a topological invariant
  for (const auto& r : res.records) {
    CHECK(r.residual < 1e-9);
    Vec y = r.point;
    for (int k = 0; k < 2; ++k) y = f.apply(y);
    CHECK(torusDist(y, r.point) < 1e-8);
  }

  auto vol = volume_criterion(res.records, f.degree());
  CHECK(vol.consistent_with_volume);
  CHECK(vol.max_relative_deviation < 1e-8);

  auto sp = periodic_specialness_certificate(f, res.records);
  CHECK(sp.pass);
  CHECK(sp.max_deviation < 1e-8);
}

TEST_CASE("volume criterion flags a non-conservative family") {
  auto f = generic(0.05);
  CHECK_FALSE(f.conservative());
  auto res = continue_all_periodic(f, 2);
  CHECK(res.records.size() == 21);
  auto vol = volume_criterion(res.records, f.degree());
  CHECK_FALSE(vol.consistent_with_volume);
  CHECK(vol.max_relative_deviation > 1e-6);
}
