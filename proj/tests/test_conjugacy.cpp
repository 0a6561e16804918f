#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace endolab;
using namespace endolab::testhelp;

TEST_CASE("grid solve recovers the manufactured conjugacy") {
  auto f = manufactured(0.002);
  SolveReport rep;
  auto field = solve_unstable_component(f, 32, 1e-11, 200, Vec(), &rep);
  attach_stable(f, field);
  CHECK(field.hasStable());
  CHECK(conjugacy_residual(field, f, 200, 17) < 1e-3);

  // h = Id + u must agree with the closed-form inverse bump
  Rng rng(21);
  double sup = 0.0;
  for (int i = 0; i < 50; ++i) {
    Vec x = rng.uniformVec(3);
    Vec truth = f.conjHInvLift(x) - x;
    sup = std::max(sup, (field.evalU(x) - truth).norm());
  }
  CHECK(sup < 1e-3);
  for (int s : rep.sweeps) CHECK(s < 200);
}

TEST_CASE("series displacement agrees with the closed form and the grid") {
  auto f = manufactured(0.002);
  auto field = solve_unstable_component(f, 32);
  attach_stable(f, field);
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    Vec x = rng.uniformVec(3);
    Vec u = series_displacement(f, x);
    CHECK((u - (f.conjHInvLift(x) - x)).norm() < 1e-9);
    CHECK((u - field.evalU(x)).norm() < 1e-3);

    // fixed-point inverse of h = Id + u
    Vec y = x + u;
    Vec z = series_conjugacy_inverse(f, y);
    CHECK((z - x).norm() < 1e-9);
  }
}

TEST_CASE("grid phase does not change the solved field") {
  auto f = manufactured(0.002);
  auto f0 = solve_unstable_component(f, 32);
  Vec phase(3);
  phase << 0.5, 0.5, 0.5;
  auto f1 = solve_unstable_component(f, 32, 1e-11, 200, phase);
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    Vec x = rng.uniformVec(3);
    CHECK((f0.evalU(x) - f1.evalU(x)).norm() < 2e-3);
  }
}

TEST_CASE("stable backward sums separate special from generic models") {
  auto special = crossShear(0.25, 0.25);
  auto scanS = specialness_scan(special, 6, 50, 8, 13);
  CHECK(scanS.max_variance < 1e-12);

  Rng rng(2);
  Vec x = rng.uniformVec(3);
  auto sums = stable_backward_sum(special, x, 50, 8, 55);
  CHECK(sums.variance < 1e-12);

  auto gen = generic(0.05);
  auto scanG = specialness_scan(gen, 6, 50, 8, 13);
  CHECK(scanG.max_variance > 1e-8);
}

TEST_CASE("regression recovers a unit Hoelder exponent for linear maps") {
  auto f = EndomorphismModel::linear(mat3());
  std::vector<LeafPair> pairs;
  Rng rng(42);
  for (int b = 0; b < 8; ++b) {
    Vec base = wrap(rng.uniformVec(3));
    for (int k = 4; k <= 10; ++k) {
      LeafPair p;
      p.x = base;
      p.y = leaf_point_dynamic(f, p.x, Bundle::WeakUnstable, std::pow(2.0, -k));
      p.leaf_dist = (p.y - p.x).norm();
      pairs.push_back(std::move(p));
    }
  }
  auto h = [&f](const Vec& x) { return x + series_displacement(f, x); };
  auto rep = holder_exponent_wu(pairs, h, 200, 5);
  CHECK(rep.alpha == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.ci_lo <= 1.0);
  CHECK(rep.ci_hi >= 1.0);
  CHECK(rep.log_scale.size() == pairs.size());
}

TEST_CASE("pushforward density of the identity is uniform") {
  auto id = [](const Vec& x) { return x; };
  auto rep = pushforward_density(id, 3, 40000, 4, 31);
  CHECK(rep.within_99);
  CHECK(rep.dof == 63);
  CHECK(rep.samples == 40000);
}
