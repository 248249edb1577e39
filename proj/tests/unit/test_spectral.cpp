#include <doctest.h>

#include <cmath>
#include <memory>

#include "bamg/presets.hpp"
#include "bamg/spectral.hpp"

using namespace bamg;

TEST_CASE("field of values of a positive diagonal is a segment") {
  DenseMatrix d(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 3.0;
  const FovResult f = fov_boundary(d);
  CHECK_FALSE(f.contains_origin);
  CHECK(f.nu == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.nu_lower == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("nilpotent Jordan block has a disk of radius one half") {
  DenseMatrix j(2, 2);
  j(0, 1) = 1.0;
  FovConfig cfg;
  cfg.n_angles = 64;
  const FovResult f = fov_boundary(j, cfg);
  CHECK(f.contains_origin);
  CHECK(f.nu == 0.0);
  for (const double s : f.support) CHECK(s == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sparse and dense operators give the same support function") {
  const ChainProblem c = uniform_2d(6);
  FovConfig cfg;
  cfg.n_angles = 32;
  const FovResult a = fov_boundary(make_fov_operator(c.B), cfg);
  const FovResult b = fov_boundary(densify(c.B), cfg);
  REQUIRE(a.support.size() == b.support.size());
  for (Index k = 0; k < a.support.size(); ++k) CHECK(std::abs(a.support[k] - b.support[k]) < 1e-8);
  CHECK(a.contains_origin);
}

TEST_CASE("range projection drops the null vector") {
  const ChainProblem c = tandem_queue(5, 11.0 / 31.0, 10.0 / 31.0, 10.0 / 31.0);
  const ProjectedSystem p = project_range(c.B);
  CHECK(p.Pi.rows() == c.n);
  CHECK(p.Pi.cols() == c.n - 1);
  CHECK(p.Bhat.rows() == c.n - 1);
  const Vector ones(c.n, 1.0);
  const Vector proj = matvec_transpose(p.Pi, ones);
  CHECK(norm2(proj) < 1e-10);
}

TEST_CASE("preconditioned range projection has a positive distance to the origin") {
  const ChainProblem c = uniform_2d(12);
  SolveOptions o = default_options(ChainFamily::Uniform2D);
  o.setup.coarsening.stop_size = 40;
  const SetupResult s = run_setup(c, o.setup);
  const VCycleOperator op(std::make_shared<const Hierarchy>(s.hierarchy), o.setup.smoother);
  const ProjectedSystem p = projected_preconditioned(c.B, op);
  FovConfig cfg;
  cfg.n_angles = 64;
  const FovResult f = fov_boundary(p.Bhat, cfg);
  CHECK(f.nu > 0.0);
  const FovResult inv = fov_boundary(pinv(p.Bhat), cfg);
  const auto steps = theorem2_steps(f.nu, inv.nu, 1e-7);
  REQUIRE(steps.has_value());
  CHECK(theorem2_bound(f.nu, inv.nu, *steps) <= 1e-7);
  CHECK(theorem2_bound(f.nu, inv.nu, *steps - 1) > 1e-7);
}

TEST_CASE("theorem bound and hull helpers") {
  CHECK(theorem2_bound(0.5, 0.5, 2) == doctest::Approx(0.75));
  CHECK(theorem2_bound(0.0, 0.5, 10) == 1.0);
  CHECK_FALSE(theorem2_steps(0.0, 1.0, 1e-7).has_value());
  CHECK(elman_bound(1.0, 2.0, 2) == doctest::Approx(0.75));

  const auto hull = convex_hull({{0, 0}, {2, 0}, {1, 0}, {2, 2}, {0, 2}, {1, 1}});
  CHECK(hull.size() == 4);
  bool inside = false;
  CHECK(polygon_distance_to_origin(hull, &inside) == 0.0);
  const auto shifted = convex_hull({{1, -1}, {3, -1}, {3, 1}, {1, 1}});
  CHECK(polygon_distance_to_origin(shifted, &inside) == doctest::Approx(1.0));
  CHECK_FALSE(inside);
}
