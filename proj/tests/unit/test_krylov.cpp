#include <doctest.h>

#include <cmath>
#include <memory>

#include "bamg/presets.hpp"
#include "bamg/rng.hpp"
#include "oracles.hpp"

using namespace bamg;

namespace {

double l1_error(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("GMRES solves a nonsingular system") {
  const ChainProblem c = uniform_2d(8);
  const SparseMatrix shifted = add(c.B, 1.0, SparseMatrix::identity(c.n), 0.1);
  Rng rng(1);
  const Vector rhs = rng.vector(c.n);
  GmresConfig cfg{20, 500, 1e-12, StoppingRule::RelativeResidual};
  const GmresResult g = gmres(shifted, rhs, Vector(c.n, 0.0), cfg);
  REQUIRE(g.converged);
  const Vector ref = oracle::gauss_solve(oracle::dense(shifted), rhs);
  CHECK(l1_error(g.x, ref) < 1e-9);
  CHECK(g.residual_history.size() == g.iterations + 1);
  CHECK(g.residual_history.back() <= 1e-12);
}

TEST_CASE("unrestarted GMRES terminates within n steps") {
  const auto a = SparseMatrix::from_triplets(
      4, 4, {{0, 0, 4}, {0, 1, 1}, {1, 0, -1}, {1, 1, 3}, {2, 2, 2}, {2, 3, 1}, {3, 3, 5}, {3, 0, 1}});
  GmresConfig cfg{std::nullopt, 100, 1e-13, StoppingRule::RelativeResidual};
  const GmresResult g = gmres(a, Vector{1, 2, 3, 4}, Vector(4, 0.0), cfg);
  CHECK(g.converged);
  CHECK(g.iterations <= 4);
}

TEST_CASE("BAMG preconditioned solve matches the dense steady state") {
  const ChainProblem c = random_planar(100, 2);
  SolveOptions o = default_options(ChainFamily::RandomPlanar);
  o.setup.coarsening.stop_size = 20;
  std::shared_ptr<const Hierarchy> h;
  const SolveReport r = solve_steady_state(c, o, &h);
  REQUIRE(r.converged);
  CHECK(r.levels >= 2);
  CHECK(r.levels == h->size());
  CHECK(norm1(r.x) == doctest::Approx(1.0));
  CHECK(l1_error(r.x, oracle::steady_state(c.B)) < 1e-6);
  CHECK(norm2(spmv(c.B, r.x)) / norm2(r.x) <= 1e-7);
}

TEST_CASE("plain GMRES baseline and power iteration") {
  const ChainProblem c = birth_death(33, 0.5);
  SolveOptions o = default_options(ChainFamily::BirthDeath);
  o.setup_cycles = 0;
  const SolveReport r = solve_steady_state(c, o);
  REQUIRE(r.converged);
  const Vector exact = oracle::steady_state(c.B);
  CHECK(l1_error(r.x, exact) < 1e-6);
  CHECK(l1_error(power_iteration_oracle(c.B, 5000), exact) < 1e-8);
}

TEST_CASE("V-cycle is a fixed linear operator") {
  const ChainProblem c = uniform_2d(20);
  SolveOptions o = default_options(ChainFamily::Uniform2D);
  o.setup.coarsening.stop_size = 30;
  const SetupResult s = run_setup(c, o.setup);
  const auto h = std::make_shared<const Hierarchy>(s.hierarchy);
  const VCycleOperator op(h, o.setup.smoother);
  Rng rng(4);
  const Vector a = rng.vector(c.n);
  const Vector b = rng.vector(c.n);
  Vector mix(c.n);
  for (Index i = 0; i < c.n; ++i) mix[i] = 2.0 * a[i] - 0.5 * b[i];
  const Vector ca = vcycle_apply(op, a);
  const Vector cb = vcycle_apply(op, b);
  const Vector cm = op.apply(mix);
  Vector diff(c.n);
  for (Index i = 0; i < c.n; ++i) diff[i] = cm[i] - (2.0 * ca[i] - 0.5 * cb[i]);
  CHECK(norm2(diff) <= 1e-12 * norm2(cm));
  CHECK(vcycle_apply(op, a) == ca);
}

TEST_CASE("GMRES configuration validation") {
  GmresConfig cfg;
  cfg.rtol = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = GmresConfig{};
  cfg.restart = 0;
  CHECK_THROWS(cfg.validate());
}
