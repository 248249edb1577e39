#include <doctest.h>

#include <cmath>

#include "bamg/chains.hpp"
#include "bamg/relaxation.hpp"
#include "bamg/rng.hpp"

using namespace bamg;

TEST_CASE("one damped sweep matches the formula") {
  const auto b = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 4.0}});
  SmootherConfig cfg;
  cfg.omega = 0.5;
  const Vector x = jacobi_sweep(b, Vector{1.0, 1.0}, Vector{0.0, 0.0}, cfg);
  CHECK(x[0] == doctest::Approx(1.0 - 0.5 * 1.0 / 2.0));
  CHECK(x[1] == doctest::Approx(1.0 - 0.5 * 3.0 / 4.0));
  cfg.form = JacobiForm::ScaledSplitting;
  const Vector y = jacobi_sweep(b, Vector{1.0, 1.0}, Vector{0.0, 0.0}, cfg);
  CHECK(y[0] == doctest::Approx(1.0 - 2.0 * 1.0 / 2.0));
}

TEST_CASE("transpose sweep equals a sweep with the explicit transpose") {
  const ChainProblem c = random_planar(80, 2);
  Rng rng(3);
  const Vector x = rng.vector(c.n);
  const Vector f = rng.vector(c.n);
  SmootherConfig cfg;
  const Vector a = jacobi_sweep_transpose(c.B, x, f, cfg);
  const Vector b = jacobi_sweep(transpose(c.B), x, f, cfg);
  for (Index i = 0; i < c.n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-15);
}

TEST_CASE("JacobiSmoother reduces oscillatory error and keeps constants in the left null space") {
  const ChainProblem c = uniform_2d(12);
  SmootherConfig cfg;
  const JacobiSmoother s(c.B, cfg);
  Vector x(c.n);
  for (Index i = 0; i < c.n; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const double before = norm2(spmv(c.B, x));
  s.smooth(c.B, x, {}, 5);
  CHECK(norm2(spmv(c.B, x)) < 0.2 * before);

  const SparseMatrix bt = transpose(c.B);
  const JacobiSmoother st(bt, cfg);
  Vector ones(c.n, 1.0);
  st.smooth(bt, ones, {}, 3);
  for (const double v : ones) CHECK(std::abs(v - 1.0) < 1e-14);
}

TEST_CASE("zero diagonal policy") {
  const auto b = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 1, 1.0}});
  SmootherConfig cfg;
  const Vector x = jacobi_sweep(b, Vector{3.0, 1.0}, Vector{0.0, 0.0}, cfg);
  CHECK(x[0] == 3.0);
  cfg.zero_diag_policy = ZeroDiagPolicy::Error;
  CHECK_THROWS_AS(jacobi_sweep(b, Vector{3.0, 1.0}, Vector{0.0, 0.0}, cfg), NumericalError);
  cfg.omega = 0.0;
  CHECK_THROWS(cfg.validate());
}
