#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bamg/chains.hpp"
#include "bamg/coarsening.hpp"
#include "bamg/interpolation.hpp"
#include "bamg/rng.hpp"
#include "oracles.hpp"

using namespace bamg;

namespace {

std::vector<Vector> random_tests(Index n, Index count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> t;
  for (Index k = 0; k < count; ++k) t.push_back(rng.vector(n));
  return t;
}

InterpConfig plain_ls() {
  InterpConfig cfg;
  cfg.caliber = 3;
  cfg.ridge = 0.0;
  cfg.rank_tol = 0.0;
  cfg.improvement_tol = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("unconstrained fit equals the normal equations solution") {
  const ChainProblem c = uniform_2d(6);
  const InterpConfig cfg = plain_ls();
  const WeightedTestSet tests = make_weighted_tests(c.B, random_tests(c.n, 8, 1), cfg);
  const std::vector<Index> cand = {1, 6, 8, 13};
  const RowFit f = fit_row(7, cand, tests, cfg);
  REQUIRE_FALSE(f.degenerate);
  REQUIRE(f.pattern.size() <= 3);
  const Vector ref = oracle::weighted_ls(7, f.pattern, tests.vectors, tests.weights, false);
  for (Index k = 0; k < ref.size(); ++k) CHECK(std::abs(f.coefficients[k] - ref[k]) < 1e-10);
  CHECK(f.functional == doctest::Approx(ls_functional(7, f.pattern, f.coefficients, tests)));
}

TEST_CASE("constrained fit sums to one and equals the KKT solution") {
  const ChainProblem c = uniform_2d(6);
  const InterpConfig cfg = plain_ls();
  std::vector<Vector> raw = random_tests(c.n, 7, 2);
  raw.insert(raw.begin(), Vector(c.n, 1.0));
  const WeightedTestSet tests = make_weighted_tests(c.B, raw, cfg, Index{0});
  CHECK(std::isinf(tests.weights[0]));
  const std::vector<Index> cand = {1, 6, 8, 13};
  const RowFit f = fit_row(7, cand, tests, cfg, true);
  double sum = 0.0;
  for (const double v : f.coefficients) sum += v;
  CHECK(std::abs(sum - 1.0) < 1e-14);
  std::vector<Vector> finite(tests.vectors.begin() + 1, tests.vectors.end());
  const Vector w(tests.weights.begin() + 1, tests.weights.end());
  const Vector ref = oracle::weighted_ls(7, f.pattern, finite, w, true);
  for (Index k = 0; k < ref.size(); ++k) CHECK(std::abs(f.coefficients[k] - ref[k]) < 1e-10);
}

TEST_CASE("a large ridge pulls the fit to the prior") {
  const ChainProblem c = uniform_2d(6);
  InterpConfig cfg = plain_ls();
  cfg.caliber = 4;
  cfg.ridge = 1e8;
  const WeightedTestSet tests = make_weighted_tests(c.B, random_tests(c.n, 8, 3), cfg);
  const std::vector<Index> cand = {1, 6, 8, 13};
  const Vector prior = prior_weights(c.B, 7, cand, cfg);
  for (Index k = 0; k < cand.size(); ++k) CHECK(prior[k] == doctest::Approx(-c.B.at(7, cand[k]) / c.B.at(7, 7)));
  const RowFit f = fit_row(7, cand, tests, cfg, false, prior);
  for (Index k = 0; k < f.pattern.size(); ++k) {
    const auto pos = std::find(cand.begin(), cand.end(), f.pattern[k]) - cand.begin();
    CHECK(f.coefficients[k] == doctest::Approx(prior[pos]).epsilon(1e-5));
  }
}

TEST_CASE("P is the identity on coarse points and Q reproduces the constant") {
  const ChainProblem c = random_planar(300, 4);
  CoarseningConfig ccfg;
  ccfg.mode = CoarseningMode::CompatibleRelaxation;
  const CfSplitting split = cr_coarsen(c.B, ccfg, 2);
  InterpConfig cfg;
  cfg.caliber = 3;
  const WeightedTestSet v = make_weighted_tests(c.B, random_tests(c.n, 8, 5), cfg);
  const SparseMatrix p = build_interpolation(c.B, split, v, cfg);
  CHECK(p.rows() == c.n);
  CHECK(p.cols() == split.coarse_size());
  for (const Index i : split.coarse) {
    REQUIRE(p.row_cols(i).size() == 1);
    CHECK(p.row_cols(i)[0] == split.coarse_rank[i]);
    CHECK(p.row_values(i)[0] == 1.0);
  }
  for (const Index i : split.fine) CHECK(p.row_cols(i).size() <= cfg.caliber);

  std::vector<Vector> raw = random_tests(c.n, 7, 6);
  raw.insert(raw.begin(), Vector(c.n, 1.0));
  const WeightedTestSet u = make_weighted_tests(transpose(c.B), raw, cfg, Index{0});
  const SparseMatrix q = build_restriction(c.B, split, u, cfg);
  CHECK(q.rows() == split.coarse_size());
  const Vector cs = spmv_transpose(q, Vector(q.rows(), 1.0));
  for (const double s : cs) CHECK(std::abs(s - 1.0) < 1e-13);
}

TEST_CASE("configuration validation") {
  InterpConfig cfg;
  cfg.caliber = 0;
  CHECK_THROWS(cfg.validate());
  cfg = InterpConfig{};
  cfg.ridge = -1.0;
  CHECK_THROWS(cfg.validate());
}
