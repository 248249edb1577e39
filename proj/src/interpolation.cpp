#include "bamg/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bamg/dense.hpp"

namespace bamg {

void InterpConfig::validate() const {
  if (caliber < 1) throw std::invalid_argument("interp: caliber must be at least 1");
  if (search_radius < 1 || search_radius > 2) throw std::invalid_argument("interp: search_radius must be 1 or 2");
  if (!(improvement_tol >= 0.0)) throw std::invalid_argument("interp: improvement_tol must be nonnegative");
  if (!(max_weight > 0.0)) throw std::invalid_argument("interp: max_weight must be positive");
  if (!(rank_tol >= 0.0 && rank_tol < 1.0)) throw std::invalid_argument("interp: rank_tol must lie in [0, 1)");
  if (!(ridge >= 0.0)) throw std::invalid_argument("interp: ridge must be nonnegative");
}

WeightedTestSet make_weighted_tests(const SparseMatrix& op, const std::vector<Vector>& tests,
                                    const InterpConfig& cfg, std::optional<Index> exact_slot) {
  WeightedTestSet set;
  set.vectors.reserve(tests.size());
  for (Index k = 0; k < tests.size(); ++k) {
    if (tests[k].size() != op.cols()) throw DimensionError("make_weighted_tests: test vector size mismatch");
    Vector v = tests[k];
    const double nv = norm2(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) throw NumericalError("make_weighted_tests: zero or non-finite test vector");
    scale(v, 1.0 / nv);
    double w = kInfiniteWeight;
    if (!exact_slot || *exact_slot != k) {
      const double r = norm2(spmv(op, v));
      w = r * r > 1.0 / cfg.max_weight ? 1.0 / (r * r) : cfg.max_weight;
    }
    set.vectors.push_back(std::move(v));
    set.weights.push_back(w);
  }
  return set;
}

namespace {

struct Fit {
  Vector coefficients;
  double functional = 0.0;
};

/// Plain LS through a truncated SVD, or ridge-regularized LS toward `prior`.
Vector regularized_solve(const DenseMatrix& a, const Vector& rhs, const InterpConfig& cfg, double lambda,
                         std::span<const double> prior, bool sum_row) {
  if (lambda <= 0.0) return cfg.rank_tol > 0.0 ? pinv_solve(a, rhs, cfg.rank_tol) : qr_solve_ls(a, rhs);
  const Index m = a.rows();
  const Index p = a.cols();
  const Index extra = p + (sum_row ? 1 : 0);
  DenseMatrix aa(m + extra, p, 0.0);
  Vector bb(m + extra, 0.0);
  for (Index r = 0; r < m; ++r) {
    bb[r] = rhs[r];
    for (Index c = 0; c < p; ++c) aa(r, c) = a(r, c);
  }
  for (Index c = 0; c < p; ++c) {
    aa(m + c, c) = lambda;
    bb[m + c] = lambda * prior[c];
  }
  if (sum_row) {
    for (Index c = 0; c < p; ++c) aa(m + p, c) = -lambda;
    bb[m + p] = lambda * (prior[p] - 1.0);
  }
  return qr_solve_ls(aa, bb);
}

/// Solves the weighted LS problem for point i on a fixed pattern.
Fit solve_pattern(Index i, std::span<const Index> pattern, std::span<const double> prior,
                  const WeightedTestSet& tests, const InterpConfig& cfg, bool constrained) {
  std::vector<Index> rows;
  for (Index k = 0; k < tests.size(); ++k) {
    if (std::isfinite(tests.weights[k])) rows.push_back(k);
  }
  const Index p = pattern.size();
  Vector ref(prior.begin(), prior.end());
  if (cfg.prior == InterpPrior::Uniform) ref.assign(p, 1.0 / static_cast<double>(p));
  double lambda = 0.0;
  if (cfg.ridge > 0.0 && ref.size() == p) {
    double scale = 0.0;
    for (Index r : rows) scale += tests.weights[r] * tests.vectors[r][i] * tests.vectors[r][i];
    lambda = std::sqrt(cfg.ridge * scale);
  }
  Fit fit;
  if (constrained) {
    // q_0 = 1 - sum of the others: residual (v_i - v_j0) - sum_j q_j (v_j - v_j0).
    const Index j0 = pattern[0];
    if (p == 1) {
      fit.coefficients = {1.0};
    } else {
      DenseMatrix a(rows.size(), p - 1);
      Vector rhs(rows.size());
      for (Index r = 0; r < rows.size(); ++r) {
        const auto& v = tests.vectors[rows[r]];
        const double sw = std::sqrt(tests.weights[rows[r]]);
        rhs[r] = sw * (v[i] - v[j0]);
        for (Index c = 1; c < p; ++c) a(r, c - 1) = sw * (v[pattern[c]] - v[j0]);
      }
      Vector shifted;
      if (lambda > 0.0) {
        shifted.assign(ref.begin() + 1, ref.end());
        shifted.push_back(ref[0]);
      }
      const Vector q = rows.empty() ? Vector(p - 1, 0.0) : regularized_solve(a, rhs, cfg, lambda, shifted, true);
      fit.coefficients.assign(p, 0.0);
      double rest = 0.0;
      for (Index c = 1; c < p; ++c) {
        fit.coefficients[c] = q[c - 1];
        rest += q[c - 1];
      }
      fit.coefficients[0] = 1.0 - rest;
    }
  } else {
    DenseMatrix a(rows.size(), p);
    Vector rhs(rows.size());
    for (Index r = 0; r < rows.size(); ++r) {
      const auto& v = tests.vectors[rows[r]];
      const double sw = std::sqrt(tests.weights[rows[r]]);
      rhs[r] = sw * v[i];
      for (Index c = 0; c < p; ++c) a(r, c) = sw * v[pattern[c]];
    }
    fit.coefficients = regularized_solve(a, rhs, cfg, lambda, ref, false);
  }
  fit.functional = ls_functional(i, pattern, fit.coefficients, tests);
  return fit;
}

}  // namespace

double ls_functional(Index i, std::span<const Index> pattern, std::span<const double> coefficients,
                     const WeightedTestSet& tests) {
  if (pattern.size() != coefficients.size()) throw DimensionError("ls_functional: pattern/coefficient mismatch");
  double total = 0.0;
  for (Index k = 0; k < tests.size(); ++k) {
    if (!std::isfinite(tests.weights[k])) continue;
    const auto& v = tests.vectors[k];
    double r = v[i];
    for (Index c = 0; c < pattern.size(); ++c) r -= coefficients[c] * v[pattern[c]];
    total += tests.weights[k] * r * r;
  }
  return total;
}

RowFit fit_row(Index i, std::span<const Index> candidates, const WeightedTestSet& tests, const InterpConfig& cfg,
               bool constrained, std::span<const double> prior) {
  if (!prior.empty() && prior.size() != candidates.size()) throw DimensionError("fit_row: prior/candidate mismatch");
  if (candidates.empty()) throw std::invalid_argument("fit_row: point " + std::to_string(i) + " has no candidates");
  bool any_finite = false;
  for (double w : tests.weights) any_finite = any_finite || std::isfinite(w);
  if (!any_finite && !constrained) throw std::invalid_argument("fit_row: no finite-weight test vector");

  std::vector<std::pair<Index, double>> pool;
  for (Index c = 0; c < candidates.size(); ++c) pool.emplace_back(candidates[c], prior.empty() ? 0.0 : prior[c]);
  std::sort(pool.begin(), pool.end());
  std::vector<double> best_prior;
  RowFit best;
  best.functional = std::numeric_limits<double>::infinity();
  const Index limit = std::min<Index>(cfg.caliber, pool.size());
  while (best.pattern.size() < limit) {
    Index pick = pool.size();
    Fit pick_fit;
    pick_fit.functional = std::numeric_limits<double>::infinity();
    std::vector<Index> trial;
    std::vector<double> trial_prior;
    for (Index c = 0; c < pool.size(); ++c) {
      trial = best.pattern;
      trial.push_back(pool[c].first);
      if (!prior.empty()) {
        trial_prior = best_prior;
        trial_prior.push_back(pool[c].second);
      }
      Fit f = solve_pattern(i, trial, trial_prior, tests, cfg, constrained);
      if (!all_finite(f.coefficients) || !std::isfinite(f.functional)) continue;
      if (f.functional < pick_fit.functional) {
        pick = c;
        pick_fit = std::move(f);
      }
    }
    if (pick == pool.size()) break;
    if (!best.pattern.empty()) {
      const double gain = best.functional - pick_fit.functional;
      if (!(gain > cfg.improvement_tol * best.functional)) break;
    }
    best.pattern.push_back(pool[pick].first);
    if (!prior.empty()) best_prior.push_back(pool[pick].second);
    best.coefficients = std::move(pick_fit.coefficients);
    best.functional = pick_fit.functional;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    if (best.functional == 0.0) break;
  }
  if (best.pattern.empty()) {
    best.pattern = {pool.front().first};
    best.coefficients = {1.0};
    best.functional = ls_functional(i, best.pattern, best.coefficients, tests);
    best.degenerate = true;
    return best;
  }
  // Report the pattern in ascending order.
  std::vector<Index> order(best.pattern.size());
  for (Index k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return best.pattern[a] < best.pattern[b]; });
  RowFit sorted;
  for (Index k : order) {
    sorted.pattern.push_back(best.pattern[k]);
    sorted.coefficients.push_back(best.coefficients[k]);
  }
  sorted.functional = best.functional;
  return sorted;
}

Vector prior_weights(const SparseMatrix& op, Index i, std::span<const Index> candidates, const InterpConfig& cfg) {
  Vector w(candidates.size(), 1.0 / static_cast<double>(std::max<Index>(candidates.size(), 1)));
  if (cfg.prior == InterpPrior::Uniform) return w;
  const auto cols = op.row_cols(i);
  const auto vals = op.row_values(i);
  double diag = 0.0;
  for (Index k = 0; k < cols.size(); ++k) {
    if (cols[k] == i) diag = vals[k];
  }
  if (!(std::abs(diag) > 0.0)) return w;
  for (Index c = 0; c < candidates.size(); ++c) {
    const auto it = std::lower_bound(cols.begin(), cols.end(), candidates[c]);
    w[c] = it != cols.end() && *it == candidates[c] ? -vals[static_cast<Index>(it - cols.begin())] / diag : 0.0;
  }
  return w;
}

std::vector<Index> interpolation_candidates(const Adjacency& graph, const CfSplitting& split, Index i,
                                            Index radius) {
  for (Index r = radius; r <= std::max<Index>(radius, 2); ++r) {
    std::vector<Index> out;
    for (Index j : graph.neighborhood(i, r)) {
      if (split.is_coarse(j)) out.push_back(j);
    }
    if (!out.empty()) return out;
  }
  throw NumericalError("interpolation: fine point " + std::to_string(i) + " has no coarse point within distance " +
                       std::to_string(std::max<Index>(radius, 2)));
}

namespace {

/// Interpolation for operator `b` as triplets (fine row, coarse column).
std::vector<Triplet> interpolation_triplets(const SparseMatrix& b, const CfSplitting& split,
                                            const WeightedTestSet& tests, const InterpConfig& cfg,
                                            bool constrained) {
  cfg.validate();
  if (b.rows() != b.cols() || b.rows() != split.size()) throw DimensionError("interpolation: size mismatch");
  for (const auto& v : tests.vectors) {
    if (v.size() != b.rows()) throw DimensionError("interpolation: test vector size mismatch");
  }
  const Adjacency graph(b);
  std::vector<Triplet> t;
  t.reserve(split.coarse.size() + cfg.caliber * split.fine.size());
  for (Index i = 0; i < split.size(); ++i) {
    if (split.is_coarse(i)) {
      t.push_back({i, split.coarse_rank[i], 1.0});
      continue;
    }
    const auto cand = interpolation_candidates(graph, split, i, cfg.search_radius);
    const Vector prior = cfg.ridge > 0.0 ? prior_weights(b, i, cand, cfg) : Vector{};
    const RowFit fit = fit_row(i, cand, tests, cfg, constrained, prior);
    for (Index k = 0; k < fit.pattern.size(); ++k) {
      t.push_back({i, split.coarse_rank[fit.pattern[k]], fit.coefficients[k]});
    }
  }
  return t;
}

}  // namespace

SparseMatrix build_interpolation(const SparseMatrix& b, const CfSplitting& split, const WeightedTestSet& v_tests,
                                 const InterpConfig& cfg) {
  auto t = interpolation_triplets(b, split, v_tests, cfg, false);
  return SparseMatrix::from_triplets(split.size(), split.coarse_size(), std::move(t));
}

SparseMatrix build_restriction(const SparseMatrix& b, const CfSplitting& split, const WeightedTestSet& u_tests,
                               const InterpConfig& cfg) {
  if (cfg.constrain_constant_in_Q) {
    bool has_exact = false;
    for (double w : u_tests.weights) has_exact = has_exact || !std::isfinite(w);
    if (!has_exact) throw std::invalid_argument("build_restriction: constrained build needs the exact constant test");
  }
  auto t = interpolation_triplets(transpose(b), split, u_tests, cfg, cfg.constrain_constant_in_Q);
  for (auto& e : t) std::swap(e.row, e.col);
  return SparseMatrix::from_triplets(split.coarse_size(), split.size(), std::move(t));
}

}  // namespace bamg
