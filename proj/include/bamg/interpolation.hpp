/// @file interpolation.hpp
/// @brief Weighted least-squares interpolation P and restriction Q fitted to
/// test vectors, with exact reproduction of the constant in Q.

#ifndef BAMG_INTERPOLATION_HPP
#define BAMG_INTERPOLATION_HPP

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bamg/coarsening.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

/// Reference weights the LS fit is pulled toward when `ridge` is positive.
enum class InterpPrior {
  Uniform,   ///< 1 / (pattern size) per entry
  Operator,  ///< direct weights -b_ij / b_ii from the fitted operator row
};

struct InterpConfig {
  /// Maximum number of interpolatory points per row.
  Index caliber = 2;
  /// Graph distance in B + B^T searched for coarse candidates.
  Index search_radius = 1;
  bool constrain_constant_in_Q = true;
  /// Greedy selection stops when the relative decrease of the functional
  /// falls below this.
  double improvement_tol = 1e-3;
  /// Upper bound for 1 / ||B v||^2.
  double max_weight = 1e16;
  /// Singular values below rank_tol * s_max are dropped in the plain LS
  /// solve (minimum-norm solution).
  double rank_tol = 0.1;
  /// Penalty ridge * sum_k w_k v_k(i)^2 on the squared distance to the
  /// prior weights; zero disables it.
  double ridge = 0.03;
  InterpPrior prior = InterpPrior::Operator;

  void validate() const;
};

inline constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

/// Unit 2-norm copies of the test vectors with their LS weights. An
/// infinite weight marks the exactly known vector enforced as a constraint.
struct WeightedTestSet {
  std::vector<Vector> vectors;
  Vector weights;

  Index size() const { return vectors.size(); }
};

/// Normalizes copies of `tests` and weights them by 1 / ||op v||^2, capped
/// at cfg.max_weight. The test at `exact_slot`, if given, gets an infinite
/// weight.
WeightedTestSet make_weighted_tests(const SparseMatrix& op, const std::vector<Vector>& tests,
                                    const InterpConfig& cfg, std::optional<Index> exact_slot = std::nullopt);

struct RowFit {
  std::vector<Index> pattern;  ///< chosen coarse points, fine-level indices, ascending
  Vector coefficients;         ///< aligned with pattern
  double functional = 0.0;     ///< minimized weighted LS residual
  bool degenerate = false;     ///< no candidate gave a finite fit
};

/// Weighted LS fit of point i from the candidate coarse points. Finite-weight
/// tests enter the functional. When `constrained`, the coefficients sum to
/// one and infinite-weight tests are left out (they are the constant).
/// `prior` is aligned with `candidates` and used only when cfg.ridge > 0.
RowFit fit_row(Index i, std::span<const Index> candidates, const WeightedTestSet& tests, const InterpConfig& cfg,
               bool constrained = false, std::span<const double> prior = {});

/// Prior weights of point i for `candidates` under cfg.prior.
Vector prior_weights(const SparseMatrix& op, Index i, std::span<const Index> candidates, const InterpConfig& cfg);

/// Weighted LS functional of a fixed pattern and coefficients.
double ls_functional(Index i, std::span<const Index> pattern, std::span<const double> coefficients,
                     const WeightedTestSet& tests);

/// Coarse points within the search radius of i; the radius is raised to 2
/// when none is found, and an error names the point after that.
std::vector<Index> interpolation_candidates(const Adjacency& graph, const CfSplitting& split, Index i,
                                            Index radius);

/// P (n x n_c): identity on coarse rows, fitted rows elsewhere.
SparseMatrix build_interpolation(const SparseMatrix& b, const CfSplitting& split, const WeightedTestSet& v_tests,
                                 const InterpConfig& cfg);

/// Q (n_c x n): the transpose of an interpolation fitted for B^T. With
/// cfg.constrain_constant_in_Q every column of Q sums to one.
SparseMatrix build_restriction(const SparseMatrix& b, const CfSplitting& split, const WeightedTestSet& u_tests,
                               const InterpConfig& cfg);

}  // namespace bamg

#endif  // BAMG_INTERPOLATION_HPP
