/// @file krylov.hpp
/// @brief V-cycle preconditioner, restarted GMRES and the two-phase steady
/// state solve.

#ifndef BAMG_KRYLOV_HPP
#define BAMG_KRYLOV_HPP

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bamg/dense.hpp"
#include "bamg/setup.hpp"

namespace bamg {

/// One V-cycle on B e = b from a zero guess, as a fixed linear operator.
class VCycleOperator {
 public:
  VCycleOperator(std::shared_ptr<const Hierarchy> hierarchy, const SmootherConfig& smoother,
                 double coarsest_rank_tol = kDefaultRankTol);

  Vector apply(std::span<const double> b) const;

  Index size() const { return hierarchy_->levels.front().size(); }
  const Hierarchy& hierarchy() const { return *hierarchy_; }
  const SmootherConfig& smoother() const { return smoother_; }

 private:
  Vector cycle(Index l, std::span<const double> b) const;

  std::shared_ptr<const Hierarchy> hierarchy_;
  SmootherConfig smoother_;
  std::vector<JacobiSmoother> smoothers_;
  DenseMatrix coarsest_pinv_;
};

Vector vcycle_apply(const VCycleOperator& op, std::span<const double> b);

enum class StoppingRule {
  /// ||B x|| / ||x|| with x = offset + iterate
  ScaledResidualBx,
  /// ||b - B x|| / ||b||
  RelativeResidual,
};

struct GmresConfig {
  /// Restart length; none means unrestarted.
  std::optional<Index> restart = 50;
  Index max_iters = 1000;
  double rtol = 1e-7;
  StoppingRule stopping = StoppingRule::ScaledResidualBx;

  void validate() const;
};

struct GmresResult {
  Vector x;
  Index iterations = 0;
  /// Stopping quantity after each iteration, starting with the initial one.
  Vector residual_history;
  bool converged = false;
};

/// GMRES with modified Gram-Schmidt Arnoldi and Givens rotations for
/// B x = b. With a preconditioner C the iteration runs on C B x = C b. The
/// stopping rule is always evaluated on the unpreconditioned quantity;
/// `offset` is added to the iterate for the scaled rule.
GmresResult gmres(const SparseMatrix& b_mat, std::span<const double> b, std::span<const double> x_init,
                  const GmresConfig& cfg, const VCycleOperator* precond = nullptr,
                  std::span<const double> offset = {});

struct SolveReport {
  Index iterations = 0;
  Vector residual_history;
  bool converged = false;
  Vector x;
  double grid_complexity = 1.0;
  double operator_complexity = 1.0;
  Index levels = 1;
  std::vector<Index> level_sizes;
  Index setup_cycles_used = 0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Initial guess of the unpreconditioned baseline.
enum class BaselineGuess { Uniform, Random };

struct SolveOptions {
  /// 0 runs plain restarted GMRES on B x = 0.
  Index setup_cycles = 1;
  SetupConfig setup;
  GmresConfig gmres{std::nullopt, 200, 1e-7, StoppingRule::ScaledResidualBx};
  GmresConfig baseline{50, 1000, 1e-7, StoppingRule::ScaledResidualBx};
  BaselineGuess baseline_guess = BaselineGuess::Uniform;
  double coarsest_rank_tol = kDefaultRankTol;
};

/// Setup, then preconditioned GMRES on B e = -B x0 from e = 0. Returns
/// x = x0 + e with positive sign and unit 1-norm.
SolveReport solve_steady_state(const ChainProblem& problem, const SolveOptions& opts);

/// As solve_steady_state, also returning the hierarchy that was used.
SolveReport solve_steady_state(const ChainProblem& problem, const SolveOptions& opts,
                               std::shared_ptr<const Hierarchy>* hierarchy_out);

/// A^k x0 / ||.||_1 from the uniform start with A = I - B.
Vector power_iteration_oracle(const SparseMatrix& b, Index iters);

}  // namespace bamg

#endif  // BAMG_KRYLOV_HPP
