#include <chrono>

#include "bamg/krylov.hpp"
#include "bamg/rng.hpp"

namespace bamg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolveReport baseline_solve(const ChainProblem& problem, const SolveOptions& opts) {
  SolveReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  Vector x_init(problem.n, 1.0 / static_cast<double>(problem.n));
  if (opts.baseline_guess == BaselineGuess::Random) {
    Rng rng(opts.setup.seed);
    for (auto& v : x_init) v = rng.uniform();
  }
  const Vector zero(problem.n, 0.0);
  GmresResult g = gmres(problem.B, zero, x_init, opts.baseline);
  rep.solve_seconds = seconds_since(t0);
  rep.iterations = g.iterations;
  rep.residual_history = std::move(g.residual_history);
  rep.converged = g.converged;
  rep.x = std::move(g.x);
  normalize_probability(rep.x);
  rep.level_sizes = {problem.n};
  return rep;
}

}  // namespace

SolveReport solve_steady_state(const ChainProblem& problem, const SolveOptions& opts,
                               std::shared_ptr<const Hierarchy>* hierarchy_out) {
  if (opts.setup_cycles == 0) return baseline_solve(problem, opts);
  SetupConfig scfg = opts.setup;
  scfg.setup_cycles = opts.setup_cycles;
  const auto t0 = std::chrono::steady_clock::now();
  SetupResult setup = run_setup(problem, scfg);
  auto h = std::make_shared<const Hierarchy>(std::move(setup.hierarchy));
  const VCycleOperator op(h, scfg.smoother, opts.coarsest_rank_tol);
  SolveReport rep;
  rep.setup_seconds = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  Vector rhs = spmv(problem.B, setup.x0);
  scale(rhs, -1.0);
  const Vector e0(problem.n, 0.0);
  GmresResult g = gmres(problem.B, rhs, e0, opts.gmres, &op, setup.x0);
  rep.solve_seconds = seconds_since(t1);

  rep.iterations = g.iterations;
  rep.residual_history = std::move(g.residual_history);
  rep.converged = g.converged;
  rep.x = setup.x0;
  axpy(1.0, g.x, rep.x);
  normalize_probability(rep.x);
  const Complexities c = complexities(*h);
  rep.grid_complexity = c.grid;
  rep.operator_complexity = c.op;
  rep.levels = c.levels;
  for (const auto& lev : h->levels) rep.level_sizes.push_back(lev.size());
  rep.setup_cycles_used = opts.setup_cycles;
  if (hierarchy_out) *hierarchy_out = h;
  return rep;
}

SolveReport solve_steady_state(const ChainProblem& problem, const SolveOptions& opts) {
  return solve_steady_state(problem, opts, nullptr);
}

}  // namespace bamg
