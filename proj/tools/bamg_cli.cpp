/// bamg: generate benchmark chains, solve for steady states, reproduce the
/// iteration tables and export field-of-values data.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bamg/presets.hpp"
#include "bamg/report_io.hpp"
#include "bamg/spectral.hpp"

namespace {

using namespace bamg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

/// Usage problems detected after parsing.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-convergence, reported after all outputs are written.
class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain selection shared by every command.
struct ProblemArgs {
  std::string family;
  Index n = 0;
  double mu = 0.96;
  std::uint64_t seed = 0;
  unsigned tokens = 0;
  std::string preset = "molloy";
  double lambda = 11.0 / 31.0;
  double mu1 = 10.0 / 31.0;
  double mu2 = 10.0 / 31.0;
  std::string petri_spec;
  std::string import_path;
};

/// Overrides of the per-family solver defaults; unset fields keep them.
struct SolverArgs {
  std::optional<Index> caliber;
  std::optional<Index> sweeps;
  std::optional<Index> r;
  std::optional<Index> inner_mu;
  std::optional<Index> stop_size;
  std::optional<std::uint64_t> setup_seed;
  std::optional<Index> max_iters;
  std::optional<double> rtol;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& p, bool family_positional) {
  if (family_positional) {
    cmd->add_option("family", p.family, "birth-death | uniform2d | tandem | planar | petri")->required();
  } else {
    cmd->add_option("--family", p.family, "birth-death | uniform2d | tandem | planar | petri | imported");
  }
  cmd->add_option("--n", p.n, "number of states");
  cmd->add_option("--mu", p.mu, "birth-death rate ratio");
  cmd->add_option("--seed", p.seed, "random planar generator seed");
  cmd->add_option("--tokens", p.tokens, "Molloy net token count");
  cmd->add_option("--preset", p.preset, "Petri net preset")->check(CLI::IsMember({"molloy"}));
  cmd->add_option("--lambda", p.lambda, "tandem arrival probability");
  cmd->add_option("--mu1", p.mu1, "tandem station 1 service probability");
  cmd->add_option("--mu2", p.mu2, "tandem station 2 service probability");
  cmd->add_option("--petri-spec", p.petri_spec, "Petri net description file");
}

void add_solver_options(CLI::App* cmd, SolverArgs& s) {
  cmd->add_option("--caliber", s.caliber, "interpolatory points per row");
  cmd->add_option("--sweeps", s.sweeps, "pre- and post-smoothing sweeps");
  cmd->add_option("--r", s.r, "number of test vectors");
  cmd->add_option("--inner-mu", s.inner_mu, "inner setup iterations per level");
  cmd->add_option("--stop-size", s.stop_size, "coarsest level size bound");
  cmd->add_option("--setup-seed", s.setup_seed, "test vector seed");
  cmd->add_option("--max-iters", s.max_iters, "GMRES iteration cap");
  cmd->add_option("--rtol", s.rtol, "scaled residual target");
}

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BAMG_OUTPUT_DIR"); env && *env) return env;
  return "bamg_out";
}

GenerateParams generate_params(const ProblemArgs& a, Index n) {
  GenerateParams g;
  g.n = n;
  g.mu = a.mu;
  g.seed = a.seed;
  g.tokens = a.tokens;
  g.lambda = a.lambda;
  g.mu1 = a.mu1;
  g.mu2 = a.mu2;
  if (!a.petri_spec.empty()) g.petri_spec = a.petri_spec;
  if (!a.import_path.empty()) g.import_path = a.import_path;
  return g;
}

ChainFamily parse_family(const std::string& s) {
  try {
    return family_from_string(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

/// Family named by the manifest written next to an exported matrix.
std::optional<ChainFamily> manifest_family(const std::filesystem::path& mtx) {
  std::string stem = mtx.stem().string();
  for (const std::string suffix : {"_A", "_B"}) {
    if (stem.size() > suffix.size() && stem.ends_with(suffix)) stem.resize(stem.size() - suffix.size());
  }
  const auto manifest = mtx.parent_path() / (stem + ".json");
  if (!std::filesystem::exists(manifest)) return std::nullopt;
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot read " + manifest.string());
  const Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("family")) throw IoError(manifest.string() + ": malformed manifest");
  return family_from_string(j["family"].get<std::string>());
}

struct Problem {
  ChainProblem chain;
  ChainFamily preset_family;
};

Problem load_problem(const ProblemArgs& a, Index n) {
  if (!a.import_path.empty()) {
    ChainProblem chain = import_chain(a.import_path);
    const ChainFamily preset =
        a.family.empty() ? manifest_family(a.import_path).value_or(ChainFamily::Imported) : parse_family(a.family);
    chain.geometry = family_geometry(preset, chain.n);
    return {std::move(chain), preset};
  }
  if (a.family.empty()) throw UsageError("--family is required");
  const ChainFamily family = parse_family(a.family);
  if (family == ChainFamily::Imported) throw UsageError("the imported family needs --import");
  if (n == 0 && !(family == ChainFamily::PetriNet && (a.tokens > 0 || !a.petri_spec.empty()))) {
    throw UsageError("--n is required for " + a.family);
  }
  try {
    return {generate_chain(family, generate_params(a, n)), family};
  } catch (const ChainError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SolveOptions solver_options(ChainFamily family, const SolverArgs& s, Index cycles) {
  SolveOptions o = default_options(family);
  o.setup_cycles = cycles;
  if (s.caliber) o.setup.interp.caliber = *s.caliber;
  if (s.sweeps) o.setup.smoother.sweeps_pre = o.setup.smoother.sweeps_post = *s.sweeps;
  if (s.r) o.setup.r = *s.r;
  if (s.inner_mu) o.setup.inner_mu = *s.inner_mu;
  if (s.stop_size) o.setup.coarsening.stop_size = *s.stop_size;
  if (s.setup_seed) o.setup.seed = *s.setup_seed;
  if (s.max_iters) o.gmres.max_iters = o.baseline.max_iters = *s.max_iters;
  if (s.rtol) o.gmres.rtol = o.baseline.rtol = *s.rtol;
  try {
    o.setup.validate();
    o.gmres.validate();
    o.baseline.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return o;
}

Json problem_json(const ChainProblem& c) {
  Json j;
  j["family"] = to_string(c.family);
  j["n"] = c.n;
  j["nnz"] = c.A.nnz();
  j["seed"] = c.seed;
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["params"] = params;
  return j;
}

Json options_json(const SolveOptions& o) {
  Json j;
  j["setup_cycles"] = o.setup_cycles;
  j["setup"] = to_json(o.setup);
  const auto gm = [](const GmresConfig& g) {
    Json k;
    k["restart"] = g.restart ? Json(*g.restart) : Json(nullptr);
    k["max_iters"] = g.max_iters;
    k["rtol"] = g.rtol;
    k["stopping"] = g.stopping == StoppingRule::ScaledResidualBx ? "scaled_residual_bx" : "relative_residual";
    return k;
  };
  j["gmres"] = gm(o.setup_cycles == 0 ? o.baseline : o.gmres);
  j["baseline_guess"] = o.baseline_guess == BaselineGuess::Uniform ? "uniform" : "random";
  j["coarsest_rank_tol"] = o.coarsest_rank_tol;
  return j;
}

std::string problem_stem(const ChainProblem& c) { return to_string(c.family) + "_n" + std::to_string(c.n); }

int cmd_gen(const ProblemArgs& a, const std::string& out_flag) {
  const Problem p = load_problem(a, a.n);
  const auto dir = output_dir(out_flag);
  const std::string stem = problem_stem(p.chain);
  export_chain(p.chain, dir, stem);
  std::cout << "wrote " << (dir / (stem + ".json")).string() << " (n = " << p.chain.n << ")\n";
  return kExitOk;
}

int cmd_solve(const ProblemArgs& a, const SolverArgs& s, Index cycles, const std::string& out_flag) {
  if (cycles > 2) throw UsageError("--cycles must be 0, 1 or 2");
  const Problem p = load_problem(a, a.n);
  const SolveOptions o = solver_options(p.preset_family, s, cycles);
  const SolveReport r = solve_steady_state(p.chain, o);
  const auto dir = output_dir(out_flag);
  ensure_directory(dir);
  const std::string stem = problem_stem(p.chain) + "_c" + std::to_string(cycles);
  Json j;
  j["problem"] = problem_json(p.chain);
  j["options"] = options_json(o);
  j["report"] = to_json(r);
  write_json(dir / (stem + "_report.json"), j);
  write_vector_csv(dir / (stem + "_x.csv"), r.x, "x");
  std::cout << to_string(p.chain.family) << " n=" << p.chain.n << " cycles=" << cycles
            << " iterations=" << r.iterations << " converged=" << (r.converged ? "yes" : "no")
            << " levels=" << r.levels << "\n";
  if (!r.converged) throw NotConverged("solve did not reach the residual target");
  return kExitOk;
}

struct Cell {
  Index iterations = 0;
  bool converged = false;
  Index levels = 1;
  double og = 1.0;
  double oc = 1.0;
};

int cmd_table(const ProblemArgs& a, const SolverArgs& s, const std::vector<Index>& sizes, Index cap,
              const std::string& out_flag) {
  if (sizes.empty()) throw UsageError("--sizes must list at least one size");
  const std::vector<std::string> labels = {"GMRES(50)", "BAMG + GMRES", "BAMG$^2$ + GMRES"};
  std::vector<std::vector<Cell>> cells(3, std::vector<Cell>(sizes.size()));
  std::vector<Index> actual(sizes.size());
  ChainFamily family = ChainFamily::Imported;
  for (Index c = 0; c < sizes.size(); ++c) {
    const Problem p = load_problem(a, sizes[c]);
    family = p.preset_family;
    actual[c] = p.chain.n;
    for (Index row = 0; row < 3; ++row) {
      SolverArgs sa = s;
      sa.max_iters = cap;
      const SolveReport r = solve_steady_state(p.chain, solver_options(p.preset_family, sa, row));
      cells[row][c] = {r.iterations, r.converged, r.levels, r.grid_complexity, r.operator_complexity};
    }
  }
  const bool bracket = family == ChainFamily::RandomPlanar || family == ChainFamily::PetriNet;
  const auto cell_text = [&](Index row, Index c) {
    const Cell& x = cells[row][c];
    std::string t = x.converged ? std::to_string(x.iterations) : ">" + std::to_string(cap);
    if (bracket && row > 0) t += " (" + std::to_string(x.levels) + ")";
    return t;
  };
  std::size_t label_w = 0;
  for (const auto& l : labels) label_w = std::max(label_w, l.size());
  std::vector<std::size_t> col_w(sizes.size());
  for (Index c = 0; c < sizes.size(); ++c) {
    col_w[c] = std::to_string(actual[c]).size();
    for (Index row = 0; row < 3; ++row) col_w[c] = std::max(col_w[c], cell_text(row, c).size());
  }
  std::ostringstream text;
  const auto pad = [](const std::string& v, std::size_t w) { return std::string(w - v.size(), ' ') + v; };
  text << pad("n", label_w);
  for (Index c = 0; c < sizes.size(); ++c) text << " | " << pad(std::to_string(actual[c]), col_w[c]);
  text << "\n";
  for (Index row = 0; row < 3; ++row) {
    text << labels[row] << std::string(label_w - labels[row].size(), ' ');
    for (Index c = 0; c < sizes.size(); ++c) text << " | " << pad(cell_text(row, c), col_w[c]);
    text << "\n";
  }
  std::ostringstream csv;
  csv << "row,n,iterations,converged,levels,grid_complexity,operator_complexity\n";
  for (Index row = 0; row < 3; ++row) {
    for (Index c = 0; c < sizes.size(); ++c) {
      const Cell& x = cells[row][c];
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", x.og, x.oc);
      csv << '"' << labels[row] << "\"," << actual[c] << ',' << x.iterations << ',' << (x.converged ? 1 : 0) << ','
          << x.levels << ',' << buf << "\n";
    }
  }
  const auto dir = output_dir(out_flag);
  ensure_directory(dir);
  const std::string stem = to_string(family) + "_table";
  write_text(dir / (stem + ".txt"), text.str());
  write_text(dir / (stem + ".csv"), csv.str());
  std::cout << text.str();
  return kExitOk;
}

int cmd_fov(const ProblemArgs& a, const SolverArgs& s, Index cycles, const std::string& out_flag) {
  const Problem p = load_problem(a, a.n);
  if (p.chain.n > kDenseCap) {
    throw UsageError("fov needs n <= " + std::to_string(kDenseCap) + ", got " + std::to_string(p.chain.n));
  }
  const SolveOptions o = solver_options(p.preset_family, s, std::max<Index>(cycles, 1));
  std::shared_ptr<const Hierarchy> h;
  const SolveReport r = solve_steady_state(p.chain, o, &h);
  const VCycleOperator c(h, o.setup.smoother, o.coarsest_rank_tol);

  const DenseMatrix b = densify(p.chain.B);
  const ProjectedSystem bhat = project_range(p.chain.B);
  const ProjectedSystem cb = projected_preconditioned(p.chain.B, c);
  const DenseMatrix cb_inv = pinv(cb.Bhat);

  struct Dataset {
    std::string name;
    const DenseMatrix* m;
  };
  const std::vector<Dataset> sets = {{"B", &b}, {"Bhat", &bhat.Bhat}, {"CBhat", &cb.Bhat}};
  const auto dir = output_dir(out_flag);
  ensure_directory(dir);
  const std::string stem = problem_stem(p.chain) + "_fov";
  Json j;
  j["problem"] = problem_json(p.chain);
  j["options"] = options_json(o);
  j["iterations"] = r.iterations;
  std::vector<FovResult> results;
  for (const auto& d : sets) {
    FovResult f = d.m == &b ? fov_boundary(make_fov_operator(p.chain.B)) : fov_boundary(*d.m);
    f.eigenvalues = eigenvalue_dots(*d.m).values;
    write_complex_csv(dir / (stem + "_" + d.name + "_boundary.csv"), f.boundary);
    write_complex_csv(dir / (stem + "_" + d.name + "_eigenvalues.csv"), f.eigenvalues);
    j[d.name] = to_json(f);
    results.push_back(std::move(f));
  }
  const FovResult inv = fov_boundary(cb_inv);
  j["CBhat_inverse"] = to_json(inv);
  const auto steps = theorem2_steps(results[2].nu_lower, inv.nu_lower, o.gmres.rtol);
  j["theorem2_steps"] = steps ? Json(*steps) : Json(nullptr);
  write_json(dir / (stem + ".json"), j);
  std::cout << to_string(p.chain.family) << " n=" << p.chain.n << " nu(B)=" << results[0].nu
            << " nu(Bhat)=" << results[1].nu << " nu(CBhat)=" << results[2].nu_lower
            << " theorem2_steps=" << (steps ? std::to_string(*steps) : "none") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap AMG preconditioned GMRES for Markov chain steady states"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_flag;
  app.add_option("--out", out_flag, "output directory (default $BAMG_OUTPUT_DIR or ./bamg_out)");

  ProblemArgs gen_args;
  auto* gen = app.add_subcommand("gen", "write A, B and a manifest for a benchmark chain");
  add_problem_options(gen, gen_args, true);

  ProblemArgs solve_args;
  SolverArgs solve_solver;
  Index solve_cycles = 1;
  auto* solve = app.add_subcommand("solve", "compute a steady state and write the report");
  add_problem_options(solve, solve_args, false);
  add_solver_options(solve, solve_solver);
  solve->add_option("--cycles", solve_cycles, "setup cycles: 0 runs plain GMRES(50)");
  solve->add_option("--import", solve_args.import_path, "Matrix Market file holding A or B");

  ProblemArgs table_args;
  SolverArgs table_solver;
  std::vector<Index> sizes;
  Index cap = 1000;
  auto* table = app.add_subcommand("table", "iteration table for a list of sizes");
  add_problem_options(table, table_args, false);
  add_solver_options(table, table_solver);
  table->add_option("--sizes", sizes, "comma separated state counts")->delimiter(',');
  table->add_option("--cap", cap, "iteration cap per cell");

  ProblemArgs fov_args;
  SolverArgs fov_solver;
  Index fov_cycles = 1;
  auto* fov = app.add_subcommand("fov", "field of values of B, its range projection and the preconditioned matrix");
  add_problem_options(fov, fov_args, false);
  add_solver_options(fov, fov_solver);
  fov->add_option("--cycles", fov_cycles, "setup cycles for the preconditioner");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_args, out_flag);
    if (*solve) return cmd_solve(solve_args, solve_solver, solve_cycles, out_flag);
    if (*table) return cmd_table(table_args, table_solver, sizes, cap, out_flag);
    if (*fov) return cmd_fov(fov_args, fov_solver, fov_cycles, out_flag);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NotConverged& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ChainError& e) {
    std::cerr << "invalid chain: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
