/// Acceptance checks: one PASS/FAIL line per criterion. Exits nonzero when
/// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "bamg/presets.hpp"
#include "bamg/rng.hpp"
#include "bamg/spectral.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bamg;

namespace {

/// Collects failures of one criterion with a short summary of every check.
class Criterion {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) pass_ = false;
    notes_.push_back((ok ? "" : "!") + what);
  }
  bool pass() const { return pass_; }
  std::string summary() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return s;
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Run {
  SolveReport report;
  std::shared_ptr<const Hierarchy> hierarchy;
};

using RunKey = std::tuple<ChainFamily, Index, Index>;

/// Chains and solves shared between criteria.
class Workspace {
 public:
  const ChainProblem& chain(ChainFamily f, Index n) {
    const auto key = std::make_pair(f, n);
    auto it = chains_.find(key);
    if (it == chains_.end()) {
      GenerateParams p;
      p.n = n;
      it = chains_.emplace(key, generate_chain(f, p)).first;
    }
    return it->second;
  }

  const Run& run(ChainFamily f, Index n, Index cycles) {
    const RunKey key{f, n, cycles};
    auto it = runs_.find(key);
    if (it == runs_.end()) {
      SolveOptions o = default_options(f);
      o.setup_cycles = cycles;
      Run r;
      r.report = solve_steady_state(chain(f, n), o, &r.hierarchy);
      it = runs_.emplace(key, std::move(r)).first;
    }
    return it->second;
  }

  const std::map<RunKey, Run>& runs() const { return runs_; }

 private:
  std::map<std::pair<ChainFamily, Index>, ChainProblem> chains_;
  std::map<RunKey, Run> runs_;
};

std::string label(ChainFamily f, Index n, Index cycles) {
  const std::string row = cycles == 0 ? "gmres50" : cycles == 1 ? "bamg" : "bamg2";
  return to_string(f) + " " + std::to_string(n) + " " + row;
}

std::string iters(const Run& r) {
  return std::to_string(r.report.iterations) + (r.report.converged ? "" : "(nc)");
}

/// Iteration thresholds for the BAMG rows of one table.
void table_rows(Workspace& ws, Criterion& c, ChainFamily f, const std::vector<Index>& sizes, Index max1,
                Index max2) {
  for (const Index n : sizes) {
    const Run& r1 = ws.run(f, n, 1);
    c.check(r1.report.converged && r1.report.iterations <= max1,
            label(f, n, 1) + "=" + iters(r1) + "<=" + std::to_string(max1));
    const Run& r2 = ws.run(f, n, 2);
    c.check(r2.report.converged && r2.report.iterations <= max2,
            label(f, n, 2) + "=" + iters(r2) + "<=" + std::to_string(max2));
  }
}

void baseline_within(Workspace& ws, Criterion& c, ChainFamily f, Index n, double target, double rel) {
  const Run& r = ws.run(f, n, 0);
  const double lo = target * (1.0 - rel);
  const double hi = target * (1.0 + rel);
  const auto it = static_cast<double>(r.report.iterations);
  c.check(r.report.converged && it >= lo && it <= hi,
          label(f, n, 0) + "=" + iters(r) + " in [" + fmt(lo) + "," + fmt(hi) + "]");
}

Criterion criterion_birth_death(Workspace& ws) {
  Criterion c;
  table_rows(ws, c, ChainFamily::BirthDeath, {1025, 2049, 4097}, 5, 3);
  const Run& r = ws.run(ChainFamily::BirthDeath, 1025, 0);
  c.check(!r.report.converged && r.report.iterations >= 1000, label(ChainFamily::BirthDeath, 1025, 0) + "=" +
                                                                  iters(r) + ">1000");
  return c;
}

Criterion criterion_uniform(Workspace& ws) {
  Criterion c;
  table_rows(ws, c, ChainFamily::Uniform2D, {1089, 4225}, 8, 6);
  baseline_within(ws, c, ChainFamily::Uniform2D, 1089, 52.0, 0.15);
  return c;
}

Criterion criterion_tandem(Workspace& ws) {
  Criterion c;
  table_rows(ws, c, ChainFamily::TandemQueue, {1089}, 8, 6);
  baseline_within(ws, c, ChainFamily::TandemQueue, 1089, 165.0, 0.20);
  return c;
}

void complexity_bounds(Criterion& c, const std::string& name, const SolveReport& r, double og, double oc) {
  c.check(r.grid_complexity <= og, name + " o_g=" + fmt(r.grid_complexity) + "<=" + fmt(og));
  c.check(r.operator_complexity <= oc, name + " o_c=" + fmt(r.operator_complexity) + "<=" + fmt(oc));
}

Criterion criterion_planar(Workspace& ws) {
  Criterion c;
  const auto f = ChainFamily::RandomPlanar;
  table_rows(ws, c, f, {1024, 4096}, 12, 5);
  for (const Index n : {Index{1024}, Index{4096}}) {
    for (const Index cycles : {Index{1}, Index{2}}) {
      const Run& r = ws.run(f, n, cycles);
      c.check(r.report.levels >= 1 && r.report.levels <= 3,
              label(f, n, cycles) + " levels=" + std::to_string(r.report.levels) + " in [1,3]");
      complexity_bounds(c, label(f, n, cycles), r.report, 1.35, 1.6);
    }
  }
  return c;
}

Criterion criterion_petri(Workspace& ws) {
  Criterion c;
  const auto f = ChainFamily::PetriNet;
  for (const Index n : {Index{506}, Index{1496}}) {
    const Run& r = ws.run(f, n, 1);
    c.check(r.report.converged && r.report.iterations <= 10, label(f, n, 1) + "=" + iters(r) + "<=10");
    const double xmin = *std::min_element(r.report.x.begin(), r.report.x.end());
    c.check(xmin > 0.0, label(f, n, 1) + " min x=" + fmt(xmin) + ">0");
    complexity_bounds(c, label(f, n, 1), r.report, 1.8, 2.6);
  }
  return c;
}

/// Largest violation of the three hierarchy invariants.
struct InvariantErrors {
  double column_sums = 0.0;  ///< ||1^T B_l||_inf / ||B_l||_inf
  double q_columns = 0.0;    ///< max |1^T Q_l - 1^T|
  bool p_identity = true;
};

InvariantErrors hierarchy_invariants(const Hierarchy& h) {
  InvariantErrors e;
  for (Index l = 0; l < h.size(); ++l) {
    const Level& lv = h.levels[l];
    const Vector ones(lv.size(), 1.0);
    const Vector cs = spmv_transpose(lv.B, ones);
    e.column_sums = std::max(e.column_sums, norm_inf(cs) / lv.B.norm_inf());
    if (l + 1 == h.size()) continue;
    const Vector qs = spmv_transpose(lv.Q, Vector(lv.Q.rows(), 1.0));
    for (const double s : qs) e.q_columns = std::max(e.q_columns, std::abs(s - 1.0));
    for (const Index i : lv.split.coarse) {
      const auto cols = lv.P.row_cols(i);
      const auto vals = lv.P.row_values(i);
      if (cols.size() != 1 || cols[0] != lv.split.coarse_rank[i] || vals[0] != 1.0) e.p_identity = false;
    }
  }
  return e;
}

Criterion criterion_invariants(Workspace& ws) {
  Criterion c;
  Index count = 0;
  InvariantErrors worst;
  std::string worst_cs;
  std::string worst_q;
  for (const auto& [key, run] : ws.runs()) {
    if (std::get<2>(key) == 0) continue;
    const auto e = hierarchy_invariants(*run.hierarchy);
    const std::string name = label(std::get<0>(key), std::get<1>(key), std::get<2>(key));
    if (e.column_sums >= worst.column_sums) {
      worst.column_sums = e.column_sums;
      worst_cs = name;
    }
    if (e.q_columns >= worst.q_columns) {
      worst.q_columns = e.q_columns;
      worst_q = name;
    }
    if (!e.p_identity) c.check(false, name + " P not identity on C");
    ++count;
  }
  c.check(count > 0, std::to_string(count) + " hierarchies");
  c.check(worst.column_sums <= 1e-12, "max ||1^T B_l||/||B_l||=" + fmt(worst.column_sums) + " (" + worst_cs + ")<=1e-12");
  c.check(worst.q_columns <= 1e-13, "max |1^T Q_l - 1|=" + fmt(worst.q_columns) + " (" + worst_q + ")<=1e-13");
  return c;
}

struct SmallCase {
  ChainFamily family;
  Index n;
};

Criterion criterion_oracles(Workspace& ws) {
  Criterion c;
  const std::vector<SmallCase> cases = {{ChainFamily::BirthDeath, 100},
                                        {ChainFamily::Uniform2D, 100},
                                        {ChainFamily::TandemQueue, 100},
                                        {ChainFamily::RandomPlanar, 100},
                                        {ChainFamily::PetriNet, 91}};
  double worst_sigma = 0.0;
  double worst_x = 0.0;
  double worst_svd = 0.0;
  for (const auto& sc : cases) {
    const ChainProblem& chain = ws.chain(sc.family, sc.n);
    const Vector exact = oracle::steady_state(chain.B);
    for (const Index stop : {Index{0}, Index{20}}) {
      SolveOptions o = default_options(sc.family);
      o.setup_cycles = 2;
      if (stop > 0) o.setup.coarsening.stop_size = stop;
      const std::string name = to_string(sc.family) + " " + std::to_string(sc.n) +
                               (stop > 0 ? " stop" + std::to_string(stop) : " preset");

      SetupConfig cfg = o.setup;
      cfg.setup_cycles = 2;
      const SetupResult s = run_setup(chain, cfg);
      double sigma1 = std::abs(s.triplets.sigmas.front());
      for (const double sg : s.triplets.sigmas) sigma1 = std::min(sigma1, std::abs(sg));
      worst_sigma = std::max(worst_sigma, sigma1);
      c.check(sigma1 <= 1e-8, name + " sigma1=" + fmt(sigma1) + " (" + std::to_string(s.hierarchy.size()) +
                                  " levels)");

      const SolveReport r = solve_steady_state(chain, o);
      double err = 0.0;
      for (Index i = 0; i < chain.n; ++i) err += std::abs(r.x[i] - exact[i]);
      worst_x = std::max(worst_x, err);
      if (err > 1e-6) c.check(false, name + " |x - x_dense|_1=" + fmt(err));
    }

    const Index r = default_options(sc.family).setup.r;
    const SparseMatrix eye = SparseMatrix::identity(chain.n);
    const TripletSet t = coarsest_triplets(chain.B, eye, eye, r);
    const oracle::JacobiSvd f = oracle::jacobi_svd(oracle::dense(chain.B));
    Vector lib = t.sigmas;
    for (auto& v : lib) v = std::abs(v);
    std::sort(lib.begin(), lib.end());
    for (Index k = 0; k < r; ++k) {
      const double ref = f.s[f.s.size() - 1 - k];
      worst_svd = std::max(worst_svd, std::abs(lib[k] - ref));
    }
  }
  c.check(worst_sigma <= 1e-8, "max sigma1=" + fmt(worst_sigma) + "<=1e-8");
  c.check(worst_x <= 1e-6, "max |x - x_dense|_1=" + fmt(worst_x) + "<=1e-6");
  c.check(worst_svd <= 1e-9, "max |sigma - sigma_svd|=" + fmt(worst_svd) + "<=1e-9");
  return c;
}

double linearity_error(const VCycleOperator& op, Rng& rng) {
  const Index n = op.size();
  const Vector a = rng.vector(n);
  const Vector b = rng.vector(n);
  const double alpha = 0.7;
  const double beta = -1.3;
  Vector mix(n);
  for (Index i = 0; i < n; ++i) mix[i] = alpha * a[i] + beta * b[i];
  const Vector cm = vcycle_apply(op, mix);
  const Vector ca = vcycle_apply(op, a);
  const Vector cb = vcycle_apply(op, b);
  Vector ref(n);
  for (Index i = 0; i < n; ++i) ref[i] = alpha * ca[i] + beta * cb[i];
  Vector diff(n);
  for (Index i = 0; i < n; ++i) diff[i] = cm[i] - ref[i];
  return norm2(diff) / norm2(ref);
}

/// max |(I - C B) - E_oracle| / max(1, max |E_oracle|) on a two-level
/// hierarchy.
double propagator_error(const ChainProblem& chain, const SolveOptions& o, Index* levels) {
  SetupConfig cfg = o.setup;
  cfg.coarsening.max_levels = 2;
  const SetupResult s = run_setup(chain, cfg);
  *levels = s.hierarchy.size();
  const Level& fine = s.hierarchy.levels.front();
  const auto h = std::make_shared<const Hierarchy>(s.hierarchy);
  const VCycleOperator op(h, o.setup.smoother, o.coarsest_rank_tol);
  const DenseMatrix e = oracle::two_level_propagator(fine.B, fine.P, fine.Q, o.setup.smoother, o.coarsest_rank_tol);
  const Index n = chain.n;
  double scale = 1.0;
  for (const double v : e.data()) scale = std::max(scale, std::abs(v));
  double err = 0.0;
  for (Index j = 0; j < n; ++j) {
    Vector ej(n, 0.0);
    ej[j] = 1.0;
    const Vector cbe = vcycle_apply(op, spmv(chain.B, ej));
    for (Index i = 0; i < n; ++i) {
      const double lib = ej[i] - cbe[i];
      err = std::max(err, std::abs(lib - e(i, j)));
    }
  }
  return err / scale;
}

Criterion criterion_linearity(Workspace& ws) {
  Criterion c;
  Rng rng(2024);
  for (const auto& [key, run] : ws.runs()) {
    if (std::get<2>(key) == 0) continue;
    const auto f = std::get<0>(key);
    const SolveOptions o = default_options(f);
    const VCycleOperator op(run.hierarchy, o.setup.smoother, o.coarsest_rank_tol);
    const double err = linearity_error(op, rng);
    c.check(err <= 1e-12, label(f, std::get<1>(key), std::get<2>(key)) + " linearity=" + fmt(err));
  }
  const std::vector<ChainFamily> families = {ChainFamily::BirthDeath, ChainFamily::RandomPlanar};
  for (const auto f : families) {
    SolveOptions o = default_options(f);
    o.setup.coarsening.stop_size = 20;
    Index levels = 0;
    const double err = propagator_error(ws.chain(f, 32), o, &levels);
    c.check(levels == 2 && err <= 1e-10, to_string(f) + " 32 two-level propagator=" + fmt(err) + " (" +
                                             std::to_string(levels) + " levels)");
  }
  return c;
}

Criterion criterion_fov(Workspace& ws) {
  Criterion c;
  const std::vector<SmallCase> cases = {
      {ChainFamily::Uniform2D, 1089}, {ChainFamily::TandemQueue, 1089}, {ChainFamily::PetriNet, 506}};
  for (const auto& sc : cases) {
    const std::string name = to_string(sc.family) + " " + std::to_string(sc.n);
    const Run& run = ws.run(sc.family, sc.n, 1);
    const ChainProblem& chain = ws.chain(sc.family, sc.n);
    const SolveOptions o = default_options(sc.family);
    const VCycleOperator op(run.hierarchy, o.setup.smoother, o.coarsest_rank_tol);

    const FovResult fb = fov_boundary(make_fov_operator(chain.B));
    c.check(fb.contains_origin && fb.nu == 0.0, name + " nu(B)=" + fmt(fb.nu));
    const FovResult fbhat = fov_boundary(project_range(chain.B).Bhat);
    c.check(fbhat.contains_origin && fbhat.nu == 0.0, name + " nu(Bhat)=" + fmt(fbhat.nu));
    const ProjectedSystem cb = projected_preconditioned(chain.B, op);
    const FovResult fcb = fov_boundary(cb.Bhat);
    c.check(fcb.nu_lower > 0.0, name + " nu(CBhat)=" + fmt(fcb.nu_lower) + ">0");
    const FovResult finv = fov_boundary(pinv(cb.Bhat));
    const auto steps = theorem2_steps(fcb.nu_lower, finv.nu_lower, 1e-7);
    c.check(steps && *steps <= 50, name + " theorem2 steps=" + (steps ? std::to_string(*steps) : "none") + "<=50");
  }
  return c;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Runs each command into two directories and compares every output file.
Criterion criterion_determinism(const std::string& cli, const fs::path& scratch) {
  Criterion c;
  if (cli.empty()) {
    c.check(false, "no --cli given");
    return c;
  }
  const std::vector<std::string> commands = {
      "gen planar --n 300 --seed 7",
      "solve --family planar --n 300 --seed 7 --cycles 1",
      "solve --family petri --tokens 5 --cycles 2",
      "solve --family birth-death --n 129 --cycles 0",
      "table --family birth-death --sizes 65,129",
      "fov --family petri --tokens 4",
  };
  for (Index k = 0; k < commands.size(); ++k) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const fs::path dir = scratch / ("cmd" + std::to_string(k)) / tag;
      fs::remove_all(dir);
      fs::create_directories(dir);
      const std::string line = "\"" + cli + "\" --out \"" + dir.string() + "\" " + commands[k] + " > \"" +
                               (scratch / ("cmd" + std::to_string(k)) / (std::string(tag) + ".log")).string() + "\" 2>&1";
      const int rc = std::system(line.c_str());
      c.check(rc == 0, commands[k] + " exit=" + std::to_string(rc));
      dirs.push_back(dir);
    }
    Index files = 0;
    bool same = true;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto ext = entry.path().extension();
      if (ext != ".json" && ext != ".csv" && ext != ".mtx" && ext != ".txt") continue;
      ++files;
      const fs::path other = dirs[1] / entry.path().filename();
      if (!fs::exists(other) || read_bytes(entry.path()) != read_bytes(other)) same = false;
    }
    c.check(same && files > 1, commands[k] + " identical files=" + std::to_string(files));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string cli;
  std::string scratch = "acceptance_scratch";
  std::vector<int> only;
  app.add_option("--cli", cli, "path to the bamg executable");
  app.add_option("--scratch", scratch, "directory for CLI outputs");
  app.add_option("--only", only, "criterion numbers to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  Workspace ws;
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"birth-death table", [&] { return criterion_birth_death(ws); }},
      {"uniform 2D table", [&] { return criterion_uniform(ws); }},
      {"tandem queue table", [&] { return criterion_tandem(ws); }},
      {"random planar table", [&] { return criterion_planar(ws); }},
      {"Petri net table", [&] { return criterion_petri(ws); }},
      {"hierarchy invariants", [&] { return criterion_invariants(ws); }},
      {"dense oracle equivalence", [&] { return criterion_oracles(ws); }},
      {"linearity and two-level propagator", [&] { return criterion_linearity(ws); }},
      {"field of values", [&] { return criterion_fov(ws); }},
      {"CLI determinism", [&] { return criterion_determinism(cli, scratch); }},
  };

  int failed = 0;
  for (Index k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.pass()) ++failed;
    std::cout << "criterion " << id << " " << (c.pass() ? "PASS" : "FAIL") << " " << criteria[k].first << " ["
              << fmt(secs) << " s]: " << c.summary() << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
