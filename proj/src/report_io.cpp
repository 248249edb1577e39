#include "bamg/report_io.hpp"

#include <cstdio>
#include <fstream>

namespace bamg {

Json to_json(const CfSplitting& split) {
  Json j;
  j["n"] = split.size();
  j["coarse"] = split.coarse;
  j["fine"] = split.fine;
  return j;
}

Json to_json(const SetupConfig& cfg) {
  Json j;
  j["r"] = cfg.r;
  j["setup_cycles"] = cfg.setup_cycles;
  j["inner_mu"] = cfg.inner_mu;
  j["seed"] = cfg.seed;
  j["smoother"] = {{"omega", cfg.smoother.omega},
                   {"sweeps_pre", cfg.smoother.sweeps_pre},
                   {"sweeps_post", cfg.smoother.sweeps_post},
                   {"form", cfg.smoother.form == JacobiForm::Damped ? "damped" : "scaled_splitting"}};
  j["interp"] = {{"caliber", cfg.interp.caliber},
                 {"search_radius", cfg.interp.search_radius},
                 {"constrain_constant_in_Q", cfg.interp.constrain_constant_in_Q},
                 {"improvement_tol", cfg.interp.improvement_tol},
                 {"max_weight", cfg.interp.max_weight},
                 {"rank_tol", cfg.interp.rank_tol},
                 {"ridge", cfg.interp.ridge},
                 {"prior", cfg.interp.prior == InterpPrior::Uniform ? "uniform" : "operator"}};
  j["coarsening"] = {{"mode", to_string(cfg.coarsening.mode)},
                     {"stop_size", cfg.coarsening.stop_size},
                     {"cr_sweeps", cfg.coarsening.cr_sweeps},
                     {"cr_threshold", cfg.coarsening.cr_threshold},
                     {"cr_max_passes", cfg.coarsening.cr_max_passes},
                     {"max_levels", cfg.coarsening.max_levels}};
  return j;
}

Json to_json(const SolveReport& r, bool include_timings) {
  Json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["setup_cycles"] = r.setup_cycles_used;
  j["levels"] = r.levels;
  j["level_sizes"] = r.level_sizes;
  j["grid_complexity"] = r.grid_complexity;
  j["operator_complexity"] = r.operator_complexity;
  j["final_scaled_residual"] = r.residual_history.empty() ? 0.0 : r.residual_history.back();
  j["residual_history"] = r.residual_history;
  if (include_timings) {
    j["setup_seconds"] = r.setup_seconds;
    j["solve_seconds"] = r.solve_seconds;
  }
  return j;
}

Json to_json(const FovResult& fov) {
  Json j;
  j["nu"] = fov.nu;
  j["nu_lower"] = fov.nu_lower;
  j["contains_origin"] = fov.contains_origin;
  j["boundary_points"] = fov.boundary.size();
  j["eigenvalues"] = fov.eigenvalues.size();
  return j;
}

void ensure_directory(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_vector_csv(const std::filesystem::path& path, std::span<const double> x, const std::string& header) {
  std::string s = header + "\n";
  for (double v : x) s += fmt(v) + "\n";
  write_text(path, s);
}

void write_complex_csv(const std::filesystem::path& path, std::span<const Complex> z) {
  std::string s = "re,im\n";
  for (const auto& v : z) s += fmt(v.real()) + "," + fmt(v.imag()) + "\n";
  write_text(path, s);
}

void export_chain(const ChainProblem& problem, const std::filesystem::path& dir, const std::string& stem) {
  ensure_directory(dir);
  write_matrix_market(dir / (stem + "_A.mtx"), problem.A);
  write_matrix_market(dir / (stem + "_B.mtx"), problem.B);
  Json j;
  j["family"] = to_string(problem.family);
  j["n"] = problem.n;
  j["nnz"] = problem.A.nnz();
  j["seed"] = problem.seed;
  Json params = Json::object();
  for (const auto& [k, v] : problem.params) params[k] = v;
  j["params"] = params;
  j["A"] = stem + "_A.mtx";
  j["B"] = stem + "_B.mtx";
  write_json(dir / (stem + ".json"), j);
}

}  // namespace bamg
