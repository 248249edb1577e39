/// Python module pybamg._core: chain generation, setup, preconditioned
/// solves and field-of-values analysis.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bamg/presets.hpp"
#include "bamg/report_io.hpp"
#include "bamg/spectral.hpp"

namespace py = pybind11;
using namespace bamg;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<std::complex<double>> to_array(std::span<const Complex> v) {
  py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

/// (rows, cols, values) of a CSR matrix in coordinate form.
py::tuple coo(const SparseMatrix& m) {
  py::array_t<std::int64_t> rows(static_cast<py::ssize_t>(m.nnz()));
  py::array_t<std::int64_t> cols(static_cast<py::ssize_t>(m.nnz()));
  py::array_t<double> vals(static_cast<py::ssize_t>(m.nnz()));
  auto r = rows.mutable_data();
  auto c = cols.mutable_data();
  auto v = vals.mutable_data();
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    const auto rc = m.row_cols(i);
    const auto rv = m.row_values(i);
    for (Index e = 0; e < rc.size(); ++e, ++k) {
      r[k] = static_cast<std::int64_t>(i);
      c[k] = static_cast<std::int64_t>(rc[e]);
      v[k] = rv[e];
    }
  }
  return py::make_tuple(rows, cols, vals, py::make_tuple(m.rows(), m.cols()));
}

py::array_t<double> dense(const DenseMatrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto o = out.mutable_unchecked<2>();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) o(i, j) = m(i, j);
  }
  return out;
}

DenseMatrix from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  DenseMatrix m(static_cast<Index>(a.shape(0)), static_cast<Index>(a.shape(1)));
  const auto v = a.unchecked<2>();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = v(i, j);
  }
  return m;
}

ChainProblem generate(const std::string& family, Index n, double mu, std::uint64_t seed, unsigned tokens) {
  GenerateParams p;
  p.n = n;
  p.mu = mu;
  p.seed = seed;
  p.tokens = tokens;
  return generate_chain(family_from_string(family), p);
}

SolveOptions options_for(const ChainProblem& problem, Index cycles, const py::dict& overrides) {
  const ChainFamily preset = problem.family;
  SolveOptions o = default_options(preset);
  o.setup_cycles = cycles;
  for (const auto& [key, value] : overrides) {
    const auto k = key.cast<std::string>();
    if (k == "caliber") o.setup.interp.caliber = value.cast<Index>();
    else if (k == "sweeps") o.setup.smoother.sweeps_pre = o.setup.smoother.sweeps_post = value.cast<Index>();
    else if (k == "r") o.setup.r = value.cast<Index>();
    else if (k == "inner_mu") o.setup.inner_mu = value.cast<Index>();
    else if (k == "stop_size") o.setup.coarsening.stop_size = value.cast<Index>();
    else if (k == "seed") o.setup.seed = value.cast<std::uint64_t>();
    else if (k == "max_iters") o.gmres.max_iters = o.baseline.max_iters = value.cast<Index>();
    else if (k == "rtol") o.gmres.rtol = o.baseline.rtol = value.cast<double>();
    else throw std::invalid_argument("unknown solver option '" + k + "'");
  }
  return o;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["x"] = to_array(r.x);
  d["residual_history"] = to_array(r.residual_history);
  d["levels"] = r.levels;
  d["level_sizes"] = r.level_sizes;
  d["grid_complexity"] = r.grid_complexity;
  d["operator_complexity"] = r.operator_complexity;
  return d;
}

py::dict fov_dict(const FovResult& f) {
  py::dict d;
  d["boundary"] = to_array(f.boundary);
  d["nu"] = f.nu;
  d["nu_lower"] = f.nu_lower;
  d["contains_origin"] = f.contains_origin;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bootstrap AMG preconditioned GMRES for Markov chain steady states";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<ChainProblem>(m, "ChainProblem")
      .def_property_readonly("n", [](const ChainProblem& c) { return c.n; })
      .def_property_readonly("family", [](const ChainProblem& c) { return to_string(c.family); })
      .def_property_readonly("params", [](const ChainProblem& c) { return c.params; })
      .def_property_readonly("nnz", [](const ChainProblem& c) { return c.A.nnz(); })
      .def("A_coo", [](const ChainProblem& c) { return coo(c.A); }, "(rows, cols, values, shape) of A")
      .def("B_coo", [](const ChainProblem& c) { return coo(c.B); }, "(rows, cols, values, shape) of B = I - A")
      .def("__repr__", [](const ChainProblem& c) {
        return "<ChainProblem " + to_string(c.family) + " n=" + std::to_string(c.n) + ">";
      });

  m.def("generate", &generate, py::arg("family"), py::arg("n") = 0, py::arg("mu") = 0.96, py::arg("seed") = 0,
        py::arg("tokens") = 0, "Builds one of the benchmark chains.");
  m.def("import_chain", &import_chain, py::arg("path"), "Reads A or B = I - A from a Matrix Market file.");
  m.def("export_chain", &export_chain, py::arg("problem"), py::arg("directory"), py::arg("stem"),
        "Writes <stem>_A.mtx, <stem>_B.mtx and <stem>.json.");
  m.def("molloy_state_count", &molloy_state_count, py::arg("tokens"));

  m.def(
      "solve",
      [](const ChainProblem& problem, Index cycles, const py::dict& options) {
        const SolveOptions o = options_for(problem, cycles, options);
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = solve_steady_state(problem, o);
        }
        return report_dict(r);
      },
      py::arg("problem"), py::arg("cycles") = 1, py::arg("options") = py::dict(),
      "Steady state by BAMG preconditioned GMRES; cycles=0 runs GMRES(50).");

  m.def(
      "setup",
      [](const ChainProblem& problem, Index cycles, const py::dict& options) {
        SetupConfig cfg = options_for(problem, cycles, options).setup;
        cfg.setup_cycles = cycles;
        SetupResult s;
        {
          py::gil_scoped_release release;
          s = run_setup(problem, cfg);
        }
        const Complexities c = complexities(s.hierarchy);
        py::dict d;
        d["sigmas"] = to_array(s.triplets.sigmas);
        d["x0"] = to_array(s.x0);
        d["levels"] = c.levels;
        d["grid_complexity"] = c.grid;
        d["operator_complexity"] = c.op;
        std::vector<Index> sizes;
        for (const auto& l : s.hierarchy.levels) sizes.push_back(l.size());
        d["level_sizes"] = sizes;
        d["triplet_residual"] = triplet_residual(s.hierarchy.levels.front(), s.triplets);
        return d;
      },
      py::arg("problem"), py::arg("cycles") = 1, py::arg("options") = py::dict(),
      "Runs the bootstrap setup and returns singular values, x0 and complexities.");

  m.def(
      "fov",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, Index n_angles) {
        FovConfig cfg;
        cfg.n_angles = n_angles;
        return fov_dict(fov_boundary(from_array(a), cfg));
      },
      py::arg("matrix"), py::arg("n_angles") = 256, "Field-of-values boundary and distance to the origin.");

  m.def(
      "project_range", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        const ProjectedSystem p = project_range(from_array(a));
        return py::make_tuple(dense(p.Pi), dense(p.Bhat));
      },
      py::arg("matrix"), "(Pi, Pi^T M Pi) for an orthonormal basis Pi of range(M).");

  m.def(
      "eigenvalues",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        const GeneralEigenvalues g = general_eigenvalues(from_array(a));
        if (!g.converged) throw NumericalError("eigenvalues: QR iteration did not converge");
        return to_array(g.values);
      },
      py::arg("matrix"), "Eigenvalues of a dense real matrix.");

  m.def("theorem2_bound", py::overload_cast<double, double, Index>(&theorem2_bound), py::arg("nu_m"),
        py::arg("nu_minv"), py::arg("k"));
}
