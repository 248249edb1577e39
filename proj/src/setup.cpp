#include "bamg/setup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "bamg/dense.hpp"
#include "bamg/rng.hpp"

namespace bamg {

void SetupConfig::validate() const {
  if (r < 2) throw std::invalid_argument("setup: r must be at least 2");
  if (setup_cycles < 1) throw std::invalid_argument("setup: setup_cycles must be at least 1");
  if (inner_mu < 1) throw std::invalid_argument("setup: inner_mu must be at least 1");
  smoother.validate();
  interp.validate();
  coarsening.validate();
}

double rayleigh_sigma(std::span<const double> u, std::span<const double> v, const SparseMatrix& b,
                      const SparseMatrix& m, const SparseMatrix& n, double previous) {
  const double um = dot(u, spmv(m, u));
  const double vn = dot(v, spmv(n, v));
  if (!(um >= 1e-30) || !(vn >= 1e-30)) return previous;
  const double nu = std::sqrt(um);
  const double nv = std::sqrt(vn);
  if (nu < 1e-15 || nv < 1e-15) return previous;
  return dot(u, spmv(b, v)) / (nu * nv);
}

namespace {

/// Scales x to unit norm in the inner product of the SPD matrix m.
void normalize_in(const SparseMatrix& m, Vector& x) {
  const double q = dot(x, spmv(m, x));
  if (!(q > 0.0) || !std::isfinite(q)) throw NumericalError("setup: test vector lost its norm");
  scale(x, 1.0 / std::sqrt(q));
}

Vector constant_vector(const SparseMatrix& m, Index n) {
  Vector c(n, 1.0);
  normalize_in(m, c);
  return c;
}

Vector inject(const Vector& x, const CfSplitting& split) {
  Vector out(split.coarse.size());
  for (Index k = 0; k < split.coarse.size(); ++k) out[k] = x[split.coarse[k]];
  return out;
}

/// Normalizes every test, locks the constant and refreshes sigma.
void finish_tests(const Level& lev, TripletSet& t, bool lock_constant) {
  for (Index k = 0; k < t.size(); ++k) {
    normalize_in(lev.M, t.U[k]);
    normalize_in(lev.N, t.V[k]);
  }
  if (lock_constant && t.size() > 0) t.U[0] = constant_vector(lev.M, lev.size());
  for (Index k = 0; k < t.size(); ++k) t.sigmas[k] = rayleigh_sigma(t.U[k], t.V[k], lev.B, lev.M, lev.N, t.sigmas[k]);
}

struct LevelSmoothers {
  SparseMatrix bt;
  JacobiSmoother right;
  JacobiSmoother left;

  LevelSmoothers(const SparseMatrix& b, const SmootherConfig& cfg)
      : bt(transpose(b)), right(b, cfg), left(bt, cfg) {}
};

void smooth_homogeneous(const Level& lev, const LevelSmoothers& s, TripletSet& t, Index sweeps, bool lock_constant) {
  for (Index k = 0; k < t.size(); ++k) {
    s.right.smooth(lev.B, t.V[k], {}, sweeps);
    if (!(lock_constant && k == 0)) s.left.smooth(s.bt, t.U[k], {}, sweeps);
  }
}

void smooth_inhomogeneous(const Level& lev, const LevelSmoothers& s, TripletSet& t, Index sweeps,
                          bool lock_constant) {
  for (Index k = 0; k < t.size(); ++k) {
    Vector rhs = spmv(lev.M, t.U[k]);
    scale(rhs, t.sigmas[k]);
    s.right.smooth(lev.B, t.V[k], rhs, sweeps);
    if (lock_constant && k == 0) continue;
    rhs = spmv(lev.N, t.V[k]);
    scale(rhs, t.sigmas[k]);
    s.left.smooth(s.bt, t.U[k], rhs, sweeps);
  }
}

CfSplitting split_level(const Level& lev, const CoarseningConfig& cfg, std::uint64_t seed, Index l) {
  if (cfg.mode == CoarseningMode::CompatibleRelaxation) return cr_coarsen(lev.B, cfg, mix_seed(seed, 1000 + l));
  if (!lev.geometry) throw std::invalid_argument("setup: geometric coarsening needs chain geometry");
  return geometric_coarsen(*lev.geometry, cfg.mode);
}

/// Keeps the triplets from the coarsest solve and tops up missing slots from
/// the incoming tests.
TripletSet solve_coarsest(const Level& lev, const TripletSet& incoming, bool lock_constant) {
  TripletSet t = coarsest_triplets(lev.B, lev.M, lev.N, incoming.size());
  for (Index k = t.size(); k < incoming.size(); ++k) {
    t.sigmas.push_back(incoming.sigmas[k]);
    t.U.push_back(incoming.U[k]);
    t.V.push_back(incoming.V[k]);
  }
  finish_tests(lev, t, lock_constant);
  return t;
}

}  // namespace

TripletSet init_test_vectors(const SparseMatrix& b, const SetupConfig& cfg) {
  cfg.validate();
  const Index n = b.rows();
  if (b.cols() != n) throw DimensionError("init_test_vectors: matrix must be square");
  Rng rng(cfg.seed);
  TripletSet t;
  for (Index k = 0; k < cfg.r; ++k) t.V.push_back(rng.vector(n));
  for (Index k = 0; k < cfg.r; ++k) t.U.push_back(rng.vector(n));
  t.sigmas.assign(cfg.r, 0.0);
  Level lev;
  lev.B = b;
  lev.M = SparseMatrix::identity(n);
  lev.N = lev.M;
  const LevelSmoothers s(b, cfg.smoother);
  smooth_homogeneous(lev, s, t, cfg.smoother.sweeps_pre, true);
  finish_tests(lev, t, true);
  return t;
}

TripletSet coarsest_triplets(const SparseMatrix& b, const SparseMatrix& m, const SparseMatrix& n, Index r) {
  const Index nl = b.rows();
  if (b.cols() != nl || m.rows() != nl || n.rows() != nl) throw DimensionError("coarsest_triplets: size mismatch");
  const DenseMatrix bd = densify(b);
  const DenseMatrix md = densify(m);
  const DenseMatrix nd = densify(n);
  DenseMatrix k(2 * nl, 2 * nl);
  DenseMatrix d(2 * nl, 2 * nl);
  for (Index i = 0; i < nl; ++i) {
    for (Index j = 0; j < nl; ++j) {
      k(i, nl + j) = bd(i, j);
      k(nl + j, i) = bd(i, j);
      d(i, j) = 0.5 * (md(i, j) + md(j, i));
      d(nl + i, nl + j) = 0.5 * (nd(i, j) + nd(j, i));
    }
  }
  const EigenDecomposition eig = gen_sym_eig(k, d);
  double lmax = 0.0;
  for (double l : eig.eigenvalues) lmax = std::max(lmax, std::abs(l));
  const double zero_tol = 1e-10 * std::max(lmax, 1e-300);

  TripletSet t;
  // Zero eigenvalues come as mixed pairs of (u, 0) and (0, v); separate them
  // through the dominant directions of the stacked halves.
  std::vector<Index> zeros;
  for (Index c = 0; c < eig.eigenvalues.size(); ++c) {
    if (std::abs(eig.eigenvalues[c]) <= zero_tol) zeros.push_back(c);
  }
  if (!zeros.empty()) {
    DenseMatrix top(nl, zeros.size());
    DenseMatrix bottom(nl, zeros.size());
    for (Index z = 0; z < zeros.size(); ++z) {
      for (Index i = 0; i < nl; ++i) {
        top(i, z) = eig.eigenvectors(i, zeros[z]);
        bottom(i, z) = eig.eigenvectors(nl + i, zeros[z]);
      }
    }
    const SvdResult su = svd(top);
    const SvdResult sv = svd(bottom);
    const Index pairs = std::min<Index>((zeros.size() + 1) / 2, r);
    for (Index p = 0; p < pairs; ++p) {
      t.sigmas.push_back(0.0);
      t.U.push_back(su.u.column(p));
      t.V.push_back(sv.u.column(p));
    }
  }
  for (Index c = 0; c < eig.eigenvalues.size() && t.size() < r; ++c) {
    if (eig.eigenvalues[c] <= zero_tol) continue;
    Vector u(nl), v(nl);
    for (Index i = 0; i < nl; ++i) {
      u[i] = eig.eigenvectors(i, c);
      v[i] = eig.eigenvectors(nl + i, c);
    }
    t.sigmas.push_back(eig.eigenvalues[c]);
    t.U.push_back(std::move(u));
    t.V.push_back(std::move(v));
  }
  for (Index p = 0; p < t.size(); ++p) {
    normalize_in(m, t.U[p]);
    normalize_in(n, t.V[p]);
  }
  return t;
}

TripletSet bamg_mle(Hierarchy& h, Index l, TripletSet t, const SetupConfig& cfg, bool first_cycle) {
  if (l >= h.levels.size()) throw std::out_of_range("bamg_mle: level does not exist");
  h.levels.resize(l + 1);
  const bool lock = cfg.interp.constrain_constant_in_Q;
  const Index sweeps = cfg.smoother.sweeps_pre;
  {
    Level& lev = h.levels[l];
    lev.P = SparseMatrix();
    lev.Q = SparseMatrix();
    const Index n = lev.size();
    bool coarsest = n < cfg.coarsening.stop_size || l + 1 >= cfg.coarsening.max_levels;
    if (!coarsest) {
      lev.split = split_level(lev, cfg.coarsening, cfg.seed, l);
      coarsest = static_cast<double>(lev.split.coarse_size()) > cfg.coarsening.stall_ratio * static_cast<double>(n);
    }
    if (coarsest) {
      std::vector<bool> all(n, true);
      lev.split = CfSplitting::from_flags(all);
      return solve_coarsest(lev, t, lock);
    }
  }

  {
    const Level& lev = h.levels[l];
    const LevelSmoothers s(lev.B, cfg.smoother);
    if (first_cycle) {
      smooth_homogeneous(lev, s, t, sweeps, lock);
    } else {
      smooth_inhomogeneous(lev, s, t, sweeps, lock);
    }
    finish_tests(lev, t, lock);
  }

  for (Index m = 0; m < cfg.inner_mu; ++m) {
    h.levels.resize(l + 1);
    Level next;
    {
      Level& lev = h.levels[l];
      const SparseMatrix bt = transpose(lev.B);
      const WeightedTestSet vw = make_weighted_tests(lev.B, t.V, cfg.interp);
      const WeightedTestSet uw =
          make_weighted_tests(bt, t.U, cfg.interp, lock ? std::optional<Index>(0) : std::nullopt);
      lev.P = build_interpolation(lev.B, lev.split, vw, cfg.interp);
      lev.Q = build_restriction(lev.B, lev.split, uw, cfg.interp);
      next.B = triple_product(lev.Q, lev.B, lev.P);
      next.M = triple_product(lev.Q, lev.M, transpose(lev.Q));
      next.N = triple_product(transpose(lev.P), lev.N, lev.P);
      if (lev.geometry) next.geometry = coarse_geometry(*lev.geometry, lev.split);
    }

    TripletSet coarse;
    coarse.sigmas = t.sigmas;
    for (Index k = 0; k < t.size(); ++k) {
      coarse.U.push_back(inject(t.U[k], h.levels[l].split));
      coarse.V.push_back(inject(t.V[k], h.levels[l].split));
    }
    finish_tests(next, coarse, lock);
    h.levels.push_back(std::move(next));
    coarse = bamg_mle(h, l + 1, std::move(coarse), cfg, first_cycle);

    const Level& lev = h.levels[l];
    for (Index k = 0; k < t.size(); ++k) {
      t.U[k] = spmv_transpose(lev.Q, coarse.U[k]);
      t.V[k] = spmv(lev.P, coarse.V[k]);
      t.sigmas[k] = coarse.sigmas[k];
    }
    finish_tests(lev, t, lock);
    const LevelSmoothers s(lev.B, cfg.smoother);
    smooth_inhomogeneous(lev, s, t, sweeps, lock);
    finish_tests(lev, t, lock);
  }
  return t;
}

void normalize_probability(Vector& x) {
  if (x.empty()) return;
  Index big = 0;
  for (Index i = 1; i < x.size(); ++i) {
    if (std::abs(x[i]) > std::abs(x[big])) big = i;
  }
  const double n1 = norm1(x);
  if (!(n1 > 0.0) || !std::isfinite(n1)) throw NumericalError("normalize_probability: zero or non-finite vector");
  scale(x, (x[big] < 0.0 ? -1.0 : 1.0) / n1);
}

SetupResult run_setup(const ChainProblem& problem, const SetupConfig& cfg) {
  cfg.validate();
  SetupResult out;
  Level fine;
  fine.B = problem.B;
  fine.M = SparseMatrix::identity(problem.n);
  fine.N = fine.M;
  fine.geometry = problem.geometry;
  out.hierarchy.levels.push_back(std::move(fine));
  TripletSet t = init_test_vectors(problem.B, cfg);
  for (Index c = 0; c < cfg.setup_cycles; ++c) t = bamg_mle(out.hierarchy, 0, std::move(t), cfg, c == 0);
  Index best = 0;
  for (Index k = 1; k < t.size(); ++k) {
    if (std::abs(t.sigmas[k]) < std::abs(t.sigmas[best])) best = k;
  }
  out.x0 = t.V[best];
  normalize_probability(out.x0);
  out.triplets = std::move(t);
  return out;
}

Complexities complexities(const Hierarchy& h) {
  if (h.levels.empty()) throw std::invalid_argument("complexities: empty hierarchy");
  Complexities c;
  double grid = 0.0, op = 0.0;
  for (const auto& lev : h.levels) {
    grid += static_cast<double>(lev.size());
    op += static_cast<double>(lev.B.nnz());
  }
  c.grid = grid / static_cast<double>(h.levels.front().size());
  c.op = op / static_cast<double>(h.levels.front().B.nnz());
  c.levels = h.levels.size();
  return c;
}

double triplet_residual(const Level& lev, const TripletSet& t) {
  double total = 0.0;
  for (Index k = 0; k < t.size(); ++k) {
    Vector a = spmv(lev.B, t.V[k]);
    axpy(-t.sigmas[k], spmv(lev.M, t.U[k]), a);
    Vector b = spmv_transpose(lev.B, t.U[k]);
    axpy(-t.sigmas[k], spmv(lev.N, t.V[k]), b);
    total += norm2(a) + norm2(b);
  }
  return total;
}

void export_hierarchy(const Hierarchy& h, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nlohmann::ordered_json manifest;
  const Complexities c = complexities(h);
  manifest["levels"] = nlohmann::ordered_json::array();
  for (Index l = 0; l < h.size(); ++l) {
    const Level& lev = h.levels[l];
    const std::string stem = "level_" + std::to_string(l);
    write_matrix_market(dir / (stem + "_B.mtx"), lev.B);
    nlohmann::ordered_json entry;
    entry["level"] = l;
    entry["n"] = lev.size();
    entry["nnz"] = lev.B.nnz();
    entry["B"] = stem + "_B.mtx";
    if (lev.P.rows() > 0) {
      write_matrix_market(dir / (stem + "_P.mtx"), lev.P);
      write_matrix_market(dir / (stem + "_Q.mtx"), lev.Q);
      entry["P"] = stem + "_P.mtx";
      entry["Q"] = stem + "_Q.mtx";
      entry["coarse"] = lev.split.coarse;
    }
    manifest["levels"].push_back(entry);
  }
  manifest["grid_complexity"] = c.grid;
  manifest["operator_complexity"] = c.op;
  std::ofstream out(dir / "hierarchy.json");
  if (!out) throw IoError("cannot write " + (dir / "hierarchy.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace bamg
