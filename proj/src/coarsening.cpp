#include "bamg/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bamg/relaxation.hpp"
#include "bamg/rng.hpp"

namespace bamg {

CfSplitting CfSplitting::from_flags(const std::vector<bool>& is_coarse) {
  CfSplitting s;
  s.coarse_rank.assign(is_coarse.size(), kNotCoarse);
  for (Index i = 0; i < is_coarse.size(); ++i) {
    if (is_coarse[i]) {
      s.coarse_rank[i] = s.coarse.size();
      s.coarse.push_back(i);
    } else {
      s.fine.push_back(i);
    }
  }
  return s;
}

void CfSplitting::validate() const {
  const Index n = coarse_rank.size();
  if (coarse.empty()) throw std::logic_error("splitting has no coarse point");
  if (coarse.size() + fine.size() != n) throw std::logic_error("splitting sizes do not add up");
  std::vector<int> seen(n, 0);
  for (Index k = 0; k < coarse.size(); ++k) {
    const Index i = coarse[k];
    if (i >= n || coarse_rank[i] != k || (k > 0 && coarse[k - 1] >= i)) {
      throw std::logic_error("coarse set is inconsistent");
    }
    ++seen[i];
  }
  for (Index k = 0; k < fine.size(); ++k) {
    const Index i = fine[k];
    if (i >= n || coarse_rank[i] != kNotCoarse || (k > 0 && fine[k - 1] >= i)) {
      throw std::logic_error("fine set is inconsistent");
    }
    ++seen[i];
  }
  for (int c : seen) {
    if (c != 1) throw std::logic_error("splitting does not cover every point exactly once");
  }
}

std::string to_string(CoarseningMode m) {
  switch (m) {
    case CoarseningMode::Geometric1D: return "geometric1d";
    case CoarseningMode::Geometric2D: return "geometric2d";
    case CoarseningMode::CompatibleRelaxation: return "cr";
  }
  return "cr";
}

CoarseningMode coarsening_mode_from_string(const std::string& s) {
  if (s == "geometric1d") return CoarseningMode::Geometric1D;
  if (s == "geometric2d") return CoarseningMode::Geometric2D;
  if (s == "cr") return CoarseningMode::CompatibleRelaxation;
  throw std::invalid_argument("unknown coarsening mode '" + s + "'");
}

void CoarseningConfig::validate() const {
  if (stop_size < 2) throw std::invalid_argument("coarsening: stop_size must be at least 2");
  if (!(cr_threshold > 0.0 && cr_threshold < 1.0)) {
    throw std::invalid_argument("coarsening: cr_threshold must lie in (0, 1)");
  }
  if (!(cr_omega > 0.0 && cr_omega <= 1.0)) throw std::invalid_argument("coarsening: cr_omega must lie in (0, 1]");
  if (cr_sweeps < 2) throw std::invalid_argument("coarsening: cr_sweeps must be at least 2");
  if (max_levels < 1) throw std::invalid_argument("coarsening: max_levels must be at least 1");
  if (!(stall_ratio > 0.0 && stall_ratio <= 1.0)) {
    throw std::invalid_argument("coarsening: stall_ratio must lie in (0, 1]");
  }
}

namespace {

long long lattice_coordinate(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) throw std::invalid_argument("geometric coarsening needs integral coordinates");
  return static_cast<long long>(r);
}

bool even(long long v) { return v % 2 == 0; }

}  // namespace

CfSplitting geometric_coarsen(const Coordinates& geometry, CoarseningMode mode) {
  if (mode == CoarseningMode::CompatibleRelaxation) {
    throw std::invalid_argument("geometric_coarsen: mode must be geometric");
  }
  if (geometry.empty()) throw std::invalid_argument("geometric_coarsen: geometry is missing");
  std::vector<bool> flags(geometry.size());
  for (Index i = 0; i < geometry.size(); ++i) {
    const bool cx = even(lattice_coordinate(geometry[i][0]));
    const bool cy = mode == CoarseningMode::Geometric1D || even(lattice_coordinate(geometry[i][1]));
    flags[i] = cx && cy;
  }
  auto split = CfSplitting::from_flags(flags);
  if (split.coarse.empty()) throw std::invalid_argument("geometric_coarsen: no even lattice point");
  return split;
}

Coordinates coarse_geometry(const Coordinates& geometry, const CfSplitting& split) {
  if (geometry.size() != split.size()) throw DimensionError("coarse_geometry: size mismatch");
  Coordinates out;
  out.reserve(split.coarse.size());
  for (Index i : split.coarse) out.push_back({geometry[i][0] / 2.0, geometry[i][1] / 2.0});
  return out;
}

namespace {

/// Slowness of every point under F-relaxation with the current C frozen.
/// Coarse points report zero.
Vector relaxation_slowness(const SparseMatrix& b, const std::vector<bool>& is_coarse, const Vector& inv_diag,
                           const CoarseningConfig& cfg, std::uint64_t seed) {
  const Index n = b.rows();
  Rng rng(seed);
  Vector x = rng.vector(n);
  for (Index i = 0; i < n; ++i) {
    if (is_coarse[i]) x[i] = 0.0;
  }
  Vector prev(n);
  Vector bx(n);
  for (Index s = 0; s < cfg.cr_sweeps; ++s) {
    prev = x;
    spmv(b, prev, bx);
    for (Index i = 0; i < n; ++i) {
      if (!is_coarse[i]) x[i] = prev[i] - cfg.cr_omega * inv_diag[i] * bx[i];
    }
  }
  const double scale = std::max(norm_inf(prev), std::numeric_limits<double>::min());
  Vector mu(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    if (is_coarse[i]) continue;
    if (inv_diag[i] == 0.0) {
      mu[i] = 1.0;
    } else if (std::abs(prev[i]) > 1e-14 * scale) {
      mu[i] = std::abs(x[i]) / std::abs(prev[i]);
    }
  }
  return mu;
}

}  // namespace

CfSplitting cr_coarsen(const SparseMatrix& b, const CoarseningConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (b.rows() != b.cols()) throw DimensionError("cr_coarsen: matrix must be square");
  const Index n = b.rows();
  if (n == 0) throw std::invalid_argument("cr_coarsen: empty matrix");
  Vector inv_diag(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    const auto vals = b.row_values(i);
    if (vals.empty()) throw std::invalid_argument("cr_coarsen: row " + std::to_string(i) + " is zero");
    double rowmax = 0.0;
    for (double v : vals) rowmax = std::max(rowmax, std::abs(v));
    const double d = b.at(i, i);
    if (std::abs(d) > kTinyDiagonal * rowmax) inv_diag[i] = 1.0 / d;
  }
  const Adjacency graph(b);
  std::vector<bool> is_coarse(n, false);
  bool any_coarse = false;
  for (Index pass = 0; pass < cfg.cr_max_passes; ++pass) {
    const Vector mu = relaxation_slowness(b, is_coarse, inv_diag, cfg, mix_seed(seed, pass));
    std::vector<Index> candidates;
    for (Index i = 0; i < n; ++i) {
      if (!is_coarse[i] && mu[i] > cfg.cr_threshold) candidates.push_back(i);
    }
    if (candidates.empty()) {
      if (!any_coarse) {
        const Index best = static_cast<Index>(std::max_element(mu.begin(), mu.end()) - mu.begin());
        is_coarse[best] = true;
      }
      break;
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](Index a, Index c) { return mu[a] > mu[c]; });
    std::vector<bool> is_candidate(n, false);
    for (Index i : candidates) is_candidate[i] = true;
    std::vector<bool> blocked(n, false);
    for (Index i : candidates) {
      if (blocked[i]) continue;
      is_coarse[i] = true;
      any_coarse = true;
      for (Index j : graph.neighbors(i)) {
        if (is_candidate[j]) blocked[j] = true;
      }
    }
  }
  return CfSplitting::from_flags(is_coarse);
}

}  // namespace bamg
