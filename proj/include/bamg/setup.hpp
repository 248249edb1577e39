/// @file setup.hpp
/// @brief Bootstrap setup: multilevel hierarchy of Petrov-Galerkin operators
/// built from approximate generalized singular triplets.

#ifndef BAMG_SETUP_HPP
#define BAMG_SETUP_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "bamg/chains.hpp"
#include "bamg/coarsening.hpp"
#include "bamg/interpolation.hpp"
#include "bamg/relaxation.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

struct Level {
  SparseMatrix B;
  SparseMatrix M;  ///< accumulated restriction mass, identity on level 0
  SparseMatrix N;  ///< accumulated interpolation mass, identity on level 0
  SparseMatrix P;  ///< empty on the coarsest level
  SparseMatrix Q;  ///< empty on the coarsest level
  CfSplitting split;
  std::optional<Coordinates> geometry;

  Index size() const { return B.rows(); }
};

struct Hierarchy {
  std::vector<Level> levels;

  Index size() const { return levels.size(); }
  const Level& coarsest() const { return levels.back(); }
};

/// Approximate generalized singular triplets (sigma_k, u_k, v_k) on one
/// level. Slot 0 holds the constant left vector.
struct TripletSet {
  Vector sigmas;
  std::vector<Vector> U;
  std::vector<Vector> V;

  Index size() const { return sigmas.size(); }
};

struct SetupConfig {
  Index r = 8;
  Index setup_cycles = 1;
  Index inner_mu = 1;
  SmootherConfig smoother;
  InterpConfig interp;
  CoarseningConfig coarsening;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Generalized Rayleigh quotient u^T B v / sqrt(u^T M u * v^T N v). Returns
/// `previous` when either norm factor is below 1e-15.
double rayleigh_sigma(std::span<const double> u, std::span<const double> v, const SparseMatrix& b,
                      const SparseMatrix& m, const SparseMatrix& n, double previous = 0.0);

/// r random vectors smoothed on B x = 0 (right) and B^T x = 0 (left); left
/// slot 0 is the normalized constant.
TripletSet init_test_vectors(const SparseMatrix& b, const SetupConfig& cfg);

/// The r smallest generalized singular triplets of B against the masses M
/// (left) and N (right), from the symmetric 2n embedding. u is M-normalized
/// and v N-normalized. The zero triplet, when present, comes first.
TripletSet coarsest_triplets(const SparseMatrix& b, const SparseMatrix& m, const SparseMatrix& n, Index r);

/// One setup cycle from level `l` down, rebuilding the hierarchy below l and
/// returning improved triplets on level l. `hierarchy.levels[l]` must hold
/// B, M, N and geometry on entry.
TripletSet bamg_mle(Hierarchy& hierarchy, Index l, TripletSet tests, const SetupConfig& cfg, bool first_cycle);

struct SetupResult {
  Hierarchy hierarchy;
  TripletSet triplets;
  /// Right vector of the smallest sigma, sign-fixed, unit 1-norm.
  Vector x0;
};

SetupResult run_setup(const ChainProblem& problem, const SetupConfig& cfg);

struct Complexities {
  double grid = 1.0;
  double op = 1.0;
  Index levels = 1;
};

Complexities complexities(const Hierarchy& h);

/// Flips x so its entry of largest magnitude is positive and scales to unit
/// 1-norm.
void normalize_probability(Vector& x);

/// Sum over triplets of ||B v - sigma M u|| + ||B^T u - sigma N v||.
double triplet_residual(const Level& level, const TripletSet& t);

/// Writes level_<l>_{B,P,Q}.mtx and hierarchy.json into `dir`.
void export_hierarchy(const Hierarchy& h, const std::filesystem::path& dir);

}  // namespace bamg

#endif  // BAMG_SETUP_HPP
