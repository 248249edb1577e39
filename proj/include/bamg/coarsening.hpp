/// @file coarsening.hpp
/// @brief C/F splittings: geometric selection on lattices and compatible
/// relaxation for unstructured chains.

#ifndef BAMG_COARSENING_HPP
#define BAMG_COARSENING_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bamg/chains.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

inline constexpr Index kNotCoarse = std::numeric_limits<Index>::max();

/// Partition of {0, ..., n-1} into coarse and fine points.
struct CfSplitting {
  std::vector<Index> coarse;       ///< ascending
  std::vector<Index> fine;         ///< ascending
  std::vector<Index> coarse_rank;  ///< length n; kNotCoarse on fine points

  /// Builds the splitting from a per-point coarse flag.
  static CfSplitting from_flags(const std::vector<bool>& is_coarse);

  Index size() const { return coarse_rank.size(); }
  Index coarse_size() const { return coarse.size(); }
  bool is_coarse(Index i) const { return coarse_rank[i] != kNotCoarse; }

  /// Throws std::logic_error when the index sets do not partition 0..n-1.
  void validate() const;
};

enum class CoarseningMode { Geometric1D, Geometric2D, CompatibleRelaxation };

std::string to_string(CoarseningMode m);
CoarseningMode coarsening_mode_from_string(const std::string& s);

struct CoarseningConfig {
  CoarseningMode mode = CoarseningMode::Geometric1D;
  /// A level with fewer points than this is the coarsest.
  Index stop_size = 30;
  Index cr_sweeps = 5;
  double cr_threshold = 0.7;
  double cr_omega = 0.7;
  Index cr_max_passes = 20;
  Index max_levels = 20;
  /// Coarsening stalls when n_c exceeds this fraction of n.
  double stall_ratio = 0.9;

  void validate() const;
};

/// Every other lattice point per axis is coarse. Coordinates must be
/// integral; 1D uses the first coordinate only.
CfSplitting geometric_coarsen(const Coordinates& geometry, CoarseningMode mode);

/// Coordinates of the coarse points, halved so the coarse lattice is again
/// integral.
Coordinates coarse_geometry(const Coordinates& geometry, const CfSplitting& split);

/// Compatible relaxation: F-point Jacobi on B x = 0 with C frozen at zero,
/// slow points become candidates, and a greedy maximal independent set of
/// candidates joins C. Repeats until no candidate remains or after
/// cfg.cr_max_passes passes.
CfSplitting cr_coarsen(const SparseMatrix& b, const CoarseningConfig& cfg, std::uint64_t seed);

}  // namespace bamg

#endif  // BAMG_COARSENING_HPP
