/// @file presets.hpp
/// @brief Per-family chain generation and default solver bundles.

#ifndef BAMG_PRESETS_HPP
#define BAMG_PRESETS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>

#include "bamg/chains.hpp"
#include "bamg/krylov.hpp"

namespace bamg {

struct GenerateParams {
  /// Number of states; a perfect square for the lattice families.
  Index n = 0;
  double mu = 0.96;
  std::uint64_t seed = 0;
  /// Molloy token count; 0 derives it from n.
  unsigned tokens = 0;
  double lambda = 11.0 / 31.0;
  double mu1 = 10.0 / 31.0;
  double mu2 = 10.0 / 31.0;
  std::optional<std::filesystem::path> petri_spec;
  std::optional<std::filesystem::path> import_path;
};

ChainProblem generate_chain(ChainFamily family, const GenerateParams& p);

/// Reachable markings of the Molloy net with K tokens.
Index molloy_state_count(unsigned tokens);
/// Token count whose Molloy net has exactly n markings.
std::optional<unsigned> molloy_tokens_for_states(Index n);

/// Lattice coordinates used by the geometric families; none for the others.
std::optional<Coordinates> family_geometry(ChainFamily family, Index n);

/// Caliber, smoothing, test count, coarsest size and coarsening per family.
SolveOptions default_options(ChainFamily family);

}  // namespace bamg

#endif  // BAMG_PRESETS_HPP
