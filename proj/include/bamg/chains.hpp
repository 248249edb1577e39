/// @file chains.hpp
/// @brief Benchmark Markov chains, Petri-net reachability chains and
/// import/validation of external transition matrices.
///
/// Every chain is stored column-stochastic: A(i, j) is the probability of
/// moving from state j to state i, so the steady state solves A x = x.

#ifndef BAMG_CHAINS_HPP
#define BAMG_CHAINS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bamg/sparse.hpp"

namespace bamg {

enum class ChainFamily { BirthDeath, Uniform2D, TandemQueue, RandomPlanar, PetriNet, Imported };

std::string to_string(ChainFamily f);
/// Accepts the CLI spellings: birth-death, uniform2d, tandem, planar, petri, imported.
ChainFamily family_from_string(const std::string& s);

using Coordinates = std::vector<std::array<double, 2>>;

struct ChainProblem {
  SparseMatrix A;
  SparseMatrix B;  ///< I - A
  Index n = 0;
  ChainFamily family = ChainFamily::Imported;
  std::map<std::string, double> params;
  std::optional<Coordinates> geometry;
  std::uint64_t seed = 0;
};

/// Raised when a matrix is not a valid irreducible column-stochastic chain.
class ChainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Validates A (nonnegative, unit column sums within tol, strongly
/// connected) and fills B = I - A.
ChainProblem make_chain(SparseMatrix a, ChainFamily family, std::map<std::string, double> params = {},
                        std::optional<Coordinates> geometry = std::nullopt, std::uint64_t seed = 0,
                        double column_tol = 1e-14);

/// Strongly connected components of the transition graph (edge j -> i when
/// A(i, j) != 0). Component ids are assigned in order of completion.
std::vector<Index> strong_components(const SparseMatrix& a, Index* count = nullptr);

/// Transition rule of the birth-death chain.
enum class BirthDeathForm {
  /// Birth rate 1, death rate mu: right with 1/(1+mu), left with mu/(1+mu).
  /// Stationary entries grow geometrically by 1/mu from left to right.
  RateRatio,
  /// Right with probability mu, left with 1 - mu.
  Direct,
};

/// Path chain with reflecting ends; blocked moves at either end become
/// self-loops so B stays tridiagonal.
ChainProblem birth_death(Index n, double mu, BirthDeathForm form = BirthDeathForm::RateRatio);

/// Random walk on the side x side 4-neighbor lattice.
ChainProblem uniform_2d(Index side);

/// Embedded two-station tandem queue on queue lengths (i, j) < side.
/// Blocked transitions become self-loops.
ChainProblem tandem_queue(Index side, double lambda, double mu1, double mu2);

/// Random walk on the Delaunay triangulation of n uniform points.
ChainProblem random_planar(Index n, std::uint64_t seed);

/// Delaunay edges (i < j, sorted) of a point set via Bowyer-Watson.
std::vector<std::pair<Index, Index>> delaunay_edges(const Coordinates& points);

struct PetriArc {
  Index place = 0;
  unsigned multiplicity = 1;
};

struct PetriTransition {
  std::vector<PetriArc> inputs;
  std::vector<PetriArc> outputs;
  double weight = 1.0;
};

struct PetriNetSpec {
  Index places = 0;
  std::vector<PetriTransition> transitions;
  std::vector<unsigned> initial_marking;
};

/// Five places, five transitions; all tokens start in place 0.
PetriNetSpec molloy_net(unsigned tokens, std::array<double, 5> weights = {1, 1, 1, 1, 1});

PetriNetSpec read_petri_spec(const std::filesystem::path& path);
void write_petri_spec(const std::filesystem::path& path, const PetriNetSpec& spec);

/// Breadth-first reachability chain. State order is discovery order.
ChainProblem petri_reachability(const PetriNetSpec& spec, Index state_cap = 1000000);

/// Reads A or B from Matrix Market; B is recognized by zero column sums.
ChainProblem import_chain(const std::filesystem::path& path);

}  // namespace bamg

#endif  // BAMG_CHAINS_HPP
