#include "bamg/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace bamg {

namespace {

Index lattice_side(Index n) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side * side != n || side < 2) {
    throw std::invalid_argument("lattice chains need n to be a square of at least 4, got " + std::to_string(n));
  }
  return side;
}

}  // namespace

Index molloy_state_count(unsigned tokens) {
  const Index k = tokens;
  return (k + 1) * (k + 2) * (2 * k + 3) / 6;
}

std::optional<unsigned> molloy_tokens_for_states(Index n) {
  for (unsigned k = 1; molloy_state_count(k) <= n; ++k) {
    if (molloy_state_count(k) == n) return k;
  }
  return std::nullopt;
}

ChainProblem generate_chain(ChainFamily family, const GenerateParams& p) {
  switch (family) {
    case ChainFamily::BirthDeath:
      return birth_death(p.n, p.mu);
    case ChainFamily::Uniform2D:
      return uniform_2d(lattice_side(p.n));
    case ChainFamily::TandemQueue:
      return tandem_queue(lattice_side(p.n), p.lambda, p.mu1, p.mu2);
    case ChainFamily::RandomPlanar:
      return random_planar(p.n, p.seed);
    case ChainFamily::PetriNet: {
      if (p.petri_spec) return petri_reachability(read_petri_spec(*p.petri_spec));
      unsigned tokens = p.tokens;
      if (tokens == 0) {
        const auto k = molloy_tokens_for_states(p.n);
        if (!k) throw std::invalid_argument("no Molloy net has " + std::to_string(p.n) + " states; pass --tokens");
        tokens = *k;
      }
      return petri_reachability(molloy_net(tokens));
    }
    case ChainFamily::Imported:
      if (!p.import_path) throw std::invalid_argument("imported chains need a Matrix Market path");
      return import_chain(*p.import_path);
  }
  throw std::invalid_argument("unknown chain family");
}

std::optional<Coordinates> family_geometry(ChainFamily family, Index n) {
  switch (family) {
    case ChainFamily::BirthDeath: {
      Coordinates geo(n);
      for (Index i = 0; i < n; ++i) geo[i] = {static_cast<double>(i), 0.0};
      return geo;
    }
    case ChainFamily::Uniform2D:
    case ChainFamily::TandemQueue: {
      const Index side = lattice_side(n);
      Coordinates geo(n);
      for (Index y = 0; y < side; ++y) {
        for (Index x = 0; x < side; ++x) geo[y * side + x] = {static_cast<double>(x), static_cast<double>(y)};
      }
      return geo;
    }
    default:
      return std::nullopt;
  }
}

SolveOptions default_options(ChainFamily family) {
  SolveOptions o;
  auto& s = o.setup;
  s.seed = 1;
  s.inner_mu = 2;
  s.interp.search_radius = 1;
  switch (family) {
    case ChainFamily::BirthDeath:
      s.interp.caliber = 2;
      s.smoother.sweeps_pre = s.smoother.sweeps_post = 3;
      s.r = 8;
      s.coarsening.stop_size = 30;
      s.coarsening.mode = CoarseningMode::Geometric1D;
      break;
    case ChainFamily::Uniform2D:
    case ChainFamily::TandemQueue:
      s.interp.caliber = 4;
      s.smoother.sweeps_pre = s.smoother.sweeps_post = 3;
      s.r = 8;
      s.coarsening.stop_size = 17 * 17 + 1;
      s.coarsening.mode = CoarseningMode::Geometric2D;
      break;
    case ChainFamily::RandomPlanar:
      s.interp.caliber = 3;
      s.smoother.sweeps_pre = s.smoother.sweeps_post = 5;
      s.r = 8;
      s.coarsening.stop_size = 500;
      s.coarsening.mode = CoarseningMode::CompatibleRelaxation;
      s.coarsening.cr_max_passes = 1;
      break;
    case ChainFamily::PetriNet:
      s.interp.caliber = 3;
      s.smoother.sweeps_pre = s.smoother.sweeps_post = 5;
      s.r = 10;
      s.coarsening.stop_size = 500;
      s.coarsening.mode = CoarseningMode::CompatibleRelaxation;
      s.coarsening.cr_max_passes = 1;
      break;
    case ChainFamily::Imported:
      s.interp.caliber = 3;
      s.smoother.sweeps_pre = s.smoother.sweeps_post = 3;
      s.r = 8;
      s.coarsening.stop_size = 100;
      s.coarsening.mode = CoarseningMode::CompatibleRelaxation;
      s.coarsening.cr_max_passes = 1;
      break;
  }
  return o;
}

}  // namespace bamg
