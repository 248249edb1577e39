#include "bamg/chains.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bamg/rng.hpp"

namespace bamg {

std::string to_string(ChainFamily f) {
  switch (f) {
    case ChainFamily::BirthDeath: return "birth-death";
    case ChainFamily::Uniform2D: return "uniform2d";
    case ChainFamily::TandemQueue: return "tandem";
    case ChainFamily::RandomPlanar: return "planar";
    case ChainFamily::PetriNet: return "petri";
    case ChainFamily::Imported: return "imported";
  }
  return "imported";
}

ChainFamily family_from_string(const std::string& s) {
  if (s == "birth-death") return ChainFamily::BirthDeath;
  if (s == "uniform2d") return ChainFamily::Uniform2D;
  if (s == "tandem") return ChainFamily::TandemQueue;
  if (s == "planar") return ChainFamily::RandomPlanar;
  if (s == "petri") return ChainFamily::PetriNet;
  if (s == "imported") return ChainFamily::Imported;
  throw std::invalid_argument("unknown chain family '" + s + "'");
}

std::vector<Index> strong_components(const SparseMatrix& a, Index* count) {
  // Iterative Tarjan on the graph j -> i for A(i, j) != 0, using A^T rows
  // as adjacency lists.
  const SparseMatrix at = transpose(a);
  const Index n = a.rows();
  constexpr Index unvisited = static_cast<Index>(-1);
  std::vector<Index> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<Index> stack;
  std::vector<bool> on_stack(n, false);
  std::vector<std::pair<Index, Index>> call;  // (vertex, next edge offset)
  Index next_index = 0;
  Index ncomp = 0;
  for (Index root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      const auto nbrs = at.row_cols(v);
      if (pos < nbrs.size()) {
        const Index w = nbrs[pos++];
        if (index[w] == unvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const Index vv = v;
      if (low[vv] == index[vv]) {
        Index w = unvisited;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != vv);
        ++ncomp;
      }
      call.pop_back();
      if (!call.empty()) {
        const Index parent = call.back().first;
        low[parent] = std::min(low[parent], low[vv]);
      }
    }
  }
  if (count) *count = ncomp;
  return comp;
}

namespace {

std::string reducibility_witness(const SparseMatrix& a, const std::vector<Index>& comp, Index ncomp) {
  // A closed class has no edge leaving it.
  std::vector<bool> leaks(ncomp, false);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j : a.row_cols(i)) {
      if (comp[i] != comp[j]) leaks[comp[j]] = true;
    }
  }
  Index closed = 0;
  while (closed < ncomp && leaks[closed]) ++closed;
  std::vector<Index> members;
  for (Index i = 0; i < comp.size(); ++i) {
    if (comp[i] == closed) members.push_back(i);
  }
  std::ostringstream os;
  os << "chain is reducible (" << ncomp << " strongly connected components); states {";
  for (Index k = 0; k < members.size() && k < 10; ++k) os << (k ? ", " : "") << members[k];
  if (members.size() > 10) os << ", ...";
  os << "} (" << members.size() << " of " << a.rows() << ") form a closed class";
  return os.str();
}

}  // namespace

ChainProblem make_chain(SparseMatrix a, ChainFamily family, std::map<std::string, double> params,
                        std::optional<Coordinates> geometry, std::uint64_t seed, double column_tol) {
  if (a.rows() != a.cols()) throw ChainError("transition matrix must be square");
  const Index n = a.rows();
  if (n == 0) throw ChainError("transition matrix is empty");
  for (double v : a.values()) {
    if (!std::isfinite(v) || v < 0.0) throw ChainError("transition matrix has a negative or non-finite entry");
  }
  const Vector sums = spmv_transpose(a, Vector(n, 1.0));
  Index worst = 0;
  for (Index j = 1; j < n; ++j) {
    if (std::abs(sums[j] - 1.0) > std::abs(sums[worst] - 1.0)) worst = j;
  }
  if (std::abs(sums[worst] - 1.0) > column_tol) {
    std::ostringstream os;
    os.precision(17);
    os << "column " << worst << " sums to " << sums[worst] << " (worst deviation from 1)";
    throw ChainError(os.str());
  }
  Index ncomp = 0;
  const auto comp = strong_components(a, &ncomp);
  if (ncomp != 1) throw ChainError(reducibility_witness(a, comp, ncomp));
  if (geometry && geometry->size() != n) throw DimensionError("geometry size differs from chain size");

  ChainProblem p;
  p.B = add(SparseMatrix::identity(n), 1.0, a, -1.0);
  p.A = std::move(a);
  p.n = n;
  p.family = family;
  p.params = std::move(params);
  p.geometry = std::move(geometry);
  p.seed = seed;
  return p;
}

ChainProblem birth_death(Index n, double mu, BirthDeathForm form) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("birth_death: mu must lie in (0, 1)");
  if (n < 2) throw std::invalid_argument("birth_death: n must be at least 2");
  const double right = form == BirthDeathForm::Direct ? mu : 1.0 / (1.0 + mu);
  const double left = form == BirthDeathForm::Direct ? 1.0 - mu : mu / (1.0 + mu);
  std::vector<Triplet> t;
  t.reserve(2 * n);
  for (Index j = 0; j < n; ++j) {
    t.push_back({j + 1 < n ? j + 1 : j, j, right});
    t.push_back({j > 0 ? j - 1 : j, j, left});
  }
  Coordinates geo(n);
  for (Index i = 0; i < n; ++i) geo[i] = {static_cast<double>(i), 0.0};
  return make_chain(SparseMatrix::from_triplets(n, n, std::move(t)), ChainFamily::BirthDeath,
                    {{"mu", mu}, {"n", static_cast<double>(n)}, {"direct", form == BirthDeathForm::Direct ? 1.0 : 0.0}}, std::move(geo));
}

namespace {

Coordinates lattice(Index side) {
  Coordinates geo(side * side);
  for (Index y = 0; y < side; ++y) {
    for (Index x = 0; x < side; ++x) geo[y * side + x] = {static_cast<double>(x), static_cast<double>(y)};
  }
  return geo;
}

}  // namespace

ChainProblem uniform_2d(Index side) {
  if (side < 2) throw std::invalid_argument("uniform_2d: side must be at least 2");
  const Index n = side * side;
  std::vector<Triplet> t;
  t.reserve(4 * n);
  for (Index y = 0; y < side; ++y) {
    for (Index x = 0; x < side; ++x) {
      const Index j = y * side + x;
      std::vector<Index> nb;
      if (y > 0) nb.push_back(j - side);
      if (x > 0) nb.push_back(j - 1);
      if (x + 1 < side) nb.push_back(j + 1);
      if (y + 1 < side) nb.push_back(j + side);
      const double p = 1.0 / static_cast<double>(nb.size());
      for (Index i : nb) t.push_back({i, j, p});
    }
  }
  return make_chain(SparseMatrix::from_triplets(n, n, std::move(t)), ChainFamily::Uniform2D,
                    {{"side", static_cast<double>(side)}}, lattice(side));
}

ChainProblem tandem_queue(Index side, double lambda, double mu1, double mu2) {
  if (side < 2) throw std::invalid_argument("tandem_queue: side must be at least 2");
  if (!(lambda > 0 && mu1 > 0 && mu2 > 0) || std::abs(lambda + mu1 + mu2 - 1.0) > 1e-12) {
    throw std::invalid_argument("tandem_queue: lambda + mu1 + mu2 must equal 1");
  }
  const Index n = side * side;
  const Index cap = side - 1;
  std::vector<Triplet> t;
  t.reserve(4 * n);
  for (Index j2 = 0; j2 < side; ++j2) {
    for (Index i1 = 0; i1 < side; ++i1) {
      const Index from = j2 * side + i1;
      // arrival at station 1
      if (i1 < cap) {
        t.push_back({from + 1, from, lambda});
      } else {
        t.push_back({from, from, lambda});
      }
      // service at station 1 moves a customer to station 2
      if (i1 > 0 && j2 < cap) {
        t.push_back({from - 1 + side, from, mu1});
      } else {
        t.push_back({from, from, mu1});
      }
      // service at station 2
      if (j2 > 0) {
        t.push_back({from - side, from, mu2});
      } else {
        t.push_back({from, from, mu2});
      }
    }
  }
  return make_chain(SparseMatrix::from_triplets(n, n, std::move(t)), ChainFamily::TandemQueue,
                    {{"side", static_cast<double>(side)}, {"lambda", lambda}, {"mu1", mu1}, {"mu2", mu2}},
                    lattice(side));
}

ChainProblem random_planar(Index n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("random_planar: n must be at least 4");
  Rng rng(seed);
  Coordinates pts(n);
  for (auto& p : pts) {
    p[0] = rng.uniform();
    p[1] = rng.uniform();
  }
  for (int attempt = 0; attempt < 3; ++attempt) {
    const auto edges = delaunay_edges(pts);
    std::vector<Index> degree(n, 0);
    for (const auto& [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    std::vector<Triplet> t;
    t.reserve(2 * edges.size());
    bool isolated = false;
    for (Index d : degree) isolated = isolated || d == 0;
    if (!isolated) {
      for (const auto& [a, b] : edges) {
        t.push_back({b, a, 1.0 / static_cast<double>(degree[a])});
        t.push_back({a, b, 1.0 / static_cast<double>(degree[b])});
      }
      auto a = SparseMatrix::from_triplets(n, n, std::move(t));
      Index ncomp = 0;
      strong_components(a, &ncomp);
      if (ncomp == 1) {
        return make_chain(std::move(a), ChainFamily::RandomPlanar, {{"n", static_cast<double>(n)}}, pts, seed);
      }
    }
    for (auto& p : pts) {
      p[0] += 1e-9 * rng.uniform(-1.0, 1.0);
      p[1] += 1e-9 * rng.uniform(-1.0, 1.0);
    }
  }
  throw NumericalError("random_planar: degenerate point set, triangulation is disconnected");
}

ChainProblem import_chain(const std::filesystem::path& path) {
  SparseMatrix m = read_matrix_market(path);
  if (m.rows() != m.cols()) throw ChainError(path.string() + ": matrix must be square");
  const Index n = m.rows();
  const Vector sums = spmv_transpose(m, Vector(n, 1.0));
  const double scale = std::max(m.max_abs(), 1.0);
  bool is_b = true;
  for (double s : sums) is_b = is_b && std::abs(s) <= 1e-12 * scale;
  if (is_b) {
    SparseMatrix a = add(SparseMatrix::identity(n), 1.0, m, -1.0);
    return make_chain(std::move(a), ChainFamily::Imported, {}, std::nullopt, 0, 1e-12);
  }
  return make_chain(std::move(m), ChainFamily::Imported, {}, std::nullopt, 0, 1e-12);
}

}  // namespace bamg
