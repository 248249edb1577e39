#include "bamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bamg {

namespace {

std::string shape_str(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

SparseMatrix::SparseMatrix(Index nrows, Index ncols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, Vector values)
    : nrows_(nrows), ncols_(ncols) {
  if (row_offsets.size() != nrows + 1 || row_offsets.front() != 0 ||
      row_offsets.back() != col_indices.size() || col_indices.size() != values.size()) {
    throw DimensionError("SparseMatrix: inconsistent CSR arrays");
  }
  row_offsets_.assign(nrows + 1, 0);
  col_indices_.reserve(col_indices.size());
  values_.reserve(values.size());
  for (Index i = 0; i < nrows; ++i) {
    if (row_offsets[i + 1] < row_offsets[i]) {
      throw DimensionError("SparseMatrix: row offsets must be nondecreasing");
    }
    Index prev = 0;
    for (Index k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      const Index j = col_indices[k];
      if (j >= ncols || (k > row_offsets[i] && j <= prev)) {
        throw DimensionError("SparseMatrix: column indices must be increasing and in range (row " +
                             std::to_string(i) + ")");
      }
      prev = j;
      if (std::abs(values[k]) >= kStructuralZero) {
        col_indices_.push_back(j);
        values_.push_back(values[k]);
      }
    }
    row_offsets_[i + 1] = col_indices_.size();
  }
}

SparseMatrix SparseMatrix::from_triplets(Index nrows, Index ncols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= nrows || t.col >= ncols) {
      throw DimensionError("from_triplets: entry out of range for " + shape_str(nrows, ncols));
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> offsets(nrows + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  cols.reserve(entries.size());
  vals.reserve(entries.size());
  for (Index k = 0; k < entries.size();) {
    Index e = k;
    double sum = 0.0;
    while (e < entries.size() && entries[e].row == entries[k].row &&
           entries[e].col == entries[k].col) {
      sum += entries[e].value;
      ++e;
    }
    cols.push_back(entries[k].col);
    vals.push_back(sum);
    ++offsets[entries[k].row + 1];
    k = e;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(Index n) {
  Vector ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const Index n = d.size();
  std::vector<Index> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), Index{0});
  std::vector<Index> cols(n);
  std::iota(cols.begin(), cols.end(), Index{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), Vector(d.begin(), d.end()));
}

double SparseMatrix::at(Index i, Index j) const {
  const auto c = row_cols(i);
  const auto it = std::lower_bound(c.begin(), c.end(), j);
  if (it == c.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<Index>(it - c.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(nrows_, ncols_), 0.0);
  for (Index i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (Index i = 0; i < nrows_; ++i) {
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out.push_back({i, col_indices_[k], values_[k]});
    }
  }
  return out;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::norm_inf() const {
  double m = 0.0;
  for (Index i = 0; i < nrows_; ++i) {
    double s = 0.0;
    for (double v : row_values(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

void spmv(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
  if (m.cols() != x.size() || m.rows() != y.size()) {
    throw DimensionError("spmv: matrix " + shape_str(m.rows(), m.cols()) + " with vector of length " +
                         std::to_string(x.size()));
  }
  const auto off = m.row_offsets();
  const auto col = m.col_indices();
  const auto val = m.values();
  for (Index i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

Vector spmv(const SparseMatrix& m, std::span<const double> x) {
  Vector y(m.rows());
  spmv(m, x, y);
  return y;
}

Vector spmv_transpose(const SparseMatrix& m, std::span<const double> x) {
  if (m.rows() != x.size()) {
    throw DimensionError("spmv_transpose: matrix " + shape_str(m.rows(), m.cols()) +
                         " with vector of length " + std::to_string(x.size()));
  }
  Vector y(m.cols(), 0.0);
  const auto off = m.row_offsets();
  const auto col = m.col_indices();
  const auto val = m.values();
  for (Index i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    for (Index k = off[i]; k < off[i + 1]; ++k) y[col[k]] += val[k] * xi;
  }
  return y;
}

SparseMatrix transpose(const SparseMatrix& m) {
  std::vector<Index> offsets(m.cols() + 1, 0);
  for (Index j : m.col_indices()) ++offsets[j + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> next(offsets.begin(), offsets.end() - 1);
  std::vector<Index> cols(m.nnz());
  Vector vals(m.nnz());
  for (Index i = 0; i < m.rows(); ++i) {
    const auto c = m.row_cols(i);
    const auto v = m.row_values(i);
    for (Index k = 0; k < c.size(); ++k) {
      const Index dst = next[c[k]]++;
      cols[dst] = i;
      vals[dst] = v[k];
    }
  }
  return SparseMatrix(m.cols(), m.rows(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: shapes " + shape_str(a.rows(), a.cols()) + " and " +
                         shape_str(b.rows(), b.cols()));
  }
  std::vector<Index> offsets(a.rows() + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  cols.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.rows(); ++i) {
    const auto ca = a.row_cols(i);
    const auto va = a.row_values(i);
    const auto cb = b.row_cols(i);
    const auto vb = b.row_values(i);
    Index p = 0, q = 0;
    while (p < ca.size() || q < cb.size()) {
      double v;
      Index j;
      if (q == cb.size() || (p < ca.size() && ca[p] < cb[q])) {
        j = ca[p];
        v = alpha * va[p++];
      } else if (p == ca.size() || cb[q] < ca[p]) {
        j = cb[q];
        v = beta * vb[q++];
      } else {
        j = ca[p];
        v = alpha * va[p++] + beta * vb[q++];
      }
      cols.push_back(j);
      vals.push_back(v);
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b, double drop_tol) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: shapes " + shape_str(a.rows(), a.cols()) + " and " +
                         shape_str(b.rows(), b.cols()));
  }
  const Index n = b.cols();
  std::vector<Index> offsets(a.rows() + 1, 0);
  std::vector<Index> cols;
  Vector vals;
  // Gustavson with a dense accumulator; each output row is sorted before
  // accumulation so the summation order is fixed by column index.
  Vector acc(n, 0.0);
  std::vector<char> used(n, 0);
  std::vector<Index> pattern;
  for (Index i = 0; i < a.rows(); ++i) {
    pattern.clear();
    const auto ca = a.row_cols(i);
    for (Index k : ca) {
      for (Index j : b.row_cols(k)) {
        if (!used[j]) {
          used[j] = 1;
          pattern.push_back(j);
        }
      }
    }
    std::sort(pattern.begin(), pattern.end());
    const auto va = a.row_values(i);
    for (Index t = 0; t < ca.size(); ++t) {
      const auto cb = b.row_cols(ca[t]);
      const auto vb = b.row_values(ca[t]);
      for (Index s = 0; s < cb.size(); ++s) acc[cb[s]] += va[t] * vb[s];
    }
    for (Index j : pattern) {
      const double v = acc[j];
      if (!(drop_tol > 0.0 && std::abs(v) <= drop_tol)) {
        cols.push_back(j);
        vals.push_back(v);
      }
      acc[j] = 0.0;
      used[j] = 0;
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(a.rows(), n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix triple_product(const SparseMatrix& q, const SparseMatrix& b, const SparseMatrix& p,
                            double drop_tol) {
  if (q.cols() != b.rows() || b.cols() != p.rows()) {
    throw DimensionError("triple_product: shapes " + shape_str(q.rows(), q.cols()) + ", " +
                         shape_str(b.rows(), b.cols()) + ", " + shape_str(p.rows(), p.cols()));
  }
  return multiply(multiply(q, b), p, drop_tol);
}

Adjacency::Adjacency(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("Adjacency: matrix must be square");
  const Index n = m.rows();
  std::vector<std::vector<Index>> adj(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j : m.row_cols(i)) {
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  offsets_.assign(n + 1, 0);
  for (Index i = 0; i < n; ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    offsets_[i + 1] = offsets_[i] + a.size();
  }
  targets_.reserve(offsets_.back());
  for (const auto& a : adj) targets_.insert(targets_.end(), a.begin(), a.end());
}

std::vector<Index> Adjacency::neighborhood(Index i, Index radius) const {
  std::vector<Index> frontier{i};
  std::vector<Index> seen{i};
  for (Index step = 0; step < radius; ++step) {
    std::vector<Index> next;
    for (Index u : frontier) {
      for (Index v : neighbors(u)) {
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
          seen.push_back(v);
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  seen.erase(seen.begin());
  std::sort(seen.begin(), seen.end());
  return seen;
}

std::vector<Index> neighborhood(const SparseMatrix& m, Index i, Index radius) {
  if (i >= m.rows()) throw DimensionError("neighborhood: index out of range");
  return Adjacency(m).neighborhood(i, radius);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  double scale_v = 0.0;
  for (double v : a) scale_v = std::max(scale_v, std::abs(v));
  if (scale_v == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) {
    const double t = v / scale_v;
    s += t * t;
  }
  return scale_v * std::sqrt(s);
}

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

double norm_inf(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (Index i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double alpha) {
  for (double& v : x) v *= alpha;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace bamg
