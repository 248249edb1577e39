/// @file sparse.hpp
/// @brief Compressed sparse row matrices and the vector kernels built on them.

#ifndef BAMG_SPARSE_HPP
#define BAMG_SPARSE_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bamg {

using Index = std::size_t;
using Vector = std::vector<double>;

/// Raised when operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a valid result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Entries with magnitude below this are treated as structural zeros.
inline constexpr double kStructuralZero = 1e-300;

/// Immutable CSR matrix. Column indices are strictly increasing within a row
/// and explicit zeros are never stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Takes ownership of CSR arrays. Validates the layout and drops stored
  /// entries below kStructuralZero.
  SparseMatrix(Index nrows, Index ncols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, Vector values);

  /// Builds from unordered coordinates; duplicates are summed.
  static SparseMatrix from_triplets(Index nrows, Index ncols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> d);

  Index rows() const { return nrows_; }
  Index cols() const { return ncols_; }
  Index nnz() const { return values_.size(); }

  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_cols(Index i) const {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  /// Entry (i, j), zero when not stored.
  double at(Index i, Index j) const;
  Vector diagonal() const;
  std::vector<Triplet> to_triplets() const;

  double max_abs() const;
  /// Maximum absolute row sum.
  double norm_inf() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  Vector values_;
};

/// y = M x with ascending-column summation per row.
Vector spmv(const SparseMatrix& m, std::span<const double> x);
void spmv(const SparseMatrix& m, std::span<const double> x, std::span<double> y);

/// y = M^T x without forming the transpose.
Vector spmv_transpose(const SparseMatrix& m, std::span<const double> x);

SparseMatrix transpose(const SparseMatrix& m);

/// alpha*A + beta*B for equally shaped operands.
SparseMatrix add(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta);

/// Sparse product A*B. Entries with |value| <= drop_tol are removed when
/// drop_tol > 0.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b, double drop_tol = 0.0);

/// Petrov-Galerkin product Q*B*P.
SparseMatrix triple_product(const SparseMatrix& q, const SparseMatrix& b,
                            const SparseMatrix& p, double drop_tol = 0.0);

/// Undirected adjacency of the pattern of M + M^T, diagonal excluded.
class Adjacency {
 public:
  explicit Adjacency(const SparseMatrix& m);

  Index size() const { return offsets_.size() - 1; }
  std::span<const Index> neighbors(Index i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// Vertices within `radius` steps of i, excluding i, sorted ascending.
  std::vector<Index> neighborhood(Index i, Index radius) const;

 private:
  std::vector<Index> offsets_;
  std::vector<Index> targets_;
};

/// Indices reachable from i within radius steps in the graph of M + M^T.
std::vector<Index> neighborhood(const SparseMatrix& m, Index i, Index radius);

// Dense vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm1(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);
bool all_finite(std::span<const double> x);

// Matrix Market coordinate format, general real, 1-based indices.
SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

}  // namespace bamg

#endif  // BAMG_SPARSE_HPP
