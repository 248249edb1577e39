/// @file dense.hpp
/// @brief Small dense kernels: symmetric/Hermitian eigensolvers, SVD,
/// pseudoinverse and least-squares solves.
///
/// These back the coarsest level of the hierarchy and the spectral
/// diagnostics. They are written for matrices of a few thousand rows at most.

#ifndef BAMG_DENSE_HPP
#define BAMG_DENSE_HPP

#include <complex>
#include <span>
#include <vector>

#include "bamg/sparse.hpp"

namespace bamg {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Row-major dense matrix.
template <typename T>
class BasicDenseMatrix {
 public:
  BasicDenseMatrix() = default;
  BasicDenseMatrix(Index nrows, Index ncols, T fill = T{})
      : nrows_(nrows), ncols_(ncols), data_(nrows * ncols, fill) {}

  static BasicDenseMatrix identity(Index n) {
    BasicDenseMatrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  Index rows() const { return nrows_; }
  Index cols() const { return ncols_; }

  T& operator()(Index i, Index j) { return data_[i * ncols_ + j]; }
  const T& operator()(Index i, Index j) const { return data_[i * ncols_ + j]; }

  std::span<T> row(Index i) { return {data_.data() + i * ncols_, ncols_}; }
  std::span<const T> row(Index i) const { return {data_.data() + i * ncols_, ncols_}; }

  std::vector<T> column(Index j) const {
    std::vector<T> c(nrows_);
    for (Index i = 0; i < nrows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(Index j, std::span<const T> c) {
    for (Index i = 0; i < nrows_; ++i) (*this)(i, j) = c[i];
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

 private:
  Index nrows_ = 0;
  Index ncols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = BasicDenseMatrix<double>;
using ComplexDenseMatrix = BasicDenseMatrix<Complex>;

/// Eigenvalues ascending; eigenvectors stored as columns.
struct EigenDecomposition {
  Vector eigenvalues;
  DenseMatrix eigenvectors;
};

struct SvdResult {
  DenseMatrix u;  ///< m x k, k = min(m, n)
  Vector s;       ///< descending
  DenseMatrix v;  ///< n x k
};

inline constexpr double kDefaultRankTol = 1e-12;

DenseMatrix densify(const SparseMatrix& m);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);
Vector matvec_transpose(const DenseMatrix& a, std::span<const double> x);
double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

/// Full spectrum of a symmetric matrix (Householder tridiagonalization
/// followed by implicit-shift QL).
EigenDecomposition sym_eig(const DenseMatrix& a);

/// Eigenvalues only, ascending.
Vector sym_eigenvalues(const DenseMatrix& a);

/// Largest eigenpair of a Hermitian matrix, solved through its real
/// 2n x 2n symmetric embedding.
std::pair<double, ComplexVector> herm_eig_max(const ComplexDenseMatrix& a);

/// Lower Cholesky factor of an SPD matrix. Throws NumericalError naming
/// the first nonpositive pivot.
DenseMatrix cholesky(const DenseMatrix& m);

/// Solves A v = lambda M v with M SPD. Eigenvectors are M-orthonormal.
EigenDecomposition gen_sym_eig(const DenseMatrix& a, const DenseMatrix& m);

/// Thin SVD (Householder bidiagonalization + implicit-shift QR).
SvdResult svd(const DenseMatrix& a);

/// A^+ b through the SVD; singular values below rank_tol * sigma_max are
/// treated as zero.
Vector pinv_solve(const DenseMatrix& a, std::span<const double> b, double rank_tol = kDefaultRankTol);

/// Explicit pseudoinverse with the same rank rule.
DenseMatrix pinv(const DenseMatrix& a, double rank_tol = kDefaultRankTol);

/// Least-squares minimizer of ||A x - b|| via Householder QR; falls back to
/// pinv_solve when |R_kk| < 1e-13 max|R|.
Vector qr_solve_ls(const DenseMatrix& a, std::span<const double> b);

/// LU with partial pivoting.
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix a);
  Vector solve(std::span<const double> b) const;
  DenseMatrix inverse() const;
  bool singular() const { return singular_; }

 private:
  DenseMatrix lu_;
  std::vector<Index> perm_;
  bool singular_ = false;
};

struct GeneralEigenvalues {
  ComplexVector values;
  bool converged = true;
};

/// All eigenvalues of a general real matrix via balancing, Hessenberg
/// reduction and Francis double-shift QR.
GeneralEigenvalues general_eigenvalues(const DenseMatrix& a);

}  // namespace bamg

#endif  // BAMG_DENSE_HPP
