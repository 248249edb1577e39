/// @file oracles.hpp
/// @brief Reference computations for tests, written independently of the
/// library's dense kernels: Gaussian elimination, one-sided Jacobi SVD and
/// explicitly assembled operators.

#ifndef BAMG_TEST_ORACLES_HPP
#define BAMG_TEST_ORACLES_HPP

#include <span>
#include <vector>

#include "bamg/dense.hpp"
#include "bamg/relaxation.hpp"
#include "bamg/sparse.hpp"

namespace bamg::oracle {

/// Dense copy built entry by entry from the CSR arrays.
DenseMatrix dense(const SparseMatrix& m);

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b);

/// Solves A x = b by Gaussian elimination with partial pivoting. Throws
/// NumericalError on an exactly singular pivot.
Vector gauss_solve(DenseMatrix a, Vector b);

/// Probability vector in the null space of B: the last equation of B x = 0
/// is replaced by sum(x) = 1.
Vector steady_state(const SparseMatrix& b);

struct JacobiSvd {
  Vector s;  ///< descending
  DenseMatrix u;
  DenseMatrix v;
};

/// One-sided (Hestenes) Jacobi SVD of a square or tall matrix.
JacobiSvd jacobi_svd(const DenseMatrix& a);

/// Pseudoinverse dropping singular values below rank_tol * s_max.
DenseMatrix pseudo_inverse(const DenseMatrix& a, double rank_tol);

/// Minimizer of sum_k w_k (v_k(i) - sum_j c_j v_k(pattern_j))^2 from the
/// normal equations; with `sum_to_one` the coefficients are constrained to
/// sum to one through a Lagrange multiplier.
Vector weighted_ls(Index i, std::span<const Index> pattern, const std::vector<Vector>& tests,
                   std::span<const double> weights, bool sum_to_one);

/// Two-level error propagator S^post (I - P pinv(Q B P) Q B) S^pre with the
/// damped Jacobi iteration matrix S = I - step D^{-1} B.
DenseMatrix two_level_propagator(const SparseMatrix& b, const SparseMatrix& p, const SparseMatrix& q,
                                 const SmootherConfig& smoother, double rank_tol);

}  // namespace bamg::oracle

#endif  // BAMG_TEST_ORACLES_HPP
