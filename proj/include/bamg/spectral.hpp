/// @file spectral.hpp
/// @brief Field of values, projections onto the range, and the GMRES
/// residual bound built on them.

#ifndef BAMG_SPECTRAL_HPP
#define BAMG_SPECTRAL_HPP

#include <functional>
#include <vector>

#include "bamg/dense.hpp"
#include "bamg/krylov.hpp"

namespace bamg {

inline constexpr Index kDenseCap = 1200;

/// Real operator given by its action on a block: returns M x and M^T x for
/// the real vectors in `x`.
struct FovOperator {
  Index n = 0;
  std::function<void(std::span<const double> x, std::span<double> mx, std::span<double> mtx)> apply;
  double scale = 1.0;  ///< an estimate of ||M||, used for tolerances
};

FovOperator make_fov_operator(const DenseMatrix& m);
FovOperator make_fov_operator(const SparseMatrix& m);

struct FovConfig {
  Index n_angles = 256;
  Index dense_cap = kDenseCap;
  /// Relative residual target of each extreme eigenpair.
  double eig_tol = 1e-6;
  Index krylov_dim = 40;
  Index max_restarts = 200;
};

struct FovResult {
  /// Convex hull of the boundary points, counterclockwise.
  std::vector<Complex> boundary;
  std::vector<Complex> eigenvalues;
  /// Distance from the origin to the boundary polygon, 0 when inside.
  double nu = 0.0;
  /// max over sampled angles of -lambda_max of the rotated Hermitian part;
  /// a lower bound on the true distance.
  double nu_lower = 0.0;
  bool contains_origin = false;
  /// lambda_max of the Hermitian part of e^{i theta} M per angle.
  Vector support;
};

/// Angle sweep over the Hermitian parts of e^{i theta} M.
FovResult fov_boundary(const FovOperator& m, const FovConfig& cfg = {});
FovResult fov_boundary(const DenseMatrix& m, const FovConfig& cfg = {});

/// Largest eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. `start` is overwritten with the eigenvector.
double lanczos_max(const std::function<void(std::span<const Complex>, std::span<Complex>)>& h, Index n,
                   ComplexVector& start, double scale, const FovConfig& cfg);

/// Convex hull (counterclockwise, no collinear points).
std::vector<Complex> convex_hull(std::vector<Complex> points);
/// Distance from the origin to a convex polygon; 0 when the origin is
/// strictly inside.
double polygon_distance_to_origin(const std::vector<Complex>& hull, bool* inside = nullptr);

struct ProjectedSystem {
  DenseMatrix Pi;    ///< n x m, orthonormal columns spanning the range
  DenseMatrix Bhat;  ///< Pi^T M Pi
};

/// Projection of M onto its range from a dense SVD.
ProjectedSystem project_range(const DenseMatrix& m, double rank_tol = kDefaultRankTol);
ProjectedSystem project_range(const SparseMatrix& b, double rank_tol = kDefaultRankTol,
                              Index dense_cap = kDenseCap);

/// C B assembled column by column through the V-cycle.
DenseMatrix preconditioned_matrix(const SparseMatrix& b, const VCycleOperator& c);

/// Range projection of C B.
ProjectedSystem projected_preconditioned(const SparseMatrix& b, const VCycleOperator& c,
                                         double rank_tol = kDefaultRankTol, Index dense_cap = kDenseCap);

/// (1 - nu_M nu_Minv)^{k/2}, clamped to [0, 1].
double theorem2_bound(double nu_m, double nu_minv, Index k);
double theorem2_bound(const FovResult& fov_m, const FovResult& fov_minv, Index k);

/// (1 - (nu_M / ||M||)^2)^{k/2}, clamped to [0, 1].
double elman_bound(double nu_m, double norm_m, Index k);

/// Smallest k with theorem2_bound <= target, or none when nu product is 0.
std::optional<Index> theorem2_steps(double nu_m, double nu_minv, double target);

/// Eigenvalues of a dense nonsymmetric matrix (Hessenberg QR).
GeneralEigenvalues eigenvalue_dots(const DenseMatrix& m, Index dense_cap = kDenseCap);

}  // namespace bamg

#endif  // BAMG_SPECTRAL_HPP
