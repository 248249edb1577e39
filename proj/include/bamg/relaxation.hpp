/// @file relaxation.hpp
/// @brief Weighted Jacobi smoothing for B x = b and B^T x = b.

#ifndef BAMG_RELAXATION_HPP
#define BAMG_RELAXATION_HPP

#include "bamg/sparse.hpp"

namespace bamg {

enum class ZeroDiagPolicy { SkipRow, Error };

/// How omega enters the sweep.
enum class JacobiForm {
  /// x + omega D^{-1} (b - B x)
  Damped,
  /// x + (omega D)^{-1} (b - B x)
  ScaledSplitting,
};

struct SmootherConfig {
  double omega = 0.7;
  Index sweeps_pre = 3;
  Index sweeps_post = 3;
  ZeroDiagPolicy zero_diag_policy = ZeroDiagPolicy::SkipRow;
  JacobiForm form = JacobiForm::Damped;

  void validate() const;
  /// Multiplier applied to D^{-1} r.
  double step() const { return form == JacobiForm::Damped ? omega : 1.0 / omega; }
};

/// Diagonal entries below this fraction of the row's largest magnitude are
/// treated as zero.
inline constexpr double kTinyDiagonal = 1e-14;

/// One sweep on B x = b. Rows with a (near) zero diagonal are left
/// unchanged under SkipRow and raise NumericalError under Error.
Vector jacobi_sweep(const SparseMatrix& b, std::span<const double> x, std::span<const double> rhs,
                    const SmootherConfig& cfg);

/// One sweep on B^T x = b without forming the transpose.
Vector jacobi_sweep_transpose(const SparseMatrix& b, std::span<const double> x,
                              std::span<const double> rhs, const SmootherConfig& cfg);

/// Precomputed scaled inverse diagonal for repeated sweeps with one matrix.
/// Pass B^T explicitly to smooth the transposed system.
class JacobiSmoother {
 public:
  JacobiSmoother() = default;
  JacobiSmoother(const SparseMatrix& m, const SmootherConfig& cfg);

  /// Applies `count` sweeps on m x = rhs in place; m must be the matrix the
  /// smoother was built from. An empty rhs means b = 0.
  void smooth(const SparseMatrix& m, std::span<double> x, std::span<const double> rhs, Index count) const;

  Index skipped_rows() const { return skipped_; }

 private:
  Vector scaled_inv_diag_;
  Index skipped_ = 0;
};

}  // namespace bamg

#endif  // BAMG_RELAXATION_HPP
