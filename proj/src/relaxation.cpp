#include "bamg/relaxation.hpp"

#include <cmath>
#include <string>

namespace bamg {

void SmootherConfig::validate() const {
  if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("smoother: omega must lie in (0, 1]");
}

namespace {

/// Scaled inverse diagonal of M (step / m_ii), zero for skipped rows.
Vector scaled_inverse_diagonal(const SparseMatrix& m, const SmootherConfig& cfg, Index* skipped) {
  cfg.validate();
  if (m.rows() != m.cols()) throw DimensionError("jacobi: matrix must be square");
  Vector inv(m.rows(), 0.0);
  Index skip = 0;
  const double step = cfg.step();
  for (Index i = 0; i < m.rows(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    double d = 0.0;
    double rowmax = 0.0;
    for (Index k = 0; k < cols.size(); ++k) {
      rowmax = std::max(rowmax, std::abs(vals[k]));
      if (cols[k] == i) d = vals[k];
    }
    if (std::abs(d) <= kTinyDiagonal * rowmax || d == 0.0) {
      if (cfg.zero_diag_policy == ZeroDiagPolicy::Error) {
        throw NumericalError("jacobi: zero diagonal in row " + std::to_string(i));
      }
      ++skip;
      continue;
    }
    inv[i] = step / d;
  }
  if (skipped) *skipped = skip;
  return inv;
}

}  // namespace

Vector jacobi_sweep(const SparseMatrix& b, std::span<const double> x, std::span<const double> rhs,
                    const SmootherConfig& cfg) {
  if (x.size() != b.cols() || rhs.size() != b.rows()) throw DimensionError("jacobi_sweep: dimension mismatch");
  const Vector inv = scaled_inverse_diagonal(b, cfg, nullptr);
  const Vector bx = spmv(b, x);
  Vector out(x.begin(), x.end());
  for (Index i = 0; i < out.size(); ++i) out[i] += inv[i] * (rhs[i] - bx[i]);
  return out;
}

Vector jacobi_sweep_transpose(const SparseMatrix& b, std::span<const double> x,
                              std::span<const double> rhs, const SmootherConfig& cfg) {
  if (x.size() != b.rows() || rhs.size() != b.cols()) {
    throw DimensionError("jacobi_sweep_transpose: dimension mismatch");
  }
  // diag(B^T) = diag(B); the row scale test uses B^T rows.
  const Vector inv = scaled_inverse_diagonal(transpose(b), cfg, nullptr);
  const Vector btx = spmv_transpose(b, x);
  Vector out(x.begin(), x.end());
  for (Index i = 0; i < out.size(); ++i) out[i] += inv[i] * (rhs[i] - btx[i]);
  return out;
}

JacobiSmoother::JacobiSmoother(const SparseMatrix& m, const SmootherConfig& cfg)
    : scaled_inv_diag_(scaled_inverse_diagonal(m, cfg, &skipped_)) {}

void JacobiSmoother::smooth(const SparseMatrix& m, std::span<double> x, std::span<const double> rhs,
                            Index count) const {
  if (x.size() != m.rows() || x.size() != scaled_inv_diag_.size() ||
      (!rhs.empty() && rhs.size() != m.rows())) {
    throw DimensionError("JacobiSmoother::smooth: dimension mismatch");
  }
  Vector mx(m.rows());
  for (Index s = 0; s < count; ++s) {
    spmv(m, x, mx);
    if (rhs.empty()) {
      for (Index i = 0; i < x.size(); ++i) x[i] -= scaled_inv_diag_[i] * mx[i];
    } else {
      for (Index i = 0; i < x.size(); ++i) x[i] += scaled_inv_diag_[i] * (rhs[i] - mx[i]);
    }
  }
}

}  // namespace bamg
