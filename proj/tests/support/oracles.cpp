#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bamg::oracle {

DenseMatrix dense(const SparseMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) d(i, cols[k]) += vals[k];
  }
  return d;
}

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("oracle::product: shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (Index j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector gauss_solve(DenseMatrix a, Vector b) {
  const Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("oracle::gauss_solve: shape mismatch");
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (a(piv, k) == 0.0) throw NumericalError("oracle::gauss_solve: singular matrix");
    if (piv != k) {
      for (Index j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vector x(n);
  for (Index k = n; k-- > 0;) {
    double s = b[k];
    for (Index j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

Vector steady_state(const SparseMatrix& b) {
  DenseMatrix a = dense(b);
  const Index n = a.rows();
  Vector rhs(n, 0.0);
  for (Index j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  rhs[n - 1] = 1.0;
  return gauss_solve(std::move(a), std::move(rhs));
}

JacobiSvd jacobi_svd(const DenseMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < n) throw DimensionError("oracle::jacobi_svd: needs rows >= cols");
  DenseMatrix w = a;
  DenseMatrix v = DenseMatrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
        for (Index i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0) continue;
        const double c0 = std::abs(gamma) / std::sqrt(alpha * beta);
        off = std::max(off, c0);
        if (c0 < 1e-15) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < m; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Index i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (off < 1e-15) break;
  }
  Vector s(n);
  for (Index j = 0; j < n; ++j) {
    double sum = 0.0;
    for (Index i = 0; i < m; ++i) sum += w(i, j) * w(i, j);
    s[j] = std::sqrt(sum);
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return s[x] > s[y]; });
  JacobiSvd out{Vector(n), DenseMatrix(m, n), DenseMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    const Index j = order[k];
    out.s[k] = s[j];
    for (Index i = 0; i < m; ++i) out.u(i, k) = s[j] > 0.0 ? w(i, j) / s[j] : 0.0;
    for (Index i = 0; i < n; ++i) out.v(i, k) = v(i, j);
  }
  return out;
}

DenseMatrix pseudo_inverse(const DenseMatrix& a, double rank_tol) {
  const JacobiSvd f = jacobi_svd(a);
  const Index n = a.cols();
  const Index m = a.rows();
  const double cut = f.s.empty() ? 0.0 : rank_tol * f.s.front();
  DenseMatrix x(n, m);
  for (Index k = 0; k < f.s.size(); ++k) {
    if (f.s[k] <= cut || f.s[k] == 0.0) continue;
    for (Index i = 0; i < n; ++i) {
      const double vik = f.v(i, k) / f.s[k];
      for (Index j = 0; j < m; ++j) x(i, j) += vik * f.u(j, k);
    }
  }
  return x;
}

Vector weighted_ls(Index i, std::span<const Index> pattern, const std::vector<Vector>& tests,
                   std::span<const double> weights, bool sum_to_one) {
  const Index p = pattern.size();
  const Index dim = sum_to_one ? p + 1 : p;
  DenseMatrix g(dim, dim);
  Vector rhs(dim, 0.0);
  for (Index k = 0; k < tests.size(); ++k) {
    const Vector& v = tests[k];
    for (Index a = 0; a < p; ++a) {
      rhs[a] += weights[k] * v[pattern[a]] * v[i];
      for (Index b = 0; b < p; ++b) g(a, b) += weights[k] * v[pattern[a]] * v[pattern[b]];
    }
  }
  if (sum_to_one) {
    for (Index a = 0; a < p; ++a) {
      g(a, p) = 1.0;
      g(p, a) = 1.0;
    }
    rhs[p] = 1.0;
  }
  Vector c = gauss_solve(std::move(g), std::move(rhs));
  c.resize(p);
  return c;
}

DenseMatrix two_level_propagator(const SparseMatrix& b, const SparseMatrix& p, const SparseMatrix& q,
                                 const SmootherConfig& smoother, double rank_tol) {
  const DenseMatrix bd = dense(b);
  const DenseMatrix pd = dense(p);
  const DenseMatrix qd = dense(q);
  const Index n = bd.rows();
  const double step = smoother.form == JacobiForm::Damped ? smoother.omega : 1.0 / smoother.omega;
  DenseMatrix s = DenseMatrix::identity(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) s(i, j) -= step * bd(i, j) / bd(i, i);
  }
  const DenseMatrix qb = product(qd, bd);
  const DenseMatrix bc_pinv = pseudo_inverse(product(qb, pd), rank_tol);
  DenseMatrix coarse = product(pd, product(bc_pinv, qb));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) coarse(i, j) = (i == j ? 1.0 : 0.0) - coarse(i, j);
  }
  DenseMatrix e = coarse;
  for (Index k = 0; k < smoother.sweeps_pre; ++k) e = product(e, s);
  for (Index k = 0; k < smoother.sweeps_post; ++k) e = product(s, e);
  return e;
}

}  // namespace bamg::oracle
