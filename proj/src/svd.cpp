#include <algorithm>
#include <cmath>
#include <numeric>

#include "bamg/dense.hpp"

namespace bamg {

namespace {

struct Reflector {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Overwrites x with the Householder vector v such that
/// (I - beta v v^T) x_original = alpha e_1.
Reflector make_reflector(double* x, Index len, Index stride) {
  double nrm = 0.0;
  for (Index i = 0; i < len; ++i) nrm = std::hypot(nrm, x[i * stride]);
  if (nrm == 0.0) return {};
  const double alpha = x[0] > 0 ? -nrm : nrm;
  x[0] -= alpha;
  double vv = 0.0;
  for (Index i = 0; i < len; ++i) vv += x[i * stride] * x[i * stride];
  return {alpha, vv > 0.0 ? 2.0 / vv : 0.0};
}

/// Golub-Reinsch SVD for m >= n. Returns U (m x n), s, V (n x n), unsorted.
void golub_reinsch(const DenseMatrix& a, DenseMatrix& u_out, Vector& s, DenseMatrix& v_out) {
  const Index m = a.rows();
  const Index n = a.cols();
  DenseMatrix w = a;
  Vector d(n, 0.0), e(n, 0.0);  // e[k] couples columns k and k+1
  Vector beta_l(n, 0.0), beta_r(n, 0.0);
  Vector tmp(n);

  for (Index k = 0; k < n; ++k) {
    const Reflector hl = make_reflector(&w(k, k), m - k, n);
    beta_l[k] = hl.beta;
    d[k] = hl.alpha;
    if (hl.beta != 0.0) {
      std::fill(tmp.begin() + k + 1, tmp.end(), 0.0);
      for (Index i = k; i < m; ++i) {
        const double vi = w(i, k);
        const auto wi = w.row(i);
        for (Index j = k + 1; j < n; ++j) tmp[j] += vi * wi[j];
      }
      for (Index i = k; i < m; ++i) {
        const double f = hl.beta * w(i, k);
        auto wi = w.row(i);
        for (Index j = k + 1; j < n; ++j) wi[j] -= f * tmp[j];
      }
    }
    if (k + 1 < n) {
      double* row = &w(k, k + 1);
      const Reflector hr = make_reflector(row, n - k - 1, 1);
      beta_r[k] = hr.beta;
      e[k] = hr.alpha;
      if (hr.beta != 0.0) {
        for (Index i = k + 1; i < m; ++i) {
          auto wi = w.row(i);
          double sdot = 0.0;
          for (Index j = k + 1; j < n; ++j) sdot += row[j - k - 1] * wi[j];
          sdot *= hr.beta;
          for (Index j = k + 1; j < n; ++j) wi[j] -= sdot * row[j - k - 1];
        }
      }
    }
  }

  // Accumulate U^T (rows are left vectors) and V^T.
  DenseMatrix u(m, n);
  for (Index j = 0; j < n; ++j) u(j, j) = 1.0;
  for (Index k = n; k-- > 0;) {
    if (beta_l[k] == 0.0) continue;
    std::fill(tmp.begin() + k, tmp.end(), 0.0);
    for (Index i = k; i < m; ++i) {
      const double vi = w(i, k);
      const auto ui = u.row(i);
      for (Index j = k; j < n; ++j) tmp[j] += vi * ui[j];
    }
    for (Index i = k; i < m; ++i) {
      const double f = beta_l[k] * w(i, k);
      auto ui = u.row(i);
      for (Index j = k; j < n; ++j) ui[j] -= f * tmp[j];
    }
  }
  DenseMatrix v = DenseMatrix::identity(n);
  for (Index k = n; k-- > 0;) {
    if (k + 1 >= n || beta_r[k] == 0.0) continue;
    const double* hv = &w(k, k + 1);
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (Index i = k + 1; i < n; ++i) {
      const double vi = hv[i - k - 1];
      const auto ri = v.row(i);
      for (Index j = k + 1; j < n; ++j) tmp[j] += vi * ri[j];
    }
    for (Index i = k + 1; i < n; ++i) {
      const double f = beta_r[k] * hv[i - k - 1];
      auto ri = v.row(i);
      for (Index j = k + 1; j < n; ++j) ri[j] -= f * tmp[j];
    }
  }
  DenseMatrix ut = transpose(u);
  DenseMatrix vt = transpose(v);

  // rv1[i] is the superdiagonal entry coupling i-1 and i.
  Vector rv1(n, 0.0);
  for (Index k = 0; k + 1 < n; ++k) rv1[k + 1] = e[k];
  double anorm = 0.0;
  for (Index i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(rv1[i]));

  auto rotate = [](DenseMatrix& z, Index p, Index q, double c, double sn) {
    auto zp = z.row(p);
    auto zq = z.row(q);
    for (Index j = 0; j < zp.size(); ++j) {
      const double y = zp[j];
      const double x = zq[j];
      zp[j] = y * c + x * sn;
      zq[j] = x * c - y * sn;
    }
  };

  constexpr int kMaxIts = 75;
  for (Index kk = n; kk-- > 0;) {
    const long k = static_cast<long>(kk);
    for (int its = 1;; ++its) {
      bool flag = true;
      long l = k;
      long nm = 0;
      for (; l >= 0; --l) {
        nm = l - 1;
        if (std::abs(rv1[l]) + anorm == anorm) {
          flag = false;
          break;
        }
        if (std::abs(d[nm]) + anorm == anorm) break;
      }
      if (flag) {
        double c = 0.0, sn = 1.0;
        for (long i = l; i <= k; ++i) {
          const double f = sn * rv1[i];
          rv1[i] = c * rv1[i];
          if (std::abs(f) + anorm == anorm) break;
          const double g = d[i];
          double h = std::hypot(f, g);
          d[i] = h;
          h = 1.0 / h;
          c = g * h;
          sn = -f * h;
          rotate(ut, nm, i, c, sn);
        }
      }
      double z = d[k];
      if (l == k) {
        if (z < 0.0) {
          d[k] = -z;
          for (auto& x : vt.row(k)) x = -x;
        }
        break;
      }
      if (its >= kMaxIts) throw NumericalError("svd: no convergence in bidiagonal QR");
      double x = d[l];
      nm = k - 1;
      double y = d[nm];
      double g = rv1[nm];
      double h = rv1[k];
      double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
      g = std::hypot(f, 1.0);
      f = ((x - z) * (x + z) + h * ((y / (f + (f >= 0 ? g : -g))) - h)) / x;
      double c = 1.0, sn = 1.0;
      for (long j = l; j <= nm; ++j) {
        const long i = j + 1;
        g = rv1[i];
        y = d[i];
        h = sn * g;
        g = c * g;
        z = std::hypot(f, h);
        rv1[j] = z;
        c = f / z;
        sn = h / z;
        f = x * c + g * sn;
        g = g * c - x * sn;
        h = y * sn;
        y *= c;
        rotate(vt, j, i, c, sn);
        z = std::hypot(f, h);
        d[j] = z;
        if (z != 0.0) {
          z = 1.0 / z;
          c = f * z;
          sn = h * z;
        }
        f = c * g + sn * y;
        x = c * y - sn * g;
        rotate(ut, j, i, c, sn);
      }
      rv1[l] = 0.0;
      rv1[k] = f;
      d[k] = x;
    }
  }
  u_out = transpose(ut);
  v_out = transpose(vt);
  s = std::move(d);
}

}  // namespace

SvdResult svd(const DenseMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  SvdResult out;
  if (m == 0 || n == 0) {
    out.u = DenseMatrix(m, 0);
    out.v = DenseMatrix(n, 0);
    return out;
  }
  DenseMatrix u, v;
  Vector s;
  if (m >= n) {
    golub_reinsch(a, u, s, v);
  } else {
    golub_reinsch(transpose(a), v, s, u);
  }
  const Index k = s.size();
  std::vector<Index> order(k);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return s[x] > s[y]; });
  out.s.resize(k);
  out.u = DenseMatrix(m, k);
  out.v = DenseMatrix(n, k);
  for (Index c = 0; c < k; ++c) {
    const Index src = order[c];
    out.s[c] = s[src];
    for (Index i = 0; i < m; ++i) out.u(i, c) = u(i, src);
    for (Index i = 0; i < n; ++i) out.v(i, c) = v(i, src);
  }
  return out;
}

}  // namespace bamg
