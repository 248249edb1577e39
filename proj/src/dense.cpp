#include "bamg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bamg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const DenseMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(who) + ": matrix must be square");
  }
}

void require_symmetric(const DenseMatrix& a, const char* who) {
  require_square(a, who);
  const double scale = std::max(max_abs(a), std::numeric_limits<double>::min());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale) {
        throw NumericalError(std::string(who) + ": matrix is not symmetric");
      }
    }
  }
}

/// Householder reduction to tridiagonal form. On return v holds the
/// accumulated orthogonal transformation, d the diagonal and e the
/// subdiagonal in e[1..n-1].
void tred2(Index n, std::vector<double>& v, Vector& d, Vector& e) {
  auto V = [&](Index i, Index j) -> double& { return v[i * n + j]; };
  for (Index j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Index k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (Index j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (Index k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (Index j = 0; j < i; ++j) e[j] = 0.0;

      for (Index j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (Index k = j + 1; k <= i - 1; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (Index j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (Index j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (Index j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (Index k = j; k <= i - 1; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (Index i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (Index k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (Index j = 0; j <= i; ++j) {
        double g = 0.0;
        for (Index k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (Index k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (Index k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
  }
  for (Index j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal (d, e). The rows of vt are the
/// eigenvectors and are rotated in place when vt is non-null.
void tql2(Index n, Vector& d, Vector& e, std::vector<double>* vt) {
  for (Index i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  constexpr int kMaxIter = 100;
  for (Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    Index m = l;
    while (m < n) {
      if (std::abs(e[m]) <= kEps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxIter) {
          throw NumericalError("sym_eig: QL iteration did not converge");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (Index i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (Index ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (vt) {
            double* zi = vt->data() + ii * n;
            double* zi1 = zi + n;
            for (Index k = 0; k < n; ++k) {
              const double t = zi1[k];
              zi1[k] = s * zi[k] + c * t;
              zi[k] = c * zi[k] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

DenseMatrix densify(const SparseMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    const auto c = m.row_cols(i);
    const auto v = m.row_values(i);
    for (Index k = 0; k < c.size(); ++k) d(i, c[k]) = v[k];
  }
  return d;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (Index k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto bk = b.row(k);
      for (Index j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (Index j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector matvec_transpose(const DenseMatrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw DimensionError("matvec_transpose: dimension mismatch");
  Vector y(a.cols(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (Index j = 0; j < r.size(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double max_abs(const DenseMatrix& a) { return norm_inf(a.data()); }

EigenDecomposition sym_eig(const DenseMatrix& a) {
  require_symmetric(a, "sym_eig");
  const Index n = a.rows();
  EigenDecomposition out{Vector(n), DenseMatrix(n, n)};
  if (n == 0) return out;

  std::vector<double> v(a.data().begin(), a.data().end());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const double s = 0.5 * (v[i * n + j] + v[j * n + i]);
      v[i * n + j] = v[j * n + i] = s;
    }
  }
  Vector d(n), e(n);
  tred2(n, v, d, e);

  std::vector<double> vt(n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) vt[j * n + i] = v[i * n + j];
  }
  tql2(n, d, e, &vt);

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return d[x] < d[y]; });
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = d[order[k]];
    const double* src = vt.data() + order[k] * n;
    for (Index i = 0; i < n; ++i) out.eigenvectors(i, k) = src[i];
  }
  return out;
}

Vector sym_eigenvalues(const DenseMatrix& a) {
  require_symmetric(a, "sym_eigenvalues");
  const Index n = a.rows();
  if (n == 0) return {};
  std::vector<double> v(a.data().begin(), a.data().end());
  Vector d(n), e(n);
  tred2(n, v, d, e);
  tql2(n, d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

std::pair<double, ComplexVector> herm_eig_max(const ComplexDenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("herm_eig_max: matrix must be square");
  const Index n = a.rows();
  if (n == 0) throw DimensionError("herm_eig_max: empty matrix");
  double scale = 0.0;
  for (const auto& z : a.data()) scale = std::max(scale, std::abs(z));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > 1e-12 * std::max(scale, 1e-300)) {
        throw NumericalError("herm_eig_max: matrix is not Hermitian");
      }
    }
  }
  DenseMatrix emb(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Complex h = 0.5 * (a(i, j) + std::conj(a(j, i)));
      emb(i, j) = h.real();
      emb(n + i, n + j) = h.real();
      emb(n + i, j) = h.imag();
      emb(i, n + j) = -h.imag();
    }
  }
  const auto eig = sym_eig(emb);
  const Index top = 2 * n - 1;
  ComplexVector x(n);
  double nrm = 0.0;
  for (Index i = 0; i < n; ++i) {
    x[i] = Complex(eig.eigenvectors(i, top), eig.eigenvectors(n + i, top));
    nrm += std::norm(x[i]);
  }
  nrm = std::sqrt(nrm);
  for (auto& z : x) z /= nrm;
  return {eig.eigenvalues[top], std::move(x)};
}

DenseMatrix cholesky(const DenseMatrix& m) {
  require_square(m, "cholesky");
  const Index n = m.rows();
  DenseMatrix l(n, n);
  for (Index j = 0; j < n; ++j) {
    double s = m(j, j);
    const auto lj = l.row(j);
    for (Index k = 0; k < j; ++k) s -= lj[k] * lj[k];
    if (!(s > 0.0)) {
      throw NumericalError("cholesky: nonpositive pivot " + std::to_string(s) + " at row " +
                           std::to_string(j));
    }
    const double d = std::sqrt(s);
    l(j, j) = d;
    for (Index i = j + 1; i < n; ++i) {
      const auto li = l.row(i);
      double t = m(i, j);
      for (Index k = 0; k < j; ++k) t -= li[k] * lj[k];
      li[j] = t / d;
    }
  }
  return l;
}

EigenDecomposition gen_sym_eig(const DenseMatrix& a, const DenseMatrix& m) {
  require_symmetric(a, "gen_sym_eig");
  require_symmetric(m, "gen_sym_eig");
  if (a.rows() != m.rows()) throw DimensionError("gen_sym_eig: A and M differ in size");
  const Index n = a.rows();
  const DenseMatrix l = cholesky(m);

  // X = L^{-1} A, row by row.
  DenseMatrix x(n, n);
  for (Index i = 0; i < n; ++i) {
    auto xi = x.row(i);
    const auto ai = a.row(i);
    std::copy(ai.begin(), ai.end(), xi.begin());
    for (Index k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      const auto xk = x.row(k);
      for (Index j = 0; j < n; ++j) xi[j] -= lik * xk[j];
    }
    const double inv = 1.0 / l(i, i);
    for (auto& v : xi) v *= inv;
  }
  // C = L^{-1} X^T.
  DenseMatrix c = transpose(x);
  for (Index i = 0; i < n; ++i) {
    auto ci = c.row(i);
    for (Index k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      const auto ck = c.row(k);
      for (Index j = 0; j < n; ++j) ci[j] -= lik * ck[j];
    }
    const double inv = 1.0 / l(i, i);
    for (auto& v : ci) v *= inv;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const double s = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = c(j, i) = s;
    }
  }
  auto eig = sym_eig(c);

  // v = L^{-T} y, solved backwards row by row.
  DenseMatrix& y = eig.eigenvectors;
  for (Index ii = n; ii-- > 0;) {
    auto yi = y.row(ii);
    for (Index k = ii + 1; k < n; ++k) {
      const double lki = l(k, ii);
      if (lki == 0.0) continue;
      const auto yk = y.row(k);
      for (Index j = 0; j < n; ++j) yi[j] -= lki * yk[j];
    }
    const double inv = 1.0 / l(ii, ii);
    for (auto& v : yi) v *= inv;
  }
  return eig;
}

Vector pinv_solve(const DenseMatrix& a, std::span<const double> b, double rank_tol) {
  if (a.rows() != b.size()) throw DimensionError("pinv_solve: dimension mismatch");
  const auto f = svd(a);
  Vector x(a.cols(), 0.0);
  if (f.s.empty() || f.s[0] == 0.0) return x;
  const double cut = rank_tol * f.s[0];
  const Vector utb = matvec_transpose(f.u, b);
  for (Index k = 0; k < f.s.size(); ++k) {
    if (f.s[k] <= cut) break;
    const double coef = utb[k] / f.s[k];
    for (Index i = 0; i < x.size(); ++i) x[i] += coef * f.v(i, k);
  }
  return x;
}

DenseMatrix pinv(const DenseMatrix& a, double rank_tol) {
  const auto f = svd(a);
  DenseMatrix out(a.cols(), a.rows());
  if (f.s.empty() || f.s[0] == 0.0) return out;
  const double cut = rank_tol * f.s[0];
  Index rank = 0;
  while (rank < f.s.size() && f.s[rank] > cut) ++rank;
  // out = V diag(1/s) U^T
  DenseMatrix vs(a.cols(), rank);
  for (Index i = 0; i < a.cols(); ++i) {
    for (Index k = 0; k < rank; ++k) vs(i, k) = f.v(i, k) / f.s[k];
  }
  DenseMatrix ut(rank, a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = 0; k < rank; ++k) ut(k, i) = f.u(i, k);
  }
  return matmul(vs, ut);
}

Vector qr_solve_ls(const DenseMatrix& a, std::span<const double> b) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (b.size() != m) throw DimensionError("qr_solve_ls: dimension mismatch");
  if (m < n) throw DimensionError("qr_solve_ls: requires rows >= cols");
  if (n == 0) return {};

  // Column-major working copy.
  std::vector<double> r(m * n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) r[j * m + i] = a(i, j);
  }
  Vector qtb(b.begin(), b.end());
  Vector diag(n);
  for (Index k = 0; k < n; ++k) {
    double* col = r.data() + k * m;
    double nrm = 0.0;
    for (Index i = k; i < m; ++i) nrm = std::hypot(nrm, col[i]);
    if (nrm == 0.0) {
      diag[k] = 0.0;
      continue;
    }
    const double alpha = col[k] > 0 ? -nrm : nrm;
    col[k] -= alpha;
    double vnorm2 = 0.0;
    for (Index i = k; i < m; ++i) vnorm2 += col[i] * col[i];
    const double beta = 2.0 / vnorm2;
    for (Index j = k + 1; j < n; ++j) {
      double* cj = r.data() + j * m;
      double s = 0.0;
      for (Index i = k; i < m; ++i) s += col[i] * cj[i];
      s *= beta;
      for (Index i = k; i < m; ++i) cj[i] -= s * col[i];
    }
    double s = 0.0;
    for (Index i = k; i < m; ++i) s += col[i] * qtb[i];
    s *= beta;
    for (Index i = k; i < m; ++i) qtb[i] -= s * col[i];
    diag[k] = alpha;
  }

  double rmax = 0.0;
  for (double d : diag) rmax = std::max(rmax, std::abs(d));
  for (double d : diag) {
    if (std::abs(d) < 1e-13 * rmax || rmax == 0.0) return pinv_solve(a, b);
  }
  Vector x(n);
  for (Index kk = n; kk-- > 0;) {
    double s = qtb[kk];
    for (Index j = kk + 1; j < n; ++j) s -= r[j * m + kk] * x[j];
    x[kk] = s / diag[kk];
  }
  return x;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw DimensionError("LuFactorization: matrix must be square");
  const Index n = lu_.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), Index{0});
  for (Index k = 0; k < n; ++k) {
    Index p = k;
    double best = std::abs(lu_(k, k));
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const auto rk = lu_.row(k);
    for (Index i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const double f = ri[k] / rk[k];
      ri[k] = f;
      if (f == 0.0) continue;
      for (Index j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
}

Vector LuFactorization::solve(std::span<const double> b) const {
  const Index n = lu_.rows();
  if (b.size() != n) throw DimensionError("LuFactorization::solve: dimension mismatch");
  if (singular_) throw NumericalError("LuFactorization::solve: matrix is singular");
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    const auto ri = lu_.row(i);
    for (Index j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (Index ii = n; ii-- > 0;) {
    const auto ri = lu_.row(ii);
    double s = x[ii];
    for (Index j = ii + 1; j < n; ++j) s -= ri[j] * x[j];
    x[ii] = s / ri[ii];
  }
  return x;
}

DenseMatrix LuFactorization::inverse() const {
  const Index n = lu_.rows();
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    inv.set_column(j, solve(e));
    e[j] = 0.0;
  }
  return inv;
}

GeneralEigenvalues general_eigenvalues(const DenseMatrix& a) {
  require_square(a, "general_eigenvalues");
  const Index n = a.rows();
  GeneralEigenvalues out;
  if (n == 0) return out;

  // 1-based working storage.
  const Index ld = n + 1;
  std::vector<double> w(ld * ld, 0.0);
  auto H = [&](Index i, Index j) -> double& { return w[i * ld + j]; };
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) H(i + 1, j + 1) = a(i, j);
  }

  // Balancing.
  constexpr double radix = 2.0;
  const double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Index i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (Index j = 1; j <= n; ++j) {
        if (j == i) continue;
        c += std::abs(H(j, i));
        r += std::abs(H(i, j));
      }
      if (c != 0.0 && r != 0.0) {
        double g = r / radix;
        double f = 1.0;
        const double s = c + r;
        while (c < g) {
          f *= radix;
          c *= sqrdx;
        }
        g = r * radix;
        while (c > g) {
          f /= radix;
          c /= sqrdx;
        }
        if ((c + r) / f < 0.95 * s) {
          done = false;
          g = 1.0 / f;
          for (Index j = 1; j <= n; ++j) H(i, j) *= g;
          for (Index j = 1; j <= n; ++j) H(j, i) *= f;
        }
      }
    }
  }

  // Reduction to upper Hessenberg form by stabilized elimination.
  for (Index m = 2; m < n; ++m) {
    double x = 0.0;
    Index piv = m;
    for (Index j = m; j <= n; ++j) {
      if (std::abs(H(j, m - 1)) > std::abs(x)) {
        x = H(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (Index j = m - 1; j <= n; ++j) std::swap(H(piv, j), H(m, j));
      for (Index j = 1; j <= n; ++j) std::swap(H(j, piv), H(j, m));
    }
    if (x != 0.0) {
      for (Index i = m + 1; i <= n; ++i) {
        double y = H(i, m - 1);
        if (y != 0.0) {
          y /= x;
          H(i, m - 1) = y;
          for (Index j = m; j <= n; ++j) H(i, j) -= y * H(m, j);
          for (Index j = 1; j <= n; ++j) H(j, m) += y * H(j, i);
        }
      }
    }
  }
  for (Index i = 3; i <= n; ++i) {
    for (Index j = 1; j + 1 < i; ++j) H(i, j) = 0.0;
  }

  // Francis double-shift QR on the Hessenberg matrix.
  Vector wr(n + 1, 0.0), wi(n + 1, 0.0);
  double anorm = 0.0;
  for (Index i = 1; i <= n; ++i) {
    for (Index j = std::max<Index>(i - 1, 1); j <= n; ++j) anorm += std::abs(H(i, j));
  }
  long nn = static_cast<long>(n);
  double t = 0.0;
  const long max_its = 30 * std::max<long>(10, static_cast<long>(n));
  Index found_from = n + 1;
  while (nn >= 1) {
    long its = 0;
    long l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(H(l, l - 1)) + s == s) {
          H(l, l - 1) = 0.0;
          break;
        }
      }
      double x = H(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        found_from = static_cast<Index>(nn);
        --nn;
      } else {
        double y = H(nn - 1, nn - 1);
        double ww = H(nn, nn - 1) * H(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + ww;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + (p >= 0 ? std::abs(z) : -std::abs(z));
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - ww / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn] = z;
            wi[nn - 1] = -z;
          }
          found_from = static_cast<Index>(nn - 1);
          nn -= 2;
        } else {
          if (its == max_its) {
            out.converged = false;
            break;
          }
          if (its > 0 && its % 10 == 0) {
            t += x;
            for (long i = 1; i <= nn; ++i) H(i, i) -= x;
            const double s = std::abs(H(nn, nn - 1)) + std::abs(H(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          long m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = H(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - ww) / H(m + 1, m) + H(m, m + 1);
            q = H(m + 1, m + 1) - z - r - s;
            r = H(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(H(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (long i = m + 2; i <= nn; ++i) {
            H(i, i - 2) = 0.0;
            if (i != m + 2) H(i, i - 3) = 0.0;
          }
          for (long k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = H(k, k - 1);
              q = H(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = H(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double mag = std::sqrt(p * p + q * q + r * r);
            const double s = p >= 0 ? mag : -mag;
            if (s != 0.0) {
              if (k == m) {
                if (l != m) H(k, k - 1) = -H(k, k - 1);
              } else {
                H(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (long j = k; j <= nn; ++j) {
                p = H(k, j) + q * H(k + 1, j);
                if (k != nn - 1) {
                  p += r * H(k + 2, j);
                  H(k + 2, j) -= p * z;
                }
                H(k + 1, j) -= p * y;
                H(k, j) -= p * x;
              }
              const long mmin = nn < k + 3 ? nn : k + 3;
              for (long i = l; i <= mmin; ++i) {
                p = x * H(i, k) + y * H(i, k + 1);
                if (k != nn - 1) {
                  p += z * H(i, k + 2);
                  H(i, k + 2) -= p * r;
                }
                H(i, k + 1) -= p * q;
                H(i, k) -= p;
              }
            }
          }
        }
      }
    } while (out.converged && l < nn - 1);
    if (!out.converged) break;
  }

  for (Index i = found_from; i <= n; ++i) out.values.emplace_back(wr[i], wi[i]);
  return out;
}

}  // namespace bamg
