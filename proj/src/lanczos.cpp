#include <cmath>

#include "bamg/spectral.hpp"

namespace bamg {

namespace {

Complex cdot(std::span<const Complex> a, std::span<const Complex> b) {
  double re = 0.0;
  double im = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double cnorm(std::span<const Complex> a) { return std::sqrt(std::max(0.0, cdot(a, a).real())); }

void caxpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  const double ar = alpha.real(), ai = alpha.imag();
  for (Index i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += Complex(ar * xr - ai * xi, ar * xi + ai * xr);
  }
}

}  // namespace

double lanczos_max(const std::function<void(std::span<const Complex>, std::span<Complex>)>& h, Index n,
                   ComplexVector& start, double scale, const FovConfig& cfg) {
  if (n == 0) throw std::invalid_argument("lanczos_max: empty operator");
  ComplexVector generic(n, Complex(1.0, 0.0));
  for (Index i = 0; i < n; ++i) generic[i] += Complex(0.0, 0.5 * std::sin(static_cast<double>(i + 1)));
  const double ng = cnorm(generic);
  if (start.size() != n || !(cnorm(start) > 0.0)) {
    start = generic;
  } else {
    const double ns = cnorm(start);
    for (Index i = 0; i < n; ++i) start[i] = start[i] / ns + 1e-3 * generic[i] / ng;
  }
  const Index dim = std::min(cfg.krylov_dim, n);
  const double tol = cfg.eig_tol * std::max(scale, 1e-300);
  double theta = 0.0;
  ComplexVector w(n);
  for (Index restart = 0; restart <= cfg.max_restarts; ++restart) {
    std::vector<ComplexVector> q;
    q.reserve(dim + 1);
    {
      ComplexVector x = start;
      const double nx = cnorm(x);
      for (auto& v : x) v /= nx;
      q.push_back(std::move(x));
    }
    Vector alpha, beta;
    bool done = false;
    EigenDecomposition e;
    for (Index j = 0; j < dim; ++j) {
      h(q[j], w);
      alpha.push_back(cdot(q[j], w).real());
      // Two passes of full reorthogonalization.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& qk : q) caxpy(-cdot(qk, w), qk, w);
      }
      const double b = cnorm(w);
      beta.push_back(b);
      const bool invariant = b <= 1e-14 * std::max(scale, 1e-300) || j + 1 == n;
      const Index k = alpha.size();
      if (invariant || k % 4 == 0 || k == dim) {
        DenseMatrix t(k, k);
        for (Index i = 0; i < k; ++i) {
          t(i, i) = alpha[i];
          if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        e = sym_eig(t);
        done = invariant || std::abs(b * e.eigenvectors(k - 1, k - 1)) <= tol;
        if (done || k == dim) break;
      }
      ComplexVector next(n);
      for (Index i = 0; i < n; ++i) next[i] = w[i] / b;
      q.push_back(std::move(next));
    }
    const Index k = alpha.size();
    theta = e.eigenvalues.back();
    ComplexVector x(n, 0.0);
    for (Index i = 0; i < k; ++i) caxpy(e.eigenvectors(i, k - 1), q[i], x);
    const double nx = cnorm(x);
    for (auto& v : x) v /= nx;
    start = std::move(x);
    if (done) return theta;
  }
  return theta;
}

}  // namespace bamg
