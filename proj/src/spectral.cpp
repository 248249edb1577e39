#include "bamg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bamg {

namespace {

void check_cap(Index n, Index cap, const char* what) {
  if (n > cap) {
    throw std::invalid_argument(std::string(what) + ": n = " + std::to_string(n) + " exceeds the dense cap " +
                                std::to_string(cap) + "; use a smaller instance");
  }
}

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

double segment_distance(Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(a);
  const double t = std::clamp(-(a.real() * d.real() + a.imag() * d.imag()) / len2, 0.0, 1.0);
  return std::abs(a + t * d);
}

}  // namespace

FovOperator make_fov_operator(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("fov: matrix must be square");
  FovOperator op;
  op.n = m.rows();
  double r1 = 0.0;
  Vector colsum(m.cols(), 0.0);
  for (Index i = 0; i < m.rows(); ++i) {
    double rs = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
      rs += std::abs(m(i, j));
      colsum[j] += std::abs(m(i, j));
    }
    r1 = std::max(r1, rs);
  }
  op.scale = std::sqrt(r1 * (colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end())));
  op.apply = [&m](std::span<const double> x, std::span<double> mx, std::span<double> mtx) {
    const Index n = m.rows();
    std::fill(mtx.begin(), mtx.end(), 0.0);
    for (Index i = 0; i < n; ++i) {
      const auto row = m.row(i);
      const double xi = x[i];
      double s = 0.0;
      for (Index j = 0; j < n; ++j) {
        s += row[j] * x[j];
        mtx[j] += row[j] * xi;
      }
      mx[i] = s;
    }
  };
  return op;
}

FovOperator make_fov_operator(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("fov: matrix must be square");
  FovOperator op;
  op.n = m.rows();
  op.scale = std::sqrt(m.norm_inf() * transpose(m).norm_inf());
  op.apply = [&m](std::span<const double> x, std::span<double> mx, std::span<double> mtx) {
    spmv(m, x, mx);
    const Vector t = spmv_transpose(m, x);
    std::copy(t.begin(), t.end(), mtx.begin());
  };
  return op;
}

std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, std::abs(p));
  const double eps = 1e-14 * scale * scale;
  std::vector<Complex> hull(2 * pts.size());
  Index k = 0;
  for (Index i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  for (Index i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_distance_to_origin(const std::vector<Complex>& hull, bool* inside) {
  if (hull.empty()) throw std::invalid_argument("polygon_distance_to_origin: empty polygon");
  bool in = hull.size() >= 3;
  double scale = 0.0;
  for (const auto& p : hull) scale = std::max(scale, std::abs(p));
  for (Index i = 0; i < hull.size() && in; ++i) {
    const Complex a = hull[i], b = hull[(i + 1) % hull.size()];
    in = cross(a, b, Complex(0.0, 0.0)) > 1e-14 * scale * scale;
  }
  if (inside) *inside = in;
  if (in) return 0.0;
  if (hull.size() == 1) return std::abs(hull[0]);
  double d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < hull.size(); ++i) d = std::min(d, segment_distance(hull[i], hull[(i + 1) % hull.size()]));
  return d;
}

FovResult fov_boundary(const FovOperator& m, const FovConfig& cfg) {
  if (cfg.n_angles < 16) throw std::invalid_argument("fov_boundary: need at least 16 angles");
  if (m.n == 0) throw std::invalid_argument("fov_boundary: empty operator");
  const Index n = m.n;
  Vector xr(n), xi(n), mr(n), mi(n), tr(n), ti(n);
  auto products = [&](std::span<const Complex> x) {
    for (Index k = 0; k < n; ++k) {
      xr[k] = x[k].real();
      xi[k] = x[k].imag();
    }
    m.apply(xr, mr, tr);
    m.apply(xi, mi, ti);
  };
  FovResult res;
  std::vector<Complex> points;
  ComplexVector x;
  for (Index j = 0; j < cfg.n_angles; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(cfg.n_angles);
    const Complex e = std::polar(1.0, theta);
    auto h = [&](std::span<const Complex> v, std::span<Complex> out) {
      products(v);
      const double c = e.real(), s = e.imag();
      for (Index k = 0; k < n; ++k) {
        out[k] = Complex(0.5 * (c * (mr[k] + tr[k]) - s * (mi[k] - ti[k])),
                         0.5 * (c * (mi[k] + ti[k]) + s * (mr[k] - tr[k])));
      }
    };
    const double lmax = lanczos_max(h, n, x, m.scale, cfg);
    res.support.push_back(lmax);
    products(x);
    Complex z = 0.0;
    for (Index k = 0; k < n; ++k) z += std::conj(x[k]) * Complex(mr[k], mi[k]);
    points.push_back(z);
    res.nu_lower = std::max(res.nu_lower, -lmax);
  }
  res.boundary = convex_hull(points);
  res.nu = polygon_distance_to_origin(res.boundary, &res.contains_origin);
  if (res.contains_origin) res.nu_lower = 0.0;
  return res;
}

FovResult fov_boundary(const DenseMatrix& m, const FovConfig& cfg) {
  check_cap(m.rows(), cfg.dense_cap, "fov_boundary");
  return fov_boundary(make_fov_operator(m), cfg);
}

ProjectedSystem project_range(const DenseMatrix& m, double rank_tol) {
  if (m.rows() != m.cols()) throw DimensionError("project_range: matrix must be square");
  const SvdResult s = svd(m);
  Index rank = 0;
  const double smax = s.s.empty() ? 0.0 : s.s[0];
  while (rank < s.s.size() && s.s[rank] > rank_tol * smax) ++rank;
  ProjectedSystem p;
  p.Pi = DenseMatrix(m.rows(), rank);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < rank; ++j) p.Pi(i, j) = s.u(i, j);
  }
  p.Bhat = matmul(transpose(p.Pi), matmul(m, p.Pi));
  return p;
}

ProjectedSystem project_range(const SparseMatrix& b, double rank_tol, Index dense_cap) {
  check_cap(b.rows(), dense_cap, "project_range");
  return project_range(densify(b), rank_tol);
}

DenseMatrix preconditioned_matrix(const SparseMatrix& b, const VCycleOperator& c) {
  const Index n = b.rows();
  if (c.size() != n) throw DimensionError("preconditioned_matrix: size mismatch");
  const SparseMatrix bt = transpose(b);
  DenseMatrix cb(n, n);
  Vector col(n);
  for (Index j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    const auto rows = bt.row_cols(j);
    const auto vals = bt.row_values(j);
    for (Index k = 0; k < rows.size(); ++k) col[rows[k]] = vals[k];
    cb.set_column(j, c.apply(col));
  }
  return cb;
}

ProjectedSystem projected_preconditioned(const SparseMatrix& b, const VCycleOperator& c, double rank_tol,
                                         Index dense_cap) {
  check_cap(b.rows(), dense_cap, "projected_preconditioned");
  return project_range(preconditioned_matrix(b, c), rank_tol);
}

double theorem2_bound(double nu_m, double nu_minv, Index k) {
  if (!(nu_m >= 0.0) || !(nu_minv >= 0.0)) throw std::invalid_argument("theorem2_bound: nu must be nonnegative");
  const double base = std::clamp(1.0 - nu_m * nu_minv, 0.0, 1.0);
  return std::clamp(std::pow(base, 0.5 * static_cast<double>(k)), 0.0, 1.0);
}

double theorem2_bound(const FovResult& fov_m, const FovResult& fov_minv, Index k) {
  return theorem2_bound(fov_m.nu, fov_minv.nu, k);
}

double elman_bound(double nu_m, double norm_m, Index k) {
  if (!(norm_m > 0.0)) throw std::invalid_argument("elman_bound: norm must be positive");
  const double q = nu_m / norm_m;
  const double base = std::clamp(1.0 - q * q, 0.0, 1.0);
  return std::clamp(std::pow(base, 0.5 * static_cast<double>(k)), 0.0, 1.0);
}

std::optional<Index> theorem2_steps(double nu_m, double nu_minv, double target) {
  const double p = nu_m * nu_minv;
  if (!(p > 0.0)) return std::nullopt;
  if (p >= 1.0 || target >= 1.0) return Index{1};
  const double k = 2.0 * std::log(target) / std::log(1.0 - p);
  return static_cast<Index>(std::ceil(k - 1e-12));
}

GeneralEigenvalues eigenvalue_dots(const DenseMatrix& m, Index dense_cap) {
  check_cap(m.rows(), dense_cap, "eigenvalue_dots");
  return general_eigenvalues(m);
}

}  // namespace bamg
