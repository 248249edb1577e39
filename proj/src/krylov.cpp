#include "bamg/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace bamg {

VCycleOperator::VCycleOperator(std::shared_ptr<const Hierarchy> hierarchy, const SmootherConfig& smoother,
                               double coarsest_rank_tol)
    : hierarchy_(std::move(hierarchy)), smoother_(smoother) {
  if (!hierarchy_ || hierarchy_->levels.empty()) throw std::invalid_argument("VCycleOperator: empty hierarchy");
  smoother_.validate();
  for (const auto& lev : hierarchy_->levels) smoothers_.emplace_back(lev.B, smoother_);
  coarsest_pinv_ = pinv(densify(hierarchy_->coarsest().B), coarsest_rank_tol);
}

Vector VCycleOperator::cycle(Index l, std::span<const double> b) const {
  const Level& lev = hierarchy_->levels[l];
  if (l + 1 == hierarchy_->levels.size()) return matvec(coarsest_pinv_, b);
  Vector x(lev.size(), 0.0);
  smoothers_[l].smooth(lev.B, x, b, smoother_.sweeps_pre);
  Vector r(b.begin(), b.end());
  axpy(-1.0, spmv(lev.B, x), r);
  const Vector ec = cycle(l + 1, spmv(lev.Q, r));
  axpy(1.0, spmv(lev.P, ec), x);
  smoothers_[l].smooth(lev.B, x, b, smoother_.sweeps_post);
  return x;
}

Vector VCycleOperator::apply(std::span<const double> b) const {
  if (b.size() != size()) throw DimensionError("VCycleOperator: dimension mismatch");
  return cycle(0, b);
}

Vector vcycle_apply(const VCycleOperator& op, std::span<const double> b) { return op.apply(b); }

void GmresConfig::validate() const {
  if (!(rtol > 0.0)) throw std::invalid_argument("gmres: rtol must be positive");
  if (restart && *restart < 1) throw std::invalid_argument("gmres: restart must be at least 1");
}

namespace {

struct Givens {
  double c = 1.0;
  double s = 0.0;
};

Givens make_givens(double a, double b) {
  if (b == 0.0) return {1.0, 0.0};
  const double r = std::hypot(a, b);
  return {a / r, b / r};
}

class StopMeasure {
 public:
  StopMeasure(const SparseMatrix& b_mat, std::span<const double> b, std::span<const double> offset,
              StoppingRule rule)
      : b_mat_(b_mat), b_(b), offset_(offset), rule_(rule), bnorm_(norm2(b)) {}

  double operator()(std::span<const double> x) const {
    if (rule_ == StoppingRule::RelativeResidual) {
      Vector r(b_.begin(), b_.end());
      axpy(-1.0, spmv(b_mat_, x), r);
      return bnorm_ > 0.0 ? norm2(r) / bnorm_ : norm2(r);
    }
    Vector full(x.begin(), x.end());
    if (!offset_.empty()) axpy(1.0, offset_, full);
    const double nx = norm2(full);
    const double nb = norm2(spmv(b_mat_, full));
    return nx > 0.0 ? nb / nx : std::numeric_limits<double>::infinity();
  }

 private:
  const SparseMatrix& b_mat_;
  std::span<const double> b_;
  std::span<const double> offset_;
  StoppingRule rule_;
  double bnorm_;
};

}  // namespace

GmresResult gmres(const SparseMatrix& b_mat, std::span<const double> b, std::span<const double> x_init,
                  const GmresConfig& cfg, const VCycleOperator* precond, std::span<const double> offset) {
  cfg.validate();
  const Index n = b_mat.rows();
  if (b_mat.cols() != n || b.size() != n || x_init.size() != n || (!offset.empty() && offset.size() != n)) {
    throw DimensionError("gmres: dimension mismatch");
  }
  if (precond && precond->size() != n) throw DimensionError("gmres: preconditioner size mismatch");
  auto apply_op = [&](std::span<const double> v) {
    Vector w = spmv(b_mat, v);
    return precond ? precond->apply(w) : w;
  };
  const StopMeasure measure(b_mat, b, offset, cfg.stopping);

  GmresResult res;
  res.x.assign(x_init.begin(), x_init.end());
  double current = measure(res.x);
  res.residual_history.push_back(current);
  if (current <= cfg.rtol) {
    res.converged = true;
    return res;
  }
  const Vector pb = precond ? precond->apply(b) : Vector(b.begin(), b.end());
  const Index m_max = cfg.restart ? *cfg.restart : cfg.max_iters;

  while (res.iterations < cfg.max_iters) {
    Vector r = pb;
    axpy(-1.0, apply_op(res.x), r);
    const double beta = norm2(r);
    if (!(beta > 0.0) || !std::isfinite(beta)) break;
    const Index m = std::min(m_max, cfg.max_iters - res.iterations);
    std::vector<Vector> basis;
    basis.reserve(m + 1);
    scale(r, 1.0 / beta);
    basis.push_back(std::move(r));
    DenseMatrix h(m + 1, m);
    std::vector<Givens> rot;
    Vector g(m + 1, 0.0);
    g[0] = beta;
    bool stop = false;
    Index k = 0;
    Vector x_trial;
    while (k < m && !stop) {
      Vector w = apply_op(basis[k]);
      for (Index j = 0; j <= k; ++j) {
        h(j, k) = dot(w, basis[j]);
        axpy(-h(j, k), basis[j], w);
      }
      const double hn = norm2(w);
      h(k + 1, k) = hn;
      for (Index j = 0; j < k; ++j) {
        const double a = h(j, k), c = h(j + 1, k);
        h(j, k) = rot[j].c * a + rot[j].s * c;
        h(j + 1, k) = -rot[j].s * a + rot[j].c * c;
      }
      const Givens gk = make_givens(h(k, k), h(k + 1, k));
      rot.push_back(gk);
      h(k, k) = gk.c * h(k, k) + gk.s * h(k + 1, k);
      h(k + 1, k) = 0.0;
      g[k + 1] = -gk.s * g[k];
      g[k] = gk.c * g[k];
      ++k;
      ++res.iterations;

      // Current iterate from the k x k triangular system.
      Vector y(k, 0.0);
      for (Index i = k; i-- > 0;) {
        double s = g[i];
        for (Index j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
        y[i] = h(i, i) != 0.0 ? s / h(i, i) : 0.0;
      }
      x_trial = res.x;
      for (Index j = 0; j < k; ++j) axpy(y[j], basis[j], x_trial);
      current = measure(x_trial);
      res.residual_history.push_back(current);
      if (current <= cfg.rtol) {
        res.converged = true;
        stop = true;
      } else if (hn <= 1e-14 * beta || !std::isfinite(hn)) {
        stop = true;
      } else {
        scale(w, 1.0 / hn);
        basis.push_back(std::move(w));
      }
    }
    res.x = std::move(x_trial);
    if (res.converged || stop) break;
  }
  return res;
}

Vector power_iteration_oracle(const SparseMatrix& b, Index iters) {
  const Index n = b.rows();
  if (b.cols() != n || n == 0) throw DimensionError("power_iteration_oracle: matrix must be square");
  Vector x(n, 1.0 / static_cast<double>(n));
  for (Index k = 0; k < iters; ++k) {
    Vector bx = spmv(b, x);
    for (Index i = 0; i < n; ++i) x[i] -= bx[i];
    scale(x, 1.0 / norm1(x));
  }
  return x;
}

}  // namespace bamg
