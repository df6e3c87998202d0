#include "lyapnet/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SparseLU>

namespace lyapnet {

const char* to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterLimit: return "IterLimit";
  }
  return "Unknown";
}

void LpProblem::validate() const {
  const Eigen::Index n = num_variables();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "LP has no variables");
  if (eq_matrix.cols() != n && !(eq_matrix.rows() == 0)) {
    throw Error(ErrorCode::DimensionMismatch, "equality block column count differs from N");
  }
  if (ineq_matrix.cols() != n && !(ineq_matrix.rows() == 0)) {
    throw Error(ErrorCode::DimensionMismatch, "inequality block column count differs from N");
  }
  if (eq_matrix.rows() != eq_rhs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "equality rhs length differs from row count");
  }
  if (ineq_matrix.rows() != ineq_rhs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inequality rhs length differs from row count");
  }
  auto finite_sparse = [](const SparseMatrix& m) {
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it)
        if (!std::isfinite(it.value())) return false;
    return true;
  };
  if (!costs.allFinite() || !eq_rhs.allFinite() || !ineq_rhs.allFinite() ||
      !finite_sparse(eq_matrix) || !finite_sparse(ineq_matrix)) {
    throw Error(ErrorCode::InvalidArgument, "LP has non-finite coefficients");
  }
}

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Empty blocks are stored as 0 x N so products are always well formed.
struct Blocks {
  SparseMatrix A, G, At, Gt;
  Vector b, h, c;
  Eigen::Index n = 0, me = 0, mi = 0;

  explicit Blocks(const LpProblem& p)
      : b(p.eq_rhs), h(p.ineq_rhs), c(p.costs), n(p.num_variables()),
        me(p.eq_matrix.rows()), mi(p.ineq_matrix.rows()) {
    A = p.eq_matrix.rows() == 0 ? SparseMatrix(0, n) : p.eq_matrix;
    G = p.ineq_matrix.rows() == 0 ? SparseMatrix(0, n) : p.ineq_matrix;
    A.makeCompressed();
    G.makeCompressed();
    At = A.transpose();
    Gt = G.transpose();
  }
};

// Solves the quasi-definite system
//   [ G^T D G + dp I    A^T   ] [dx]   [r1]
//   [ A                -dd I  ] [z ] = [r2]
// with a couple of refinement sweeps against the unregularized operator.
class KktSolver {
 public:
  explicit KktSolver(const Blocks& blk) : blk_(blk), dim_(blk.n + blk.me) {}

  bool factor(const Vector& d) {
    SparseMatrix h = blk_.Gt * d.asDiagonal() * blk_.G;
    h.makeCompressed();
    hessian_ = h;
    std::vector<Triplet> trip;
    trip.reserve(h.nonZeros() + 2 * blk_.A.nonZeros() + dim_);
    for (Eigen::Index k = 0; k < h.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index k = 0; k < blk_.A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(blk_.A, k); it; ++it) {
        trip.emplace_back(blk_.n + it.row(), it.col(), it.value());
        trip.emplace_back(it.col(), blk_.n + it.row(), it.value());
      }
    for (Eigen::Index i = 0; i < blk_.n; ++i) trip.emplace_back(i, i, kPrimalReg);
    for (Eigen::Index i = 0; i < blk_.me; ++i) trip.emplace_back(blk_.n + i, blk_.n + i, -kDualReg);
    SparseMatrix k(dim_, dim_);
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();

    if (dim_ <= kDenseMaxDim) {
      dense_lu_.compute(Matrix(k));
      return dense_lu_.matrixLU().diagonal().allFinite();
    }
    sparse_lu_.analyzePattern(k);
    sparse_lu_.factorize(k);
    return sparse_lu_.info() == Eigen::Success;
  }

  void solve(const Vector& r1, const Vector& r2, Vector& dx, Vector& z) const {
    Vector rhs(dim_);
    rhs << r1, r2;
    Vector sol = raw_solve(rhs);
    double last = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < 3; ++sweep) {
      const Vector res = rhs - apply(sol);
      const double nrm = inf_norm(res);
      if (!(nrm < last) || nrm == 0.0) break;
      last = nrm;
      sol += raw_solve(res);
    }
    dx = sol.head(blk_.n);
    z = sol.tail(blk_.me);
  }

 private:
  static constexpr double kPrimalReg = 1e-10;
  static constexpr double kDualReg = 1e-10;
  static constexpr Eigen::Index kDenseMaxDim = 1500;

  Vector raw_solve(const Vector& rhs) const {
    if (dim_ <= kDenseMaxDim) return dense_lu_.solve(rhs);
    return sparse_lu_.solve(rhs);
  }

  Vector apply(const Vector& v) const {
    const auto vx = v.head(blk_.n);
    const auto vz = v.tail(blk_.me);
    Vector out(dim_);
    out.head(blk_.n) = hessian_ * vx + blk_.At * vz;
    out.tail(blk_.me) = blk_.A * vx;
    return out;
  }

  const Blocks& blk_;
  Eigen::Index dim_;
  SparseMatrix hessian_;
  Eigen::PartialPivLU<Matrix> dense_lu_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> sparse_lu_;
};

double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

struct Starting {
  Vector x, w, y, lambda;
  bool primal_feasible = false;
  bool dual_feasible = false;
};

// Least-squares constructions that give a strictly feasible point whenever the
// problem offers one along the scanned direction:
//   primal: min ||G x - (h - beta e)||  s.t. A x = b,   w = h - G x
//   dual:   min ||lambda - beta e||     s.t. G^T lambda - A^T y = -c
// Both reduce to the KKT operator with D = I. Either side falls back to a
// shifted (infeasible) point.
Starting starting_point(const Blocks& blk, KktSolver& kkt) {
  Starting s;
  const Vector ones = Vector::Ones(blk.mi);
  kkt.factor(ones);
  Vector xh, zh, xe, ze;
  kkt.solve(blk.Gt * blk.h, blk.b, xh, zh);
  kkt.solve(-(blk.Gt * ones), Vector::Zero(blk.me), xe, ze);
  const Vector wh = blk.h - blk.G * xh;
  const Vector we = -(blk.G * xe);

  double beta = 0.0;
  bool ok = true;
  for (Eigen::Index i = 0; i < blk.mi; ++i) {
    if (wh(i) >= 1.0) continue;
    if (we(i) > 1e-8) {
      beta = std::max(beta, (1.0 - wh(i)) / we(i));
    } else {
      ok = false;
    }
  }
  s.x = xh + beta * xe;
  s.w = blk.h - blk.G * s.x;
  s.primal_feasible = ok && (blk.mi == 0 || s.w.minCoeff() > 0.0);
  if (!s.primal_feasible) {
    const double shift = std::max(1.0, blk.mi ? -s.w.minCoeff() + 1.0 : 1.0);
    s.w = s.w.cwiseMax(shift);
  }

  Vector mu_c, zc, mu_e, ze2;
  kkt.solve(-blk.c, Vector::Zero(blk.me), mu_c, zc);
  kkt.solve(-(blk.Gt * ones), Vector::Zero(blk.me), mu_e, ze2);
  const Vector lc = blk.G * mu_c;
  const Vector le = ones + blk.G * mu_e;
  double gamma = 0.0;
  ok = true;
  for (Eigen::Index i = 0; i < blk.mi; ++i) {
    const double floor = 1e-2;
    if (lc(i) >= floor) continue;
    if (le(i) > 1e-8) {
      gamma = std::max(gamma, (floor - lc(i)) / le(i));
    } else {
      ok = false;
    }
  }
  s.lambda = lc + gamma * le;
  s.y = -(zc + gamma * ze2);
  s.dual_feasible = ok && (blk.mi == 0 || s.lambda.minCoeff() > 0.0);
  if (!s.dual_feasible) s.lambda = s.lambda.cwiseMax(1.0);
  return s;
}

}  // namespace

LpResiduals lp_residuals(const LpProblem& p, const Vector& x, const Vector& y, const Vector& lambda) {
  const Blocks blk(p);
  LpResiduals r;
  const double pscale = 1.0 + std::max(inf_norm(blk.b), inf_norm(blk.h));
  const Vector rp = blk.A * x - blk.b;
  const Vector rg = (blk.G * x - blk.h).cwiseMax(0.0);
  r.primal = std::max(inf_norm(rp), inf_norm(rg)) / pscale;
  const Vector rd = blk.c - blk.At * y + blk.Gt * lambda;
  const double neg = blk.mi ? std::max(0.0, -lambda.minCoeff()) : 0.0;
  r.dual = std::max(inf_norm(rd), neg) / (1.0 + inf_norm(blk.c));
  const double pobj = blk.c.dot(x);
  const double dobj = blk.b.dot(y) - blk.h.dot(lambda);
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
  return r;
}

LpSolution solve_lp_interior_point(const LpProblem& p, const LpSettings& settings) {
  p.validate();
  if (!(settings.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const Blocks blk(p);
  KktSolver kkt(blk);
  LpSolution sol;
  sol.method = "interior-point";

  const double tol = settings.tol;
  const double pscale = 1.0 + std::max(inf_norm(blk.b), inf_norm(blk.h));
  const double dscale = 1.0 + inf_norm(blk.c);

  Starting start = starting_point(blk, kkt);
  Vector x = start.x, w = start.w, y = start.y, lambda = start.lambda;
  sol.feasible_start = start.primal_feasible && start.dual_feasible;

  // Inconsistent equality block: b - A x_ls is a Farkas ray (A^T r = 0, b^T r > 0).
  {
    const Vector r = blk.b - blk.A * start.x;
    if (inf_norm(r) > 1e-6 * pscale) {
      const Vector atr = blk.At * r;
      if (inf_norm(atr) <= 1e-6 * r.squaredNorm()) {
        sol.status = LpStatus::Infeasible;
        sol.x = x;
        sol.eq_dual = r / r.squaredNorm();
        sol.ineq_dual = Vector::Zero(blk.mi);
        sol.primal_residual = inf_norm(r) / pscale;
        return sol;
      }
    }
  }

  auto finish = [&](LpStatus status, int iter) {
    sol.status = status;
    sol.iterations = iter;
    sol.x = x;
    sol.eq_dual = y;
    sol.ineq_dual = lambda;
    sol.objective = blk.c.dot(x);
    sol.dual_objective = blk.b.dot(y) - blk.h.dot(lambda);
    const LpResiduals r = lp_residuals(p, x, y, lambda);
    sol.primal_residual = r.primal;
    sol.dual_residual = r.dual;
    sol.gap = r.gap;
    return sol;
  };

  const double mi = static_cast<double>(std::max<Eigen::Index>(blk.mi, 1));
  for (int iter = 0; iter <= settings.max_iter; ++iter) {
    const Vector rd = blk.c - blk.At * y + blk.Gt * lambda;
    const Vector rp = blk.A * x - blk.b;
    const Vector rg = blk.G * x + w - blk.h;
    const double mu = blk.mi ? w.dot(lambda) / mi : 0.0;
    const double pobj = blk.c.dot(x);
    const double dobj = blk.b.dot(y) - blk.h.dot(lambda);
    const double pres = std::max(inf_norm(rp), inf_norm(rg)) / pscale;
    const double dres = inf_norm(rd) / dscale;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    if (settings.record_trace) {
      sol.trace.push_back({iter, pobj, dobj, pres, dres, mu});
    }
    if (pres <= tol && dres <= tol && gap <= tol && mu <= tol * (1.0 + std::abs(pobj))) {
      return finish(LpStatus::Optimal, iter);
    }
    // Farkas ray from the dual iterate: A^T y - G^T lambda -> 0 relative to b^T y - h^T lambda.
    if (iter > 5 && dobj > 0.0) {
      const double ray = inf_norm(blk.At * y - blk.Gt * lambda) / dobj;
      if (ray <= tol && dobj > 1e6 * dscale * (1.0 + std::abs(pobj))) return finish(LpStatus::Infeasible, iter);
    }
    // Recession direction from the primal iterate: c^T x -> -inf with A x, (G x)_+ bounded.
    if (iter > 5 && pobj < 0.0) {
      const double decay = -pobj;
      const double axr = inf_norm(blk.A * x) / decay;
      const double gxr = (blk.mi ? std::max(0.0, (blk.G * x).maxCoeff()) : 0.0) / decay;
      if (axr <= tol && gxr <= tol && decay > 1e6 * pscale) return finish(LpStatus::Unbounded, iter);
    }
    if (iter == settings.max_iter) break;

    const Vector d = lambda.cwiseQuotient(w);
    if (!kkt.factor(d)) break;

    auto newton = [&](const Vector& rc, Vector& dx, Vector& dy, Vector& dw, Vector& dl) {
      // rc = w o lambda - sigma mu (+ corrector); dlambda = D (G dx + rg - rc / lambda)
      const Vector t = rg - rc.cwiseQuotient(lambda);
      const Vector r1 = -rd - blk.Gt * d.cwiseProduct(t);
      Vector z;
      kkt.solve(r1, -rp, dx, z);
      dy = -z;
      dl = d.cwiseProduct(blk.G * dx + t);
      dw = (-rc - w.cwiseProduct(dl)).cwiseQuotient(lambda);
    };

    Vector dx, dy, dw, dl;
    const Vector wl = w.cwiseProduct(lambda);
    newton(wl, dx, dy, dw, dl);
    const double ap_aff = max_step(w, dw);
    const double ad_aff = max_step(lambda, dl);
    double sigma = 0.0;
    if (blk.mi) {
      const double mu_aff = (w + ap_aff * dw).dot(lambda + ad_aff * dl) / mi;
      sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
    }
    const Vector rc = wl + dw.cwiseProduct(dl) - Vector::Constant(blk.mi, sigma * mu);
    newton(rc, dx, dy, dw, dl);

    const double eta = 0.995;
    const double ap = std::min(1.0, eta * max_step(w, dw));
    const double ad = std::min(1.0, eta * max_step(lambda, dl));
    x += ap * dx;
    w += ap * dw;
    y += ad * dy;
    lambda += ad * dl;
    if (!x.allFinite() || !y.allFinite() || !lambda.allFinite()) break;
  }
  return finish(LpStatus::IterLimit, settings.max_iter);
}

LpSolution solve_lp(const LpProblem& p, const LpSettings& settings) {
  LpSolution ipm = solve_lp_interior_point(p, settings);
  if (ipm.status != LpStatus::IterLimit || !settings.simplex_fallback ||
      p.num_variables() > settings.simplex_max_variables) {
    return ipm;
  }
  LpSolution spx = solve_lp_simplex(p, settings);
  if (spx.status == LpStatus::IterLimit) return ipm;
  spx.trace = std::move(ipm.trace);
  return spx;
}

}  // namespace lyapnet
