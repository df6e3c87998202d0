#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lyapnet/lp.hpp"

namespace lyapnet {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kRelPivot = 1e-7;
constexpr double kRatioTol = 1e-12;

class Tableau {
 public:
  Tableau(Matrix rows, Vector rhs) : t_(rows.rows(), rows.cols() + 1) {
    t_.leftCols(rows.cols()) = rows;
    t_.col(rows.cols()) = rhs;
  }

  Eigen::Index rows() const { return t_.rows(); }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double rhs(Eigen::Index i) const { return t_(i, cols()); }
  double at(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }

  void pivot(Eigen::Index r, Eigen::Index j, Vector& obj, double& obj_value) {
    t_.row(r) /= t_(r, j);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, j) != 0.0) t_.row(i) -= t_(i, j) * t_.row(r);
    }
    const double f = obj(j);
    if (f != 0.0) {
      obj -= f * t_.row(r).head(cols()).transpose();
      obj_value -= f * rhs(r);
    }
  }

 private:
  Matrix t_;
};

enum class PhaseResult { Optimal, Unbounded, IterLimit };

// Minimizes obj over the current tableau. `allowed(j)` filters entering columns.
template <typename Allowed>
PhaseResult run_phase(Tableau& tab, std::vector<Eigen::Index>& basis, Vector& obj, double& obj_value,
                      Allowed allowed, int max_pivots, int& pivots) {
  int degenerate_streak = 0;
  while (pivots < max_pivots) {
    const bool bland = degenerate_streak > 50;
    Eigen::Index enter = -1;
    double best = -1e-10;
    for (Eigen::Index j = 0; j < tab.cols(); ++j) {
      if (!allowed(j) || obj(j) >= -1e-10) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (obj(j) < best) {
        best = obj(j);
        enter = j;
      }
    }
    if (enter < 0) return PhaseResult::Optimal;

    // Pivot candidates must be large relative to the entering column. Among
    // (near-)ties in the ratio test Dantzig mode takes the largest pivot, Bland
    // mode the lowest basic index.
    double col_max = 0.0;
    for (Eigen::Index i = 0; i < tab.rows(); ++i) col_max = std::max(col_max, std::abs(tab.at(i, enter)));
    const double pivot_floor = std::max(kPivotEps, kRelPivot * col_max);
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      const double a = tab.at(i, enter);
      if (a > pivot_floor) ratio = std::min(ratio, std::max(0.0, tab.rhs(i)) / a);
    }
    Eigen::Index leave = -1;
    for (Eigen::Index i = 0; i < tab.rows() && std::isfinite(ratio); ++i) {
      const double a = tab.at(i, enter);
      if (a <= pivot_floor) continue;
      const double r = std::max(0.0, tab.rhs(i)) / a;
      if (r > ratio + kRatioTol * (1.0 + ratio)) continue;
      if (leave < 0) {
        leave = i;
      } else if (bland ? basis[i] < basis[leave] : a > tab.at(leave, enter)) {
        leave = i;
      }
    }
    if (leave < 0) return PhaseResult::Unbounded;
    degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;
    tab.pivot(leave, enter, obj, obj_value);
    basis[leave] = enter;
    ++pivots;
  }
  return PhaseResult::IterLimit;
}

}  // namespace

LpSolution solve_lp_simplex(const LpProblem& p, const LpSettings& settings) {
  p.validate();
  const Eigen::Index n = p.num_variables();
  const Eigen::Index me = p.eq_matrix.rows();
  const Eigen::Index mi = p.ineq_matrix.rows();
  const Eigen::Index m = me + mi;
  const Eigen::Index nstd = 2 * n + mi;  // x+, x-, slacks

  // [A -A 0; G -G I] z = [b; h], z >= 0, rows flipped to a non-negative rhs.
  Matrix std_rows = Matrix::Zero(m, nstd);
  Vector rhs(m);
  if (me) {
    const Matrix a = Matrix(p.eq_matrix);
    std_rows.block(0, 0, me, n) = a;
    std_rows.block(0, n, me, n) = -a;
    rhs.head(me) = p.eq_rhs;
  }
  if (mi) {
    const Matrix g = Matrix(p.ineq_matrix);
    std_rows.block(me, 0, mi, n) = g;
    std_rows.block(me, n, mi, n) = -g;
    std_rows.block(me, 2 * n, mi, mi).setIdentity();
    rhs.tail(mi) = p.ineq_rhs;
  }
  Vector sign = Vector::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (rhs(i) < 0.0) {
      sign(i) = -1.0;
      std_rows.row(i) *= -1.0;
      rhs(i) *= -1.0;
    }
  }
  Vector cost = Vector::Zero(nstd);
  cost.head(n) = p.costs;
  cost.segment(n, n) = -p.costs;

  Matrix full(m, nstd + m);
  full << std_rows, Matrix::Identity(m, m);
  Tableau tab(full, rhs);
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = nstd + i;

  LpSolution sol;
  sol.method = "simplex";
  const int max_pivots = std::max(1000, 50 * static_cast<int>(m + nstd));
  int pivots = 0;

  // Phase 1: minimize the artificial sum.
  Vector obj = Vector::Zero(nstd + m);
  double obj_value = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    obj.head(nstd) -= full.row(i).head(nstd).transpose();
    obj_value -= rhs(i);
  }
  auto any = [](Eigen::Index) { return true; };
  PhaseResult res = run_phase(tab, basis, obj, obj_value, any, max_pivots, pivots);
  sol.iterations = pivots;
  if (res == PhaseResult::IterLimit) {
    sol.status = LpStatus::IterLimit;
    sol.x = Vector::Zero(n);
    return sol;
  }
  const double rhs_scale = 1.0 + (m ? rhs.cwiseAbs().maxCoeff() : 0.0);
  if (-obj_value > std::max(settings.tol, 1e-9) * rhs_scale) {
    sol.status = LpStatus::Infeasible;
    sol.x = Vector::Zero(n);
    return sol;
  }
  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < nstd) continue;
    for (Eigen::Index j = 0; j < nstd; ++j) {
      if (std::abs(tab.at(i, j)) > 1e-9) {
        tab.pivot(i, j, obj, obj_value);
        basis[i] = j;
        break;
      }
    }
  }

  // Phase 2.
  obj.setZero();
  obj.head(nstd) = cost;
  obj_value = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double cb = basis[i] < nstd ? cost(basis[i]) : 0.0;
    if (cb == 0.0) continue;
    for (Eigen::Index j = 0; j < nstd + m; ++j) obj(j) -= cb * tab.at(i, j);
    obj_value -= cb * tab.rhs(i);
  }
  auto structural = [nstd](Eigen::Index j) { return j < nstd; };
  res = run_phase(tab, basis, obj, obj_value, structural, max_pivots, pivots);
  sol.iterations = pivots;

  Vector z = Vector::Zero(nstd);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < nstd) z(basis[i]) = std::max(0.0, tab.rhs(i));
  sol.x = z.head(n) - z.segment(n, n);
  sol.objective = p.costs.dot(sol.x);
  if (res == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  if (res == PhaseResult::IterLimit) {
    sol.status = LpStatus::IterLimit;
    return sol;
  }

  // Duals from B^T pi = c_B on the (flipped) standard-form columns.
  Matrix bmat(m, m);
  Vector cb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < nstd) {
      bmat.col(i) = std_rows.col(basis[i]);
      cb(i) = cost(basis[i]);
    } else {
      bmat.col(i) = Vector::Unit(m, basis[i] - nstd);
      cb(i) = 0.0;
    }
  }
  Vector pi = m ? Vector(bmat.transpose().fullPivLu().solve(cb)) : Vector();
  pi = pi.cwiseProduct(sign);
  sol.eq_dual = pi.head(me);
  sol.ineq_dual = -pi.tail(mi);
  sol.dual_objective = p.eq_rhs.dot(sol.eq_dual) - p.ineq_rhs.dot(sol.ineq_dual);
  const LpResiduals r = lp_residuals(p, sol.x, sol.eq_dual, sol.ineq_dual);
  sol.primal_residual = r.primal;
  sol.dual_residual = r.dual;
  sol.gap = r.gap;
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace lyapnet
