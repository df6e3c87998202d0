#pragma once

// Linear programs over free variables x in R^N:
//
//   minimize    c^T x
//   subject to  A x  = b      (equality block)
//               G x <= h      (inequality block)
//
// Dual multipliers follow the Lagrangian c - A^T y + G^T lambda = 0 with
// lambda >= 0, so the dual objective is b^T y - h^T lambda.

#include <string>
#include <vector>

#include "lyapnet/types.hpp"

namespace lyapnet {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(LpStatus status) noexcept;

struct LpProblem {
  Vector costs;
  SparseMatrix eq_matrix;
  Vector eq_rhs;
  SparseMatrix ineq_matrix;
  Vector ineq_rhs;

  Eigen::Index num_variables() const { return costs.size(); }
  /// Throws DimensionMismatch / InvalidArgument on malformed input.
  void validate() const;
};

/// One interior-point iterate, as seen before the step is taken.
struct LpIterate {
  int iteration = 0;
  double primal_objective = 0;
  double dual_objective = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double mu = 0;
};

struct LpSettings {
  double tol = 1e-8;
  int max_iter = 200;
  bool record_trace = false;
  // Dense simplex is tried when the interior-point method stalls and N is small.
  bool simplex_fallback = true;
  Eigen::Index simplex_max_variables = 200;
};

struct LpSolution {
  LpStatus status = LpStatus::IterLimit;
  Vector x;
  Vector eq_dual;    // y
  Vector ineq_dual;  // lambda >= 0
  double objective = 0;
  double dual_objective = 0;
  double primal_residual = 0;  // relative
  double dual_residual = 0;    // relative
  double gap = 0;              // relative duality gap
  int iterations = 0;
  bool feasible_start = false;
  std::string method;
  std::vector<LpIterate> trace;
};

struct LpResiduals {
  double primal = 0;  // max(||Ax-b||, ||(Gx-h)_+||) / (1 + max(||b||, ||h||))
  double dual = 0;    // ||c - A^T y + G^T lambda|| / (1 + ||c||), plus negative part of lambda
  double gap = 0;     // |c^T x - (b^T y - h^T lambda)| / (1 + |c^T x|)
};

LpResiduals lp_residuals(const LpProblem& p, const Vector& x, const Vector& y, const Vector& lambda);

/// Interior point first, simplex fallback per settings.
LpSolution solve_lp(const LpProblem& p, const LpSettings& settings = {});

/// Mehrotra predictor-corrector on the regularized KKT system.
LpSolution solve_lp_interior_point(const LpProblem& p, const LpSettings& settings = {});

/// Dense two-phase simplex on the standard-form image of the problem.
LpSolution solve_lp_simplex(const LpProblem& p, const LpSettings& settings = {});

}  // namespace lyapnet
