#pragma once

// L1 selection of a sparse member of the solution set, posed as the LP
//
//   minimize    sum u
//   subject to  [0 | M] (u, v) = b
//               [-I  diag(Z); -I -diag(Z)] (u, v) <= 0
//
// over u, v in R^{n^2} (column-stacked). Z weights each entry's |v|; a zero
// weight exempts an entry (known edge or self-loop) from the penalty.

#include <utility>
#include <vector>

#include "lyapnet/lp.hpp"
#include "lyapnet/solution_space.hpp"

namespace lyapnet {

struct PriorMask {
  Eigen::Index n = 0;
  Vector z;  // length n^2, column-stacked, entries in [0, 1]
  double weight(Eigen::Index i, Eigen::Index j) const { return z(full_index(i, j, n)); }
};

/// Matrix position (row i, column j): the edge j -> i.
using EdgePosition = std::pair<Eigen::Index, Eigen::Index>;

/// Z = 0 on known edges, 1 elsewhere off the diagonal, `diagonal_weight` on the diagonal.
PriorMask priors_from_edges(const std::vector<EdgePosition>& known, Eigen::Index n,
                            double diagonal_weight = 0.0);

/// No prior knowledge: every off-diagonal entry penalized.
PriorMask no_info_priors(Eigen::Index n, double diagonal_weight = 0.0);

/// Exact support of `a` (off-diagonal nonzeros) as known edges.
PriorMask full_info_priors(const Matrix& a, double diagonal_weight = 0.0);

LpProblem assemble_lp(const ConstraintSystem& cs, const PriorMask& mask);

struct ReconstructionResult {
  Matrix a_hat;
  double objective = 0;    // LP objective, sum u
  double weighted_l1 = 0;  // sum Z |v| evaluated on a_hat
  LpStatus lp_status = LpStatus::IterLimit;
  double membership_residual = 0;
  int iterations = 0;
  double wall_time = 0;  // seconds
  std::string method;
};

ReconstructionResult reconstruct(const ConstraintSystem& cs, const PriorMask& mask,
                                 const LpSettings& settings = {});

/// Full pipeline from a covariance estimate: decompose, build constraints, solve.
ReconstructionResult reconstruct(const Matrix& gamma, const PriorMask& mask,
                                 const LpSettings& settings = {});

}  // namespace lyapnet
