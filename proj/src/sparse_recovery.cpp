#include "lyapnet/sparse_recovery.hpp"

#include <chrono>

namespace lyapnet {

namespace {

void check_mask(const PriorMask& mask) {
  if (mask.z.size() != mask.n * mask.n) {
    throw Error(ErrorCode::DimensionMismatch, "prior mask must have n^2 entries");
  }
  if ((mask.z.array() < 0.0).any() || (mask.z.array() > 1.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "prior weights must lie in [0, 1]");
  }
}

void check_diagonal_weight(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::InvalidArgument, "diagonal weight must lie in [0, 1]");
}

}  // namespace

PriorMask no_info_priors(Eigen::Index n, double diagonal_weight) {
  return priors_from_edges({}, n, diagonal_weight);
}

PriorMask priors_from_edges(const std::vector<EdgePosition>& known, Eigen::Index n, double diagonal_weight) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "priors need n > 0");
  check_diagonal_weight(diagonal_weight);
  PriorMask mask;
  mask.n = n;
  mask.z = Vector::Ones(n * n);
  for (Eigen::Index i = 0; i < n; ++i) mask.z(full_index(i, i, n)) = diagonal_weight;
  for (const auto& [i, j] : known) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "prior edge outside [0, n)");
    }
    if (i == j) throw Error(ErrorCode::SelfLoopInPriors, "self-loop in prior edge set");
    mask.z(full_index(i, j, n)) = 0.0;
  }
  return mask;
}

PriorMask full_info_priors(const Matrix& a, double diagonal_weight) {
  std::vector<EdgePosition> support;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j && a(i, j) != 0.0) support.emplace_back(i, j);
  return priors_from_edges(support, a.rows(), diagonal_weight);
}

LpProblem assemble_lp(const ConstraintSystem& cs, const PriorMask& mask) {
  check_mask(mask);
  const Eigen::Index n2 = cs.n * cs.n;
  if (mask.n != cs.n || cs.M.cols() != n2) {
    throw Error(ErrorCode::DimensionMismatch, "prior mask and constraint system disagree on n");
  }
  LpProblem lp;
  lp.costs = Vector::Zero(2 * n2);
  lp.costs.head(n2).setOnes();

  std::vector<Triplet> eq;
  eq.reserve(cs.M.nonZeros());
  for (Eigen::Index k = 0; k < cs.M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(cs.M, k); it; ++it) eq.emplace_back(it.row(), n2 + it.col(), it.value());
  lp.eq_matrix.resize(cs.M.rows(), 2 * n2);
  lp.eq_matrix.setFromTriplets(eq.begin(), eq.end());
  lp.eq_rhs = cs.b;

  std::vector<Triplet> ub;
  ub.reserve(4 * n2);
  for (Eigen::Index k = 0; k < n2; ++k) {
    ub.emplace_back(k, k, -1.0);
    ub.emplace_back(n2 + k, k, -1.0);
    if (mask.z(k) != 0.0) {
      ub.emplace_back(k, n2 + k, mask.z(k));
      ub.emplace_back(n2 + k, n2 + k, -mask.z(k));
    }
  }
  lp.ineq_matrix.resize(2 * n2, 2 * n2);
  lp.ineq_matrix.setFromTriplets(ub.begin(), ub.end());
  lp.ineq_rhs = Vector::Zero(2 * n2);
  return lp;
}

ReconstructionResult reconstruct(const ConstraintSystem& cs, const PriorMask& mask, const LpSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  const LpProblem lp = assemble_lp(cs, mask);
  const LpSolution sol = solve_lp(lp, settings);
  const Eigen::Index n2 = cs.n * cs.n;

  ReconstructionResult out;
  out.lp_status = sol.status;
  out.iterations = sol.iterations;
  out.method = sol.method;
  out.objective = sol.objective;
  const Vector v = sol.x.tail(n2);
  out.a_hat = unvec(v, cs.n);
  out.weighted_l1 = mask.z.dot(v.cwiseAbs());
  out.membership_residual = membership_residual(cs, out.a_hat);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ReconstructionResult reconstruct(const Matrix& gamma, const PriorMask& mask, const LpSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  const ConstraintSystem cs = build_constraints(spectral_decompose(gamma));
  ReconstructionResult out = reconstruct(cs, mask, settings);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace lyapnet
