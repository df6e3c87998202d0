#pragma once

// The affine set S of state matrices sharing one covariance Gamma = U C U^T.
// In the rotated frame Abar = U^T A U the Lyapunov equation pins
//   Abar_ii = -1 / (2 c_i),   c_j Abar_ij + c_i Abar_ji = 0   (i != j),
// which leaves n(n-1)/2 free parameters. The same identities written on
// vec(A) give the linear system M vec(A) = b used by the recovery LP.
//
// Index conventions (0-based):
//   upper_index(i, j, n)  row of the pair (i, j), i <= j, row-major over the
//                         upper triangle: i*n - i(i-1)/2 + (j - i)
//   full_index(l, k, n)   column-stack position of entry (l, k): n*k + l

#include <cstdint>

#include "lyapnet/lyapunov.hpp"
#include "lyapnet/types.hpp"

namespace lyapnet {

using Spectral = SpectralDecomposition<double>;

Eigen::Index upper_index(Eigen::Index i, Eigen::Index j, Eigen::Index n);
Eigen::Index full_index(Eigen::Index l, Eigen::Index k, Eigen::Index n);

inline Eigen::Index upper_count(Eigen::Index n) { return n * (n + 1) / 2; }
inline Eigen::Index free_parameter_count(Eigen::Index n) { return n * (n - 1) / 2; }

/// Column-stack vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Eigen::Index n);

struct ConstraintSystem {
  Eigen::Index n = 0;
  SparseMatrix M;  // n(n+1)/2 x n^2
  Vector b;        // n(n+1)/2
};

/// Entries of M with magnitude below this are dropped.
inline constexpr double kConstraintDropTolerance = 1e-14;

ConstraintSystem build_constraints(const Spectral& dec);

/// ||M vec(A) - b||_inf; zero (to rounding) iff A lies in the solution set.
double membership_residual(const ConstraintSystem& cs, const Matrix& a);

/// Maps the strictly-lower triangle of Abar (row-major over i > j) to a
/// member of the solution set: A = U Abar U^T.
Matrix solution_from_parameters(const Spectral& dec, const Vector& free);

struct SampleOptions {
  double scale = 1.0;
  std::uint64_t seed = 0;
  bool require_hurwitz = false;  // rejection-sample stable members
  int max_retries = 1000;
};

/// Random member of the solution set; free parameters are i.i.d. N(0, scale^2).
Matrix sample_solution(const Spectral& dec, const SampleOptions& opts);

}  // namespace lyapnet
