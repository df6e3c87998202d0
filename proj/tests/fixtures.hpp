#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <random>

#include "lyapnet/types.hpp"

namespace fixtures {

using lyapnet::Matrix;
using lyapnet::Vector;

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline Matrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
  const Matrix g = gaussian(n, n, rng);
  return g * g.transpose() / static_cast<double>(n) + 0.5 * Matrix::Identity(n, n);
}

// Dense, generally non-normal Hurwitz matrix: shift a Gaussian matrix left of
// its own spectrum using the Gershgorin bound.
inline Matrix random_stable(Eigen::Index n, std::mt19937_64& rng) {
  Matrix a = gaussian(n, n, rng) / std::sqrt(static_cast<double>(n));
  double radius = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, a.row(i).cwiseAbs().sum());
  a.diagonal().array() -= radius + 0.1;
  return a;
}

// Lyapunov oracle straight from the definition: assemble the n^2 x n^2 linear
// map X -> X A^T + A X entrywise and solve against -vec(I).
inline Matrix lyapunov_oracle(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix op = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        op(i + n * j, i + n * k) += a(j, k);  // (X A^T)_ij = sum_k X_ik A_jk
        op(i + n * j, k + n * j) += a(i, k);  // (A X)_ij = sum_k A_ik X_kj
      }
  Vector rhs = Vector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i + n * i) = -1.0;
  const Vector x = op.colPivHouseholderQr().solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

}  // namespace fixtures
