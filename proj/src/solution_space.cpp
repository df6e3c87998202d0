#include "lyapnet/solution_space.hpp"

#include <random>
#include <vector>

namespace lyapnet {

Eigen::Index upper_index(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
  if (n <= 0 || i < 0 || j < 0 || i >= n || j >= n) {
    throw Error(ErrorCode::IndexOutOfRange, "upper_index: node out of range");
  }
  if (i > j) throw Error(ErrorCode::InvalidPair, "upper_index: requires i <= j");
  return i * n - i * (i - 1) / 2 + (j - i);
}

Eigen::Index full_index(Eigen::Index l, Eigen::Index k, Eigen::Index n) {
  if (n <= 0 || l < 0 || k < 0 || l >= n || k >= n) {
    throw Error(ErrorCode::IndexOutOfRange, "full_index: node out of range");
  }
  return n * k + l;
}

Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

Matrix unvec(const Vector& v, Eigen::Index n) {
  if (v.size() != n * n) throw Error(ErrorCode::DimensionMismatch, "unvec: length is not n^2");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

ConstraintSystem build_constraints(const Spectral& dec) {
  const Eigen::Index n = dec.size();
  if (n == 0 || dec.U.rows() != n || dec.U.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "build_constraints: malformed decomposition");
  }
  if ((dec.c.array() <= 0.0).any()) {
    throw Error(ErrorCode::NotPositiveDefinite, "build_constraints: non-positive eigenvalue");
  }

  ConstraintSystem cs;
  cs.n = n;
  cs.b = Vector::Zero(upper_count(n));
  std::vector<Triplet> triplets;

  // Row (i, j) as an n x n coefficient matrix over A, read out column-stacked.
  //   i != j : c_j u_i u_j^T + c_i u_j u_i^T
  //   i == j : u_i u_i^T
  Matrix coeff(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Eigen::Index row = upper_index(i, j, n);
      if (i == j) {
        coeff.noalias() = dec.U.col(i) * dec.U.col(i).transpose();
        cs.b(row) = -1.0 / (2.0 * dec.c(i));
      } else {
        coeff.noalias() = dec.c(j) * dec.U.col(i) * dec.U.col(j).transpose();
        coeff.noalias() += dec.c(i) * dec.U.col(j) * dec.U.col(i).transpose();
      }
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
          const double value = coeff(l, k);
          if (std::abs(value) > kConstraintDropTolerance) {
            triplets.emplace_back(row, full_index(l, k, n), value);
          }
        }
      }
    }
  }
  cs.M.resize(upper_count(n), n * n);
  cs.M.setFromTriplets(triplets.begin(), triplets.end());
  cs.M.makeCompressed();
  return cs;
}

double membership_residual(const ConstraintSystem& cs, const Matrix& a) {
  if (a.rows() != cs.n || a.cols() != cs.n) {
    throw Error(ErrorCode::DimensionMismatch, "membership_residual: matrix size does not match");
  }
  const Vector r = cs.M * vec(a) - cs.b;
  return max_abs(r);
}

Matrix solution_from_parameters(const Spectral& dec, const Vector& free) {
  const Eigen::Index n = dec.size();
  if (free.size() != free_parameter_count(n)) {
    throw Error(ErrorCode::DimensionMismatch, "solution_from_parameters: need n(n-1)/2 parameters");
  }
  Matrix abar(n, n);
  Eigen::Index next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    abar(i, i) = -1.0 / (2.0 * dec.c(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      abar(i, j) = free(next++);
      abar(j, i) = -(dec.c(j) / dec.c(i)) * abar(i, j);
    }
  }
  return dec.U * abar * dec.U.transpose();
}

Matrix sample_solution(const Spectral& dec, const SampleOptions& opts) {
  if (!(opts.scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample_solution: scale must be > 0");
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, opts.scale);
  const Eigen::Index m = free_parameter_count(dec.size());
  const int attempts = opts.require_hurwitz ? opts.max_retries : 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Vector free(m);
    for (Eigen::Index k = 0; k < m; ++k) free(k) = normal(rng);
    Matrix a = solution_from_parameters(dec, free);
    if (!opts.require_hurwitz || is_hurwitz(a)) return a;
  }
  throw Error(ErrorCode::RetryExhausted, "sample_solution: no Hurwitz sample within retry cap");
}

}  // namespace lyapnet
