#pragma once

// Dense linear algebra around the covariance Lyapunov equation
//
//     Gamma * A^T + A * Gamma = -I
//
// linking a Hurwitz state matrix A to the stationary covariance Gamma of
// dx/dt = A x + w with unit white noise. All functions are templated on the
// Eigen expression type so float, double and long double all work.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lyapnet/types.hpp"

namespace lyapnet {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Above this size the forward solve switches from the n^2 x n^2 Kronecker
// system to a Schur-based reduction.
inline constexpr Eigen::Index kKroneckerSolveMaxN = 20;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
  }
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, const char* what) {
  using Real = typename Derived::RealScalar;
  const Real scale = std::max<Real>(Real(1e-300), max_abs(m));
  if (max_abs(m - m.transpose()) > Real(1e-10) * scale) {
    throw Error(ErrorCode::NotSymmetric, std::string(what) + " is not symmetric");
  }
}

}  // namespace detail

/// Largest real part over the eigenvalues of `a`.
template <typename Derived>
typename Derived::Scalar spectral_abscissa(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(a, "state matrix");
  Eigen::EigenSolver<DenseMatrix<Scalar>> solver(a.eval(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Singular, "eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

/// True iff every eigenvalue of `a` has real part strictly below -margin.
template <typename Derived>
bool is_hurwitz(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar margin = 0) {
  return spectral_abscissa(a) < -margin;
}

/// ||Gamma A^T + A Gamma + I|| (largest absolute entry).
template <typename DerivedA, typename DerivedG>
typename DerivedA::Scalar lyapunov_residual(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedG>& gamma) {
  using Scalar = typename DerivedA::Scalar;
  const DenseMatrix<Scalar> r =
      gamma * a.transpose() + a * gamma + DenseMatrix<Scalar>::Identity(a.rows(), a.cols());
  return max_abs(r);
}

/// Forward solve through vec(Gamma) = -(I (x) A + A (x) I)^{-1} vec(I).
/// No stability check; callers go through forward_lyapunov_solve.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> solve_lyapunov_kronecker(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  const Eigen::Index n2 = n * n;
  DenseMatrix<Scalar> kron = DenseMatrix<Scalar>::Zero(n2, n2);
  // (I (x) A)_{n r + v, n s + w} = delta_rs A_vw ; (A (x) I) = A_rs delta_vw
  for (Eigen::Index r = 0; r < n; ++r) {
    kron.block(r * n, r * n, n, n) += a;
    for (Eigen::Index s = 0; s < n; ++s) {
      kron.block(r * n, s * n, n, n).diagonal().array() += a(r, s);
    }
  }
  DenseVector<Scalar> rhs = DenseVector<Scalar>::Zero(n2);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i * n + i) = Scalar(-1);

  Eigen::FullPivLU<DenseMatrix<Scalar>> lu(kron);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::Singular, "Kronecker Lyapunov system is singular");
  }
  const DenseVector<Scalar> vec_gamma = lu.solve(rhs);
  DenseMatrix<Scalar> gamma = Eigen::Map<const DenseMatrix<Scalar>>(vec_gamma.data(), n, n);
  return (gamma + gamma.transpose()) / Scalar(2);
}

/// Bartels-Stewart style solve on the complex Schur form A = Q T Q^H:
/// T Y + Y T^H = -I with Y = Q^H Gamma Q, solved column by column from the right.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> solve_lyapunov_schur(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  using CMatrix = DenseMatrix<Complex>;
  using CVector = DenseVector<Complex>;
  const Eigen::Index n = a.rows();

  Eigen::ComplexSchur<DenseMatrix<Scalar>> schur(a.eval());
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::Singular, "Schur decomposition did not converge");
  }
  const CMatrix& t = schur.matrixT();
  const CMatrix& q = schur.matrixU();

  CMatrix y = CMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    CVector rhs = CVector::Zero(n);
    rhs(j) = Complex(-1);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    CMatrix shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(shifted(i, i)) == Scalar(0)) {
        throw Error(ErrorCode::Singular, "Lyapunov operator is singular");
      }
    }
    y.col(j) = shifted.template triangularView<Eigen::Upper>().solve(rhs);
  }
  DenseMatrix<Scalar> gamma = (q * y * q.adjoint()).real();
  return (gamma + gamma.transpose()) / Scalar(2);
}

/// Stationary covariance of dx/dt = A x + w for Hurwitz A.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> forward_lyapunov_solve(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "state matrix");
  if (!is_hurwitz(a)) {
    throw Error(ErrorCode::NotHurwitz, "state matrix has an eigenvalue with non-negative real part");
  }
  return a.rows() <= kKroneckerSolveMaxN ? solve_lyapunov_kronecker(a) : solve_lyapunov_schur(a);
}

/// Gamma = U diag(c) U^T with eigenvalues in descending order.
template <typename Scalar>
struct SpectralDecomposition {
  DenseMatrix<Scalar> U;
  DenseVector<Scalar> c;

  Eigen::Index size() const { return c.size(); }
  DenseMatrix<Scalar> reassemble() const { return U * c.asDiagonal() * U.transpose(); }
};

template <typename Derived>
SpectralDecomposition<typename Derived::Scalar> spectral_decompose(
    const Eigen::MatrixBase<Derived>& gamma) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(gamma, "covariance matrix");
  detail::require_symmetric(gamma, "covariance matrix");
  const Eigen::Index n = gamma.rows();

  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(gamma.eval());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
  }
  // Eigen returns ascending order.
  SpectralDecomposition<Scalar> dec;
  dec.c = solver.eigenvalues().reverse();
  dec.U = solver.eigenvectors().rowwise().reverse();

  const Scalar floor = std::numeric_limits<Scalar>::epsilon() * Scalar(n) *
                       std::max(Scalar(1e-300), std::abs(dec.c(0)));
  if (!(dec.c(n - 1) > floor)) {
    throw Error(ErrorCode::NotPositiveDefinite, "covariance matrix is not positive definite");
  }
  return dec;
}

/// Sample covariance of an n x T series (one row per channel), divisor T-1,
/// symmetrized exactly.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> empirical_covariance(const Eigen::MatrixBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = series.rows();
  const Eigen::Index t = series.cols();
  if (n == 0 || t < n + 1) {
    throw Error(ErrorCode::InsufficientData, "need at least n+1 samples for covariance");
  }
  const DenseVector<Scalar> mean = series.rowwise().mean();
  const DenseMatrix<Scalar> centered = series.colwise() - mean;
  DenseMatrix<Scalar> s = DenseMatrix<Scalar>(n, n).setZero();
  s.template selfadjointView<Eigen::Lower>().rankUpdate(centered);
  s = s.template selfadjointView<Eigen::Lower>();
  s /= Scalar(t - 1);
  return (s + s.transpose()) / Scalar(2);
}

/// Symmetric solution of the Lyapunov equation, -Gamma^{-1} / 2.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> precision_baseline(const Eigen::MatrixBase<Derived>& gamma) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(gamma, "covariance matrix");
  Eigen::LLT<DenseMatrix<Scalar>> llt(gamma.eval());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Singular, "covariance matrix is not invertible");
  }
  const Eigen::Index n = gamma.rows();
  DenseMatrix<Scalar> inv = llt.solve(DenseMatrix<Scalar>::Identity(n, n));
  inv = (inv + inv.transpose()) / Scalar(2);
  return Scalar(-0.5) * inv;
}

/// D^{-1/2} Gamma D^{-1/2} with D = diag(Gamma).
template <typename Derived>
DenseMatrix<typename Derived::Scalar> correlation_baseline(const Eigen::MatrixBase<Derived>& gamma) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(gamma, "covariance matrix");
  const DenseVector<Scalar> d = gamma.diagonal();
  if ((d.array() <= Scalar(0)).any()) {
    throw Error(ErrorCode::DegenerateVariance, "covariance matrix has a non-positive variance");
  }
  const DenseVector<Scalar> inv_sqrt = d.array().rsqrt();
  return inv_sqrt.asDiagonal() * gamma * inv_sqrt.asDiagonal();
}

}  // namespace lyapnet
