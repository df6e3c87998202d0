#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lyapnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class ErrorCode {
  NotHurwitz,
  Singular,
  NotPositiveDefinite,
  NotSymmetric,
  InsufficientData,
  DegenerateVariance,
  IndexOutOfRange,
  InvalidPair,
  DimensionMismatch,
  SelfLoopInPriors,
  InvalidArgument,
  NonPositiveAbscissa,
  RetryExhausted,
  Blowup,
  SingularBlock,
  ZeroOffDiagonal,
  Infeasible,
  IterLimit,
  IoError,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Largest absolute entry. Used as the matrix "infinity norm" throughout,
// so tolerances read element-wise.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

}  // namespace lyapnet
