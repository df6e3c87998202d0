#pragma once

// Seeded benchmark over random sparse Hurwitz ground truths: simulate,
// estimate the covariance, reconstruct with each method, score alignment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lyapnet/lp.hpp"
#include "lyapnet/sde.hpp"
#include "lyapnet/transfer_entropy.hpp"
#include "lyapnet/types.hpp"

namespace lyapnet {

/// Cosine similarity of the off-diagonal entries of two matrices.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar alignment(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "alignment: matrices must be square and equal-sized");
  }
  Scalar ab = 0, aa = 0, bb = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i == j) continue;
      ab += a(i, j) * b(i, j);
      aa += a(i, j) * a(i, j);
      bb += b(i, j) * b(i, j);
    }
  }
  if (aa == Scalar(0) || bb == Scalar(0)) {
    throw Error(ErrorCode::ZeroOffDiagonal, "alignment: a matrix has no off-diagonal mass");
  }
  const Scalar r = ab / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(r, Scalar(-1), Scalar(1));
}

enum class Method { FullInfo, TEInfo, NoInfo, Precision, Correlation };

const char* to_string(Method m) noexcept;
Method parse_method(const std::string& s);

enum class CovarianceSource { Empirical, Exact };

struct ExperimentConfig {
  Eigen::Index n = 10;
  std::vector<Eigen::Index> edge_counts{10, 20, 30};
  std::vector<double> epsilons{0.1, 0.3, 0.5, 0.7, 0.9};
  int trials_per_cell = 20;
  std::vector<Dynamics> dynamics{Dynamics::Linear, Dynamics::Tanh};
  std::vector<Method> methods{Method::FullInfo, Method::TEInfo, Method::NoInfo, Method::Precision,
                              Method::Correlation};
  std::uint64_t master_seed = 1;
  std::string output_dir = "results";
  double dt = 0.1;
  Eigen::Index steps = 100000;
  TeConfig te;
  double diagonal_weight = 0.0;
  double ridge = 0.0;
  CovarianceSource covariance = CovarianceSource::Empirical;
  LpSettings lp;
  int workers = 1;

  void validate() const;
};

struct ResultRecord {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  double epsilon = 0;
  Dynamics dynamics = Dynamics::Linear;
  Method method = Method::FullInfo;
  int trial = 0;
  std::uint64_t seed = 0;
  double alignment = 0;
  std::string status;  // "ok" on success
  double wall_time = 0;

  bool ok() const { return status == "ok"; }
};

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

double median(std::vector<double> v);
double mean(const std::vector<double>& v);

/// One-sided two-sample bootstrap on medians: the fraction of resamples in
/// which median(a*) - median(b*) <= 0. Small values support median(a) > median(b).
double bootstrap_median_pvalue(const std::vector<double>& a, const std::vector<double>& b, int resamples,
                               std::uint64_t seed);

/// Alignments of successful records matching the filter.
std::vector<double> select_alignments(const std::vector<ResultRecord>& records, Eigen::Index p, double epsilon,
                                      Dynamics dynamics, Method method);

}  // namespace lyapnet
