#pragma once

// Linear-Gaussian transfer entropy and greedy source selection for edge
// priors. TE from source X to target Y given a conditioning set K is
//   I( X_past ; Y_t | Y_past, K_past )
// evaluated in closed form from the lagged sample covariance, with
// past = (t-1, ..., t-lag).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyapnet/sde.hpp"
#include "lyapnet/sparse_recovery.hpp"
#include "lyapnet/types.hpp"

namespace lyapnet {

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

struct TeConfig {
  int lag = 1;
  int max_sources_per_target = 5;
  int n_surrogates = 10;
  double surrogate_k = 3.0;
  std::uint64_t seed = 0;
  std::optional<Index> max_total_edges;  // unset: no global cap

  void validate() const;
};

/// 1/2 ln( det S_xz det S_yz / (det S_z det S_xyz) ) over index blocks of
/// `cov`. An empty z gives plain mutual information.
double gaussian_cmi(const Matrix& cov, const IndexList& x, const IndexList& y, const IndexList& z);

/// Lagged covariance of a series, computed once and shared by all queries.
class TeEstimator {
 public:
  TeEstimator(const TimeSeries& ts, int lag);

  Index channels() const { return n_; }
  Index samples() const { return samples_; }
  int lag() const { return lag_; }
  const Matrix& covariance() const { return cov_; }

  double conditional_te(Index source, Index target, const IndexList& cond) const;

  /// TE with the source circularly shifted by `offset` samples.
  double shifted_te(Index source, Index target, const IndexList& cond, Index offset) const;

  /// mean + k * stddev of TE over circularly shifted sources.
  double surrogate_threshold(Index source, Index target, const IndexList& cond, const TeConfig& cfg) const;

 private:
  Index var(int delay, Index channel) const { return delay * n_ + channel; }
  void check_query(Index source, Index target, const IndexList& cond) const;

  Index n_ = 0;
  int lag_ = 1;
  Index length_ = 0;   // raw series length T
  Index samples_ = 0;  // T - lag
  Matrix centered_;    // (lag+1) n x samples, row var(d, c) = x_c(t - d) centered
  Matrix raw_;         // n x T
  Matrix cov_;
};

struct SourceScore {
  Index source = 0;
  double te_nats = 0;
  double threshold = 0;
};

struct InferredEdge {
  Index source = 0;
  Index target = 0;
  double te_nats = 0;
};

struct EdgeSet {
  std::vector<InferredEdge> edges;
  std::vector<std::string> warnings;

  /// Matrix positions (target, source) for priors_from_edges.
  std::vector<EdgePosition> positions() const;
};

double conditional_te(const TimeSeries& ts, Index source, Index target, const IndexList& cond,
                      const TeConfig& cfg);
double surrogate_threshold(const TimeSeries& ts, Index source, Index target, const IndexList& cond,
                           const TeConfig& cfg);

/// Greedy forward selection: repeatedly add the candidate with the largest TE
/// conditioned on the sources picked so far, while it beats its surrogate
/// threshold and the per-target cap allows.
std::vector<SourceScore> greedy_infer_sources(const TeEstimator& est, Index target, const TeConfig& cfg);
std::vector<SourceScore> greedy_infer_sources(const TimeSeries& ts, Index target, const TeConfig& cfg);

EdgeSet infer_edges(const TimeSeries& ts, const TeConfig& cfg);

}  // namespace lyapnet
