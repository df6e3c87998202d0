#include "lyapnet/transfer_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "lyapnet/seed.hpp"

namespace lyapnet {

void TeConfig::validate() const {
  if (lag < 1) throw Error(ErrorCode::InvalidArgument, "TE: lag must be >= 1");
  if (max_sources_per_target < 0) throw Error(ErrorCode::InvalidArgument, "TE: source cap must be >= 0");
  if (n_surrogates < 0) throw Error(ErrorCode::InvalidArgument, "TE: n_surrogates must be >= 0");
  if (!(surrogate_k >= 0.0)) throw Error(ErrorCode::InvalidArgument, "TE: surrogate_k must be >= 0");
  if (max_total_edges && *max_total_edges < 0) throw Error(ErrorCode::InvalidArgument, "TE: edge cap must be >= 0");
}

namespace {

double log_det(const Matrix& cov, const IndexList& idx) {
  if (idx.empty()) return 0.0;
  const Matrix block = cov(idx, idx);
  Eigen::LLT<Matrix> llt(block);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularBlock, "covariance block is not positive definite");
  }
  const Vector diag = llt.matrixLLT().diagonal();
  return 2.0 * diag.array().log().sum();
}

IndexList concat(const IndexList& a, const IndexList& b) {
  IndexList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double gaussian_cmi(const Matrix& cov, const IndexList& x, const IndexList& y, const IndexList& z) {
  if (cov.rows() != cov.cols()) throw Error(ErrorCode::DimensionMismatch, "gaussian_cmi: covariance must be square");
  for (const IndexList* part : {&x, &y, &z})
    for (const Index i : *part)
      if (i < 0 || i >= cov.rows()) throw Error(ErrorCode::IndexOutOfRange, "gaussian_cmi: index out of range");
  if (x.empty() || y.empty()) throw Error(ErrorCode::InvalidArgument, "gaussian_cmi: empty variable block");
  const IndexList xz = concat(x, z);
  const IndexList yz = concat(y, z);
  const IndexList xyz = concat(x, yz);
  return 0.5 * (log_det(cov, xz) + log_det(cov, yz) - log_det(cov, z) - log_det(cov, xyz));
}

TeEstimator::TeEstimator(const TimeSeries& ts, int lag)
    : n_(ts.channels()), lag_(lag), length_(ts.length()), raw_(ts.data) {
  if (lag < 1) throw Error(ErrorCode::InvalidArgument, "TE: lag must be >= 1");
  if (n_ == 0 || length_ <= lag + 2) throw Error(ErrorCode::InsufficientData, "TE: series too short for lag");
  samples_ = length_ - lag;
  centered_.resize((lag + 1) * n_, samples_);
  for (int d = 0; d <= lag; ++d) {
    centered_.middleRows(d * n_, n_) = raw_.middleCols(lag - d, samples_);
  }
  const Vector mean = centered_.rowwise().mean();
  centered_.colwise() -= mean;
  cov_ = Matrix::Zero(centered_.rows(), centered_.rows());
  cov_.selfadjointView<Eigen::Lower>().rankUpdate(centered_, 1.0 / static_cast<double>(samples_ - 1));
  cov_ = cov_.selfadjointView<Eigen::Lower>();
}

void TeEstimator::check_query(Index source, Index target, const IndexList& cond) const {
  if (source < 0 || target < 0 || source >= n_ || target >= n_) {
    throw Error(ErrorCode::IndexOutOfRange, "TE: node out of range");
  }
  if (source == target) throw Error(ErrorCode::InvalidArgument, "TE: source equals target");
  for (const Index k : cond) {
    if (k < 0 || k >= n_) throw Error(ErrorCode::IndexOutOfRange, "TE: conditioning node out of range");
    if (k == source || k == target) throw Error(ErrorCode::InvalidArgument, "TE: source/target in conditioning set");
  }
  const Index cond_dims = static_cast<Index>(lag_) * static_cast<Index>(1 + cond.size());
  if (length_ <= lag_ + cond_dims + 2) throw Error(ErrorCode::InsufficientData, "TE: too few samples for conditioning set");
}

double TeEstimator::conditional_te(Index source, Index target, const IndexList& cond) const {
  check_query(source, target, cond);
  IndexList x, y{var(0, target)}, z;
  for (int d = 1; d <= lag_; ++d) {
    x.push_back(var(d, source));
    z.push_back(var(d, target));
    for (const Index k : cond) z.push_back(var(d, k));
  }
  return gaussian_cmi(cov_, x, y, z);
}

double TeEstimator::shifted_te(Index source, Index target, const IndexList& cond, Index offset) const {
  check_query(source, target, cond);
  IndexList rest{var(0, target)};
  for (int d = 1; d <= lag_; ++d) {
    rest.push_back(var(d, target));
    for (const Index k : cond) rest.push_back(var(d, k));
  }
  const Index nx = lag_;
  const Index nr = static_cast<Index>(rest.size());

  // Source past under a circular shift: x_src((lag + s - d - offset) mod T).
  Matrix shifted(nx, samples_);
  const Index t_len = length_;
  const Index off = ((offset % t_len) + t_len) % t_len;
  for (int d = 1; d <= lag_; ++d) {
    const Index first = ((lag_ - d - off) % t_len + t_len) % t_len;
    Index s = 0;
    Index src = first;
    while (s < samples_) {
      const Index run = std::min(samples_ - s, t_len - src);
      shifted.row(d - 1).segment(s, run) = raw_.row(source).segment(src, run);
      s += run;
      src = 0;
    }
  }
  const Vector mean = shifted.rowwise().mean();
  shifted.colwise() -= mean;

  const double denom = static_cast<double>(samples_ - 1);
  Matrix cov(nx + nr, nx + nr);
  cov.topLeftCorner(nx, nx) = shifted * shifted.transpose() / denom;
  for (Index r = 0; r < nr; ++r) {
    const Vector cross = shifted * centered_.row(rest[r]).transpose() / denom;
    cov.block(0, nx + r, nx, 1) = cross;
    cov.block(nx + r, 0, 1, nx) = cross.transpose();
  }
  cov.bottomRightCorner(nr, nr) = cov_(rest, rest);

  IndexList x, y{nx}, z;
  for (Index i = 0; i < nx; ++i) x.push_back(i);
  for (Index i = 1; i < nr; ++i) z.push_back(nx + i);
  return gaussian_cmi(cov, x, y, z);
}

double TeEstimator::surrogate_threshold(Index source, Index target, const IndexList& cond,
                                        const TeConfig& cfg) const {
  if (cfg.n_surrogates < 1) throw Error(ErrorCode::InvalidArgument, "TE: need at least one surrogate");
  const Index lo = std::max<Index>(1, length_ / 10);
  const Index hi = length_ - lo;
  if (hi - lo + 1 < cfg.n_surrogates) throw Error(ErrorCode::InsufficientData, "TE: series too short for surrogates");

  std::uint64_t seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(source), static_cast<std::uint64_t>(target)});
  for (const Index k : cond) seed = derive_seed(seed, {static_cast<std::uint64_t>(k)});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(lo, hi);
  std::set<Index> used;
  std::vector<double> values;
  while (static_cast<int>(values.size()) < cfg.n_surrogates) {
    const Index offset = pick(rng);
    if (!used.insert(offset).second) continue;
    values.push_back(shifted_te(source, target, cond, offset));
  }
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  if (values.size() > 1) {
    for (const double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
  }
  return mean + cfg.surrogate_k * std::sqrt(var);
}

std::vector<EdgePosition> EdgeSet::positions() const {
  std::vector<EdgePosition> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.emplace_back(e.target, e.source);
  return out;
}

double conditional_te(const TimeSeries& ts, Index source, Index target, const IndexList& cond, const TeConfig& cfg) {
  cfg.validate();
  return TeEstimator(ts, cfg.lag).conditional_te(source, target, cond);
}

double surrogate_threshold(const TimeSeries& ts, Index source, Index target, const IndexList& cond,
                           const TeConfig& cfg) {
  cfg.validate();
  return TeEstimator(ts, cfg.lag).surrogate_threshold(source, target, cond, cfg);
}

std::vector<SourceScore> greedy_infer_sources(const TeEstimator& est, Index target, const TeConfig& cfg) {
  cfg.validate();
  if (target < 0 || target >= est.channels()) throw Error(ErrorCode::IndexOutOfRange, "TE: target out of range");
  std::vector<SourceScore> picked;
  IndexList selected;
  while (static_cast<int>(selected.size()) < cfg.max_sources_per_target) {
    Index best = -1;
    double best_te = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < est.channels(); ++j) {
      if (j == target || std::find(selected.begin(), selected.end(), j) != selected.end()) continue;
      const double te = est.conditional_te(j, target, selected);
      if (te > best_te) {
        best_te = te;
        best = j;
      }
    }
    if (best < 0) break;
    const double threshold = cfg.n_surrogates > 0 ? est.surrogate_threshold(best, target, selected, cfg) : 0.0;
    if (!(best_te > threshold)) break;
    picked.push_back({best, best_te, threshold});
    selected.push_back(best);
  }
  return picked;
}

std::vector<SourceScore> greedy_infer_sources(const TimeSeries& ts, Index target, const TeConfig& cfg) {
  cfg.validate();
  return greedy_infer_sources(TeEstimator(ts, cfg.lag), target, cfg);
}

EdgeSet infer_edges(const TimeSeries& ts, const TeConfig& cfg) {
  cfg.validate();
  const TeEstimator est(ts, cfg.lag);
  EdgeSet out;
  for (Index target = 0; target < est.channels(); ++target) {
    if (cfg.max_total_edges && static_cast<Index>(out.edges.size()) >= *cfg.max_total_edges) break;
    try {
      for (const SourceScore& s : greedy_infer_sources(est, target, cfg)) {
        if (cfg.max_total_edges && static_cast<Index>(out.edges.size()) >= *cfg.max_total_edges) break;
        out.edges.push_back({s.source, target, s.te_nats});
      }
    } catch (const Error& e) {
      out.warnings.push_back("target " + std::to_string(target) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lyapnet
