#include "lyapnet/experiment.hpp"

#include <atomic>
#include <chrono>
#include <optional>
#include <random>
#include <thread>

#include "lyapnet/lyapunov.hpp"
#include "lyapnet/seed.hpp"
#include "lyapnet/solution_space.hpp"
#include "lyapnet/sparse_recovery.hpp"

namespace lyapnet {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::FullInfo: return "FullInfo";
    case Method::TEInfo: return "TEInfo";
    case Method::NoInfo: return "NoInfo";
    case Method::Precision: return "Precision";
    case Method::Correlation: return "Correlation";
  }
  return "Unknown";
}

Method parse_method(const std::string& s) {
  for (const Method m : {Method::FullInfo, Method::TEInfo, Method::NoInfo, Method::Precision, Method::Correlation}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "experiment: n must be >= 2");
  if (edge_counts.empty()) throw Error(ErrorCode::InvalidArgument, "experiment: edge_counts is empty");
  if (epsilons.empty()) throw Error(ErrorCode::InvalidArgument, "experiment: epsilons is empty");
  if (dynamics.empty()) throw Error(ErrorCode::InvalidArgument, "experiment: dynamics is empty");
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "experiment: methods is empty");
  if (trials_per_cell < 1) throw Error(ErrorCode::InvalidArgument, "experiment: trials_per_cell must be >= 1");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "experiment: workers must be >= 1");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "experiment: ridge must be >= 0");
  for (const Eigen::Index p : edge_counts) {
    GeneratorConfig g;
    g.n = n;
    g.n_edges = p;
    g.validate();
  }
  for (const double e : epsilons) {
    GeneratorConfig g;
    g.n = n;
    g.n_edges = 0;
    g.epsilon = e;
    g.validate();
  }
  SimConfig sim;
  sim.dt = dt;
  sim.steps = steps;
  sim.validate();
  te.validate();
}

namespace {

struct Job {
  std::size_t p_index;
  std::size_t eps_index;
  int trial;
};

bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ResultRecord> run_trial(const ExperimentConfig& cfg, const Job& job) {
  const Eigen::Index p = cfg.edge_counts[job.p_index];
  const double eps = cfg.epsilons[job.eps_index];
  const std::uint64_t trial_seed =
      derive_seed(cfg.master_seed, {job.p_index, job.eps_index, static_cast<std::uint64_t>(job.trial)});

  std::vector<ResultRecord> out;
  auto blank = [&](Dynamics d, Method m) {
    ResultRecord r;
    r.n = cfg.n;
    r.p = p;
    r.epsilon = eps;
    r.dynamics = d;
    r.method = m;
    r.trial = job.trial;
    r.seed = trial_seed;
    r.alignment = std::numeric_limits<double>::quiet_NaN();
    return r;
  };
  auto fail_all = [&](Dynamics d, const std::string& status) {
    for (const Method m : cfg.methods) {
      ResultRecord r = blank(d, m);
      r.status = status;
      out.push_back(r);
    }
  };

  Matrix truth;
  try {
    GeneratorConfig gen;
    gen.n = cfg.n;
    gen.n_edges = p;
    gen.epsilon = eps;
    gen.seed = derive_seed(trial_seed, {1});
    truth = random_hurwitz(gen);
  } catch (const Error& e) {
    for (const Dynamics d : cfg.dynamics) fail_all(d, std::string("generate:") + to_string(e.code()));
    return out;
  }

  const bool need_series = cfg.covariance == CovarianceSource::Empirical || wants(cfg, Method::TEInfo);
  const bool need_lp = wants(cfg, Method::FullInfo) || wants(cfg, Method::TEInfo) || wants(cfg, Method::NoInfo);

  for (const Dynamics dyn : cfg.dynamics) {
    std::optional<TimeSeries> series;
    Matrix gamma;
    std::optional<ConstraintSystem> cs;
    try {
      if (need_series) {
        SimConfig sim;
        sim.dt = cfg.dt;
        sim.steps = cfg.steps;
        sim.seed = derive_seed(trial_seed, {2});
        sim.dynamics = dyn;
        series = simulate(truth, sim);
      }
      gamma = cfg.covariance == CovarianceSource::Empirical ? empirical_covariance(series->data)
                                                            : forward_lyapunov_solve(truth);
      if (cfg.ridge > 0.0) gamma.diagonal().array() += cfg.ridge;
      if (need_lp) cs = build_constraints(spectral_decompose(gamma));
    } catch (const Error& e) {
      fail_all(dyn, std::string("prepare:") + to_string(e.code()));
      continue;
    }

    for (const Method m : cfg.methods) {
      ResultRecord rec = blank(dyn, m);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        Matrix estimate;
        std::string status = "ok";
        auto run_lp = [&](const PriorMask& mask) {
          const ReconstructionResult res = reconstruct(*cs, mask, cfg.lp);
          if (res.lp_status != LpStatus::Optimal) status = std::string("lp:") + to_string(res.lp_status);
          return res.a_hat;
        };
        switch (m) {
          case Method::FullInfo:
            estimate = run_lp(full_info_priors(truth, cfg.diagonal_weight));
            break;
          case Method::TEInfo: {
            TeConfig te = cfg.te;
            te.seed = derive_seed(trial_seed, {3, static_cast<std::uint64_t>(dyn)});
            const EdgeSet edges = infer_edges(*series, te);
            estimate = run_lp(priors_from_edges(edges.positions(), cfg.n, cfg.diagonal_weight));
            break;
          }
          case Method::NoInfo:
            estimate = run_lp(no_info_priors(cfg.n, cfg.diagonal_weight));
            break;
          case Method::Precision:
            estimate = precision_baseline(gamma);
            break;
          case Method::Correlation:
            estimate = correlation_baseline(gamma);
            break;
        }
        rec.alignment = alignment(estimate, truth);
        rec.status = status;
      } catch (const Error& e) {
        rec.status = to_string(e.code());
      }
      rec.wall_time = seconds_since(t0);
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Job> jobs;
  for (std::size_t pi = 0; pi < cfg.edge_counts.size(); ++pi)
    for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei)
      for (int t = 0; t < cfg.trials_per_cell; ++t) jobs.push_back({pi, ei, t});

  std::vector<std::vector<ResultRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) results[k] = run_trial(cfg, jobs[k]);
  };
  const int nthreads = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRecord> flat;
  for (auto& r : results) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double bootstrap_median_pvalue(const std::vector<double>& a, const std::vector<double>& b, int resamples,
                               std::uint64_t seed) {
  if (a.empty() || b.empty() || resamples < 1) {
    throw Error(ErrorCode::InvalidArgument, "bootstrap: need non-empty samples and resamples >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_a(0, a.size() - 1), pick_b(0, b.size() - 1);
  std::vector<double> ra(a.size()), rb(b.size());
  int not_greater = 0;
  for (int r = 0; r < resamples; ++r) {
    for (auto& x : ra) x = a[pick_a(rng)];
    for (auto& x : rb) x = b[pick_b(rng)];
    if (median(ra) - median(rb) <= 0.0) ++not_greater;
  }
  return static_cast<double>(not_greater) / static_cast<double>(resamples);
}

std::vector<double> select_alignments(const std::vector<ResultRecord>& records, Eigen::Index p, double epsilon,
                                      Dynamics dynamics, Method method) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.ok() && r.p == p && r.epsilon == epsilon && r.dynamics == dynamics && r.method == method) {
      out.push_back(r.alignment);
    }
  }
  return out;
}

}  // namespace lyapnet
