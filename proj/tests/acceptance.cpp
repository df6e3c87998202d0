// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "lyapnet/experiment.hpp"
#include "lyapnet/lp.hpp"
#include "lyapnet/lyapunov.hpp"
#include "lyapnet/report.hpp"
#include "lyapnet/seed.hpp"
#include "lyapnet/sde.hpp"
#include "lyapnet/solution_space.hpp"
#include "lyapnet/sparse_recovery.hpp"
#include "lyapnet/transfer_entropy.hpp"

using namespace lyapnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0 || secs <= budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %d %s (%.1fs%s) %s\n", ok ? "PASS" : "FAIL", id, name, secs,
              in_time ? "" : ", over budget", o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome membership_property(const std::vector<Eigen::Index>& sizes, int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_m = 0, worst_l = 0;
  int perturbed_ok = 0;
  for (int t = 0; t < cases; ++t) {
    const Eigen::Index n = sizes[t % sizes.size()];
    const Matrix g = fixtures::random_spd(n, rng);
    const auto dec = spectral_decompose(g);
    const auto cs = build_constraints(dec);
    SampleOptions opts;
    opts.seed = seed * 1000 + t;
    const Matrix a = sample_solution(dec, opts);
    worst_m = std::max(worst_m, membership_residual(cs, a));
    worst_l = std::max(worst_l, lyapunov_residual(a, g));
    const Matrix p = a + 1e-2 * fixtures::gaussian(n, n, rng);
    if (membership_residual(cs, p) > 1e-8 && lyapunov_residual(p, g) > 1e-6) ++perturbed_ok;
  }
  const bool pass = worst_m <= 1e-8 && worst_l <= 1e-6 && perturbed_ok == cases;
  return {pass, fmt("max |M vec(A) - b| = %.2e, max Lyapunov residual = %.2e, perturbed rejected %.0f", worst_m,
                    worst_l, perturbed_ok) + "/" + std::to_string(cases)};
}

Outcome criterion_exact_recovery() {
  double worst = 1.0;
  int trials = 0;
  for (const Eigen::Index p : {10, 20}) {
    for (int t = 0; t < 10; ++t) {
      GeneratorConfig gen;
      gen.n = 10;
      gen.n_edges = p;
      gen.epsilon = 0.5;
      gen.seed = derive_seed(2024, {static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(t)});
      const Matrix a = random_hurwitz(gen);
      const auto r = reconstruct(forward_lyapunov_solve(a), full_info_priors(a));
      const double al = r.lp_status == LpStatus::Optimal ? alignment(r.a_hat, a) : -1.0;
      worst = std::min(worst, al);
      ++trials;
    }
  }
  return {worst >= 0.999, fmt("min alignment %.6f over %.0f trials", worst, trials)};
}

Outcome criterion_forward_solve() {
  Matrix a(2, 2);
  a << -1.0, 0.5, 0.0, -1.0;
  Matrix expected(2, 2);
  expected << 9.0 / 16.0, 1.0 / 8.0, 1.0 / 8.0, 0.5;
  const double err = max_abs(Matrix(forward_lyapunov_solve(a) - expected));
  const Outcome prop = membership_property({10}, 20, 33);
  return {err <= 1e-10 && prop.pass, fmt("2x2 error %.2e; n=10: ", err) + prop.detail};
}

Outcome criterion_lp_oracle() {
  // Random basis-pursuit instances, exhaustive vertex enumeration as oracle.
  std::mt19937_64 rng(4);
  double worst = 0;
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const int k = std::uniform_int_distribution<int>(2, 6)(rng);
    const int me = std::uniform_int_distribution<int>(1, k - 1)(rng);
    const Matrix m = fixtures::gaussian(me, k, rng);
    const Vector b = fixtures::gaussian(me, 1, rng);
    LpProblem p;
    p.costs = Vector::Zero(2 * k);
    p.costs.head(k).setOnes();
    Matrix eq = Matrix::Zero(me, 2 * k);
    eq.rightCols(k) = m;
    Matrix g(2 * k, 2 * k);
    g << -Matrix::Identity(k, k), Matrix::Identity(k, k), -Matrix::Identity(k, k), -Matrix::Identity(k, k);
    p.eq_matrix = eq.sparseView();
    p.eq_rhs = b;
    p.ineq_matrix = g.sparseView();
    p.ineq_rhs = Vector::Zero(2 * k);

    double best = std::numeric_limits<double>::infinity();
    const Eigen::Index nv = 2 * k, need = nv - me;
    std::vector<Eigen::Index> pick;
    std::function<void(Eigen::Index)> rec = [&](Eigen::Index start) {
      if (static_cast<Eigen::Index>(pick.size()) == need) {
        Matrix sys(nv, nv);
        Vector rhs = Vector::Zero(nv);
        sys.topRows(me) = eq;
        rhs.head(me) = b;
        for (Eigen::Index r = 0; r < need; ++r) sys.row(me + r) = g.row(pick[r]);
        Eigen::FullPivLU<Matrix> lu(sys);
        if (lu.rank() < nv) return;
        const Vector x = lu.solve(rhs);
        if (((g * x).array() > 1e-9 * (1.0 + x.cwiseAbs().maxCoeff())).any()) return;
        best = std::min(best, p.costs.dot(x));
        return;
      }
      for (Eigen::Index r = start; r < 2 * k; ++r) {
        pick.push_back(r);
        rec(r + 1);
        pick.pop_back();
      }
    };
    rec(0);

    LpSettings s;
    s.record_trace = true;
    const LpSolution sol = solve_lp(p, s);
    const double err = sol.status == LpStatus::Optimal ? std::abs(sol.objective - best) : 1e300;
    worst = std::max(worst, err);
    for (const LpIterate& it : sol.trace)
      if (it.dual_objective > it.primal_objective + 1e-9 * (1.0 + std::abs(it.primal_objective))) ++violations;
  }
  return {worst <= 1e-6 && violations == 0,
          fmt("max objective gap %.2e, weak-duality violations %.0f", worst, violations)};
}

ExperimentConfig benchmark_config(int workers) {
  ExperimentConfig cfg;
  cfg.n = 10;
  cfg.edge_counts = {20};
  cfg.epsilons = {0.3, 0.5};
  cfg.trials_per_cell = 20;
  cfg.master_seed = 1;
  cfg.workers = workers;
  return cfg;
}

std::string without_timing(const std::vector<ResultRecord>& records) {
  std::istringstream in(records_to_csv(records));
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::vector<ResultRecord> benchmark_records;

Outcome criterion_ordering() {
  const ExperimentConfig cfg = benchmark_config(1);
  benchmark_records = run_experiment(cfg);
  bool pass = true;
  std::string detail;
  for (const Dynamics d : cfg.dynamics) {
    for (const double eps : cfg.epsilons) {
      auto pick = [&](Method m) { return select_alignments(benchmark_records, 20, eps, d, m); };
      const auto full = pick(Method::FullInfo), te = pick(Method::TEInfo), none = pick(Method::NoInfo),
                 prec = pick(Method::Precision), corr = pick(Method::Correlation);
      const double mf = median(full), mt = median(te), mn = median(none), mp = median(prec), mc = median(corr);
      const double p_none = bootstrap_median_pvalue(te, none, 10000, 11);
      const double p_prec = bootstrap_median_pvalue(te, prec, 10000, 12);
      const double p_corr = bootstrap_median_pvalue(te, corr, 10000, 13);
      const bool cell = mf > mt && mt > mn && mt > mp && mt > mc && p_none < 0.05 && p_prec < 0.05 && p_corr < 0.05;
      pass = pass && cell;
      detail += std::string("\n    ") + to_string(d) + fmt(" eps=%.1f n_ok=%.0f", eps, te.size()) +
                fmt(" medians full=%.4f te=%.4f none=%.4f", mf, mt, mn) + fmt(" prec=%.4f corr=%.4f", mp, mc) +
                fmt(" p(te>none)=%.4f p(te>prec)=%.4f p(te>corr)=%.4f", p_none, p_prec, p_corr) +
                (cell ? "" : " <- fails");
    }
  }
  int failed = 0;
  for (const auto& r : benchmark_records) failed += r.ok() ? 0 : 1;
  detail += "\n    failed records: " + std::to_string(failed) + "/" + std::to_string(benchmark_records.size());
  return {pass, detail};
}

Outcome criterion_te_oracle() {
  // Y_t = 0.5 Y_{t-1} + 0.5 X_{t-1} + e_t, X white: TE = 0.5 ln(1.25).
  const double vy = 5.0 / 3.0;
  Matrix c(4, 4);
  c << 1, 0, 0, 0, 0, vy, 0.5, 0.5 * vy, 0, 0.5, 1, 0, 0, 0.5 * vy, 0, vy;
  const double oracle = gaussian_cmi(c, {2}, {1}, {3});

  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  TimeSeries ts;
  ts.data.resize(2, 100000);
  double x = nd(rng), y = 0;
  for (Eigen::Index t = 0; t < ts.length(); ++t) {
    y = 0.5 * y + 0.5 * x + nd(rng);
    x = nd(rng);
    ts.data(0, t) = x;
    ts.data(1, t) = y;
  }
  const double te = conditional_te(ts, 0, 1, {}, TeConfig{});
  const double rel = std::abs(te - oracle) / oracle;

  int below = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    std::mt19937_64 r(100 + s);
    TimeSeries w;
    w.data = fixtures::gaussian(2, 20000, r);
    const TeEstimator est(w, 1);
    TeConfig cfg;
    cfg.seed = s;
    if (est.conditional_te(0, 1, {}) < est.surrogate_threshold(0, 1, {}, cfg)) ++below;
  }
  return {rel <= 0.2 && below >= 45,
          fmt("TE %.5f vs closed form %.5f (rel err %.3f)", te, oracle, rel) +
              fmt(", independent below threshold %.0f/50", below)};
}

Outcome criterion_simulation() {
  double worst = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    GeneratorConfig gen;
    gen.n = 10;
    gen.n_edges = 20;
    gen.epsilon = 0.5;
    gen.seed = 700 + s;
    const Matrix a = random_hurwitz(gen);
    const Matrix g = forward_lyapunov_solve(a);
    SimConfig sim;
    sim.seed = 800 + s;
    const Matrix est = empirical_covariance(simulate(a, sim).data);
    worst = std::max(worst, max_abs(Matrix(est - g)) / max_abs(g));
  }
  return {worst <= 0.1, fmt("worst relative inf-norm error %.4f over 5 systems", worst)};
}

Outcome criterion_determinism() {
  if (benchmark_records.empty()) benchmark_records = run_experiment(benchmark_config(1));
  const auto second = run_experiment(benchmark_config(2));
  const bool same = without_timing(benchmark_records) == without_timing(second);
  return {same, std::to_string(second.size()) + " records, single worker vs two workers " +
                    (same ? "identical" : "differ")};
}

}  // namespace

int main() {
  run(1, "solution-space equivalence, 100 cases n in {3,5,8}", 10, [] { return membership_property({3, 5, 8}, 100, 1); });
  run(2, "exact recovery under full priors", 120, criterion_exact_recovery);
  run(3, "forward Lyapunov solve", 0, criterion_forward_solve);
  run(4, "LP solver against vertex enumeration", 30, criterion_lp_oracle);
  run(5, "benchmark method ordering n=10 p=20", 1800, criterion_ordering);
  run(6, "transfer entropy oracle and surrogate threshold", 60, criterion_te_oracle);
  run(7, "simulated covariance against Lyapunov solution", 60, criterion_simulation);
  run(8, "benchmark determinism", 0, criterion_determinism);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
