// lyapnet: network reconstruction from covariance via the Lyapunov equation.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lyapnet/experiment.hpp"
#include "lyapnet/io.hpp"
#include "lyapnet/lyapunov.hpp"
#include "lyapnet/report.hpp"
#include "lyapnet/sde.hpp"
#include "lyapnet/seed.hpp"
#include "lyapnet/solution_space.hpp"
#include "lyapnet/sparse_recovery.hpp"
#include "lyapnet/transfer_entropy.hpp"

namespace {

using namespace lyapnet;
namespace fs = std::filesystem;
using io::json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

bool is_validation(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::InvalidPair:
    case ErrorCode::SelfLoopInPriors:
    case ErrorCode::NotSymmetric:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    io::write_text(out, text);
  }
}

Matrix add_ridge(Matrix gamma, double ridge) {
  if (ridge < 0.0) throw Error(ErrorCode::InvalidArgument, "--ridge must be >= 0");
  gamma.diagonal().array() += ridge;
  return gamma;
}

struct Common {
  std::uint64_t seed = 0;
  double dt = 0.1;
  Eigen::Index steps = 100000;
  std::string dynamics = "linear";
  double ridge = 0.0;
  Eigen::Index edge_cap = -1;
  int diag_weight = 0;
};

void add_seed(CLI::App* app, Common& c) { app->add_option("--seed", c.seed, "RNG seed"); }
void add_sim(CLI::App* app, Common& c) {
  app->add_option("--dt", c.dt, "integration step")->check(CLI::PositiveNumber);
  app->add_option("--steps", c.steps, "recorded samples")->check(CLI::PositiveNumber);
  app->add_option("--dynamics", c.dynamics, "linear | tanh")->check(CLI::IsMember({"linear", "tanh"}));
}
void add_diag(CLI::App* app, Common& c) {
  app->add_option("--diag-weight", c.diag_weight, "L1 weight on diagonal entries")->check(CLI::IsMember({0, 1}));
}

int run_generate(const Common& c, Eigen::Index n, Eigen::Index edges, double eps, const std::string& out,
                 const std::string& meta) {
  GeneratorConfig g;
  g.n = n;
  g.n_edges = edges;
  g.epsilon = eps;
  g.seed = c.seed;
  const HurwitzSample s = random_hurwitz_sample(g);
  if (out.empty()) {
    std::cout << io::matrix_to_json(s.a).dump(2) << "\n";
  } else {
    io::write_matrix(out, s.a);
  }
  if (!meta.empty()) {
    const json m = {{"n", n},          {"n_edges", edges},         {"epsilon", eps},
                    {"seed", c.seed},  {"b_max", s.b_max},         {"abscissa", s.abscissa},
                    {"attempts", s.attempts}};
    io::write_text(meta, m.dump(2) + "\n");
  }
  return 0;
}

int run_simulate(const Common& c, const std::string& matrix, const std::string& out) {
  SimConfig sim;
  sim.dt = c.dt;
  sim.steps = c.steps;
  sim.seed = c.seed;
  sim.dynamics = parse_dynamics(c.dynamics);
  const TimeSeries ts = simulate(io::read_matrix(matrix), sim);
  if (fs::path(out).extension() == ".bin") {
    io::write_series_binary(out, ts);
  } else {
    io::write_series_csv(out, ts);
  }
  return 0;
}

TeConfig te_config(const Common& c, int lag, int cap, int surrogates, double k) {
  TeConfig te;
  te.lag = lag;
  te.max_sources_per_target = cap;
  te.n_surrogates = surrogates;
  te.surrogate_k = k;
  te.seed = c.seed;
  if (c.edge_cap >= 0) te.max_total_edges = c.edge_cap;
  return te;
}

int run_infer(const Common& c, const std::string& series, const TeConfig& te, const std::string& out) {
  const EdgeSet e = infer_edges(io::read_series(series, c.dt), te);
  for (const auto& w : e.warnings) std::cerr << "warning: " << w << "\n";
  emit(out, io::edges_to_json(e).dump(2) + "\n");
  return 0;
}

Matrix gamma_from_inputs(const Common& c, const std::string& gamma, const std::string& series) {
  if (gamma.empty() == series.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --gamma or --series");
  }
  const Matrix g = gamma.empty() ? empirical_covariance(io::read_series(series, c.dt).data) : io::read_matrix(gamma);
  return add_ridge(g, c.ridge);
}

int run_reconstruct(const Common& c, const std::string& gamma, const std::string& series, const std::string& priors,
                    const std::string& support, const std::string& out, const LpSettings& lp) {
  const Matrix g = gamma_from_inputs(c, gamma, series);
  const Eigen::Index n = g.rows();
  PriorMask mask;
  if (!priors.empty() && !support.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--priors and --support are exclusive");
  }
  if (!priors.empty()) {
    const EdgeSet e = io::edges_from_json(json::parse(io::read_text(priors)));
    mask = priors_from_edges(e.positions(), n, c.diag_weight);
  } else if (!support.empty()) {
    mask = full_info_priors(io::read_matrix(support), c.diag_weight);
  } else {
    mask = no_info_priors(n, c.diag_weight);
  }
  const ReconstructionResult r = reconstruct(g, mask, lp);
  emit(out, io::reconstruction_to_json(r).dump(2) + "\n");
  return r.lp_status == LpStatus::Optimal ? 0 : kExitRuntime;
}

std::vector<ReportFormat> parse_formats(const std::string& list) {
  std::vector<ReportFormat> fmts;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string item = list.substr(start, end - start);
    if (item == "csv") {
      fmts.push_back(ReportFormat::Csv);
    } else if (item == "json") {
      fmts.push_back(ReportFormat::Json);
    } else if (item == "svg") {
      fmts.push_back(ReportFormat::Svg);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown report format '" + item + "'");
    }
    start = end + 1;
  }
  return fmts;
}

int run_benchmark(const CLI::App& sub, const Common& c, const std::string& config, const std::string& out,
                  int workers, int trials, std::string covariance, const std::string& formats) {
  ExperimentConfig cfg;
  if (!config.empty()) cfg = io::experiment_config_from_json(json::parse(io::read_text(config)));
  if (sub.count("--seed")) cfg.master_seed = c.seed;
  if (sub.count("--dt")) cfg.dt = c.dt;
  if (sub.count("--steps")) cfg.steps = c.steps;
  if (sub.count("--dynamics")) cfg.dynamics = {parse_dynamics(c.dynamics)};
  if (sub.count("--ridge")) cfg.ridge = c.ridge;
  if (sub.count("--edge-cap")) cfg.te.max_total_edges = c.edge_cap;
  if (sub.count("--diag-weight")) cfg.diagonal_weight = c.diag_weight;
  if (sub.count("--workers")) cfg.workers = workers;
  if (sub.count("--trials")) cfg.trials_per_cell = trials;
  if (sub.count("--covariance")) {
    cfg.covariance = covariance == "exact" ? CovarianceSource::Exact : CovarianceSource::Empirical;
  }
  if (!out.empty()) cfg.output_dir = out;
  cfg.validate();
  const auto fmts = parse_formats(formats);

  const auto records = run_experiment(cfg);
  io::write_text(fs::path(cfg.output_dir) / "config.json", io::experiment_config_to_json(cfg).dump(2) + "\n");
  for (const auto& p : write_report(records, cfg.output_dir, fmts)) std::cerr << "wrote " << p.string() << "\n";
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.ok() ? 0 : 1;
  std::cerr << records.size() << " records, " << failed << " failed\n";
  return 0;
}

int run_report(const std::string& records_path, const std::string& out, const std::string& formats) {
  const auto records = records_from_csv(io::read_text(records_path));
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "report: no records");
  const auto fmts = parse_formats(formats);
  for (const auto& p : write_report(records, out, fmts)) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

int run_export(const Common& c, const std::string& gamma, const std::string& prefix, const std::string& lp_out) {
  const Matrix g = add_ridge(io::read_matrix(gamma), c.ridge);
  const ConstraintSystem cs = build_constraints(spectral_decompose(g));
  io::write_constraints_csv(prefix, cs);
  if (!lp_out.empty()) {
    io::write_text(lp_out, io::lp_to_json(assemble_lp(cs, no_info_priors(g.rows(), c.diag_weight))).dump() + "\n");
  }
  return 0;
}

int run_solve_lp(const std::string& path, const std::string& out, const LpSettings& lp, const std::string& method) {
  const LpProblem p = io::lp_from_json(json::parse(io::read_text(path)));
  LpSolution s;
  if (method == "ipm") {
    s = solve_lp_interior_point(p, lp);
  } else if (method == "simplex") {
    s = solve_lp_simplex(p, lp);
  } else {
    s = solve_lp(p, lp);
  }
  emit(out, io::lp_solution_to_json(s).dump(2) + "\n");
  return s.status == LpStatus::Optimal ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse network reconstruction from stationary covariance"};
  app.require_subcommand(1);
  Common c;
  LpSettings lp;

  auto* gen = app.add_subcommand("generate", "random sparse Hurwitz matrix");
  Eigen::Index n = 10, edges = 20;
  double eps = 0.5;
  std::string out, meta;
  gen->add_option("-n,--n", n, "dimension")->check(CLI::PositiveNumber);
  gen->add_option("-p,--edges", edges, "off-diagonal nonzeros");
  gen->add_option("--epsilon", eps, "stability margin in (0, 1]");
  gen->add_option("-o,--out", out, "matrix file (.json or .csv); stdout when omitted");
  gen->add_option("--meta", meta, "metadata JSON");
  add_seed(gen, c);

  auto* sim = app.add_subcommand("simulate", "Euler-Maruyama time series from A");
  std::string matrix;
  sim->add_option("-a,--matrix", matrix, "state matrix")->required();
  sim->add_option("-o,--out", out, "series file (.csv or .bin)")->required();
  add_seed(sim, c);
  add_sim(sim, c);

  auto* infer = app.add_subcommand("infer-priors", "transfer-entropy edge priors");
  std::string series;
  int lag = 1, cap = 5, surrogates = 10;
  double k = 3.0;
  infer->add_option("-s,--series", series, "time series file")->required();
  infer->add_option("-o,--out", out, "edge set JSON; stdout when omitted");
  infer->add_option("--lag", lag)->check(CLI::PositiveNumber);
  infer->add_option("--max-sources", cap, "per-target source cap");
  infer->add_option("--surrogates", surrogates);
  infer->add_option("--surrogate-k", k);
  infer->add_option("--edge-cap", c.edge_cap, "global edge cap");
  infer->add_option("--dt", c.dt, "sample spacing for CSV input");
  add_seed(infer, c);

  auto* rec = app.add_subcommand("reconstruct", "L1 reconstruction of A from a covariance");
  std::string gamma, priors, support;
  rec->add_option("-g,--gamma", gamma, "covariance matrix");
  rec->add_option("-s,--series", series, "time series (covariance is estimated)");
  rec->add_option("--priors", priors, "edge set JSON from infer-priors");
  rec->add_option("--support", support, "matrix whose off-diagonal support is known");
  rec->add_option("-o,--out", out, "result JSON; stdout when omitted");
  rec->add_option("--ridge", c.ridge, "add ridge * I to the covariance");
  rec->add_option("--dt", c.dt, "sample spacing for CSV input");
  rec->add_option("--tol", lp.tol);
  rec->add_option("--max-iter", lp.max_iter);
  add_diag(rec, c);

  auto* bench = app.add_subcommand("benchmark", "seeded experiment grid");
  std::string config, formats = "csv,json,svg", covariance = "empirical";
  int workers = 1, trials = 20;
  bench->add_option("-c,--config", config, "ExperimentConfig JSON");
  bench->add_option("-o,--out", out, "output directory");
  bench->add_option("--workers", workers)->check(CLI::PositiveNumber);
  bench->add_option("--trials", trials)->check(CLI::PositiveNumber);
  bench->add_option("--covariance", covariance)->check(CLI::IsMember({"empirical", "exact"}));
  bench->add_option("--format", formats, "comma list of csv, json, svg");
  bench->add_option("--ridge", c.ridge);
  bench->add_option("--edge-cap", c.edge_cap);
  add_seed(bench, c);
  add_sim(bench, c);
  add_diag(bench, c);

  auto* rep = app.add_subcommand("report", "tables and box plots from records.csv");
  std::string records;
  rep->add_option("-r,--records", records, "records CSV")->required();
  rep->add_option("-o,--out", out, "output directory")->required();
  rep->add_option("--format", formats, "comma list of csv, json, svg");

  auto* exp = app.add_subcommand("export-constraints", "write the constraint system M, b");
  std::string prefix, lp_out;
  exp->add_option("-g,--gamma", gamma, "covariance matrix")->required();
  exp->add_option("--prefix", prefix, "output prefix")->required();
  exp->add_option("--lp", lp_out, "also write the no-prior LP as JSON");
  exp->add_option("--ridge", c.ridge);
  add_diag(exp, c);

  auto* slp = app.add_subcommand("solve-lp", "solve an LP given as JSON");
  std::string lp_path, method = "auto";
  slp->add_option("lp", lp_path, "LP JSON")->required();
  slp->add_option("-o,--out", out, "solution JSON; stdout when omitted");
  slp->add_option("--method", method)->check(CLI::IsMember({"auto", "ipm", "simplex"}));
  slp->add_option("--tol", lp.tol);
  slp->add_option("--max-iter", lp.max_iter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen) return run_generate(c, n, edges, eps, out, meta);
    if (*sim) return run_simulate(c, matrix, out);
    if (*infer) return run_infer(c, series, te_config(c, lag, cap, surrogates, k), out);
    if (*rec) return run_reconstruct(c, gamma, series, priors, support, out, lp);
    if (*bench) return run_benchmark(*bench, c, config, out, workers, trials, covariance, formats);
    if (*rep) return run_report(records, out, formats);
    if (*exp) return run_export(c, gamma, prefix, lp_out);
    if (*slp) return run_solve_lp(lp_path, out, lp, method);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const io::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
