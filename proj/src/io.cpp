#include "lyapnet/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace lyapnet::io {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

std::vector<std::vector<double>> parse_numeric_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (const auto& cell : split(line, ',')) {
      double v;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw Error(ErrorCode::ParseError, "non-numeric CSV row: " + line);
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw Error(ErrorCode::ParseError, "ragged CSV rows");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::ParseError, "empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

json sparse_to_json(const SparseMatrix& m, const Vector& rhs) {
  json trip = json::array();
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) trip.push_back({it.row(), it.col(), it.value()});
  return {{"rows", m.rows()}, {"triplets", trip}, {"rhs", std::vector<double>(rhs.data(), rhs.data() + rhs.size())}};
}

void sparse_from_json(const json& j, Eigen::Index cols, SparseMatrix& m, Vector& rhs) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  std::vector<Triplet> trip;
  for (const auto& t : j.at("triplets")) {
    const Eigen::Index r = t.at(0).get<Eigen::Index>();
    const Eigen::Index c = t.at(1).get<Eigen::Index>();
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw Error(ErrorCode::DimensionMismatch, "LP triplet out of range");
    trip.emplace_back(r, c, t.at(2).get<double>());
  }
  m.resize(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  const auto v = j.at("rhs").get<std::vector<double>>();
  rhs = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector to_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

double json_number(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"n", m.rows()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  try {
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    const json& data = j.at("data");
    if (n <= 0) throw Error(ErrorCode::ParseError, "matrix JSON: n must be positive");
    Matrix m(n, n);
    if (!data.empty() && data.front().is_array()) {
      if (static_cast<Eigen::Index>(data.size()) != n) throw Error(ErrorCode::DimensionMismatch, "matrix JSON: row count");
      for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(data[i].size()) != n) throw Error(ErrorCode::DimensionMismatch, "matrix JSON: row length");
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = data[i][k].get<double>();
      }
    } else {
      if (static_cast<Eigen::Index>(data.size()) != n * n) throw Error(ErrorCode::DimensionMismatch, "matrix JSON: need n*n values");
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = data[i * n + k].get<double>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("matrix JSON: ") + e.what());
  }
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix matrix_from_csv(const std::string& text) { return rows_to_matrix(parse_numeric_rows(text)); }

Matrix read_matrix(const fs::path& path) {
  const std::string text = read_text(path);
  if (path.extension() == ".json") {
    try {
      return matrix_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
  }
  return matrix_from_csv(text);
}

void write_matrix(const fs::path& path, const Matrix& m) {
  if (path.extension() == ".json") {
    write_text(path, matrix_to_json(m).dump(2) + "\n");
  } else {
    write_text(path, matrix_to_csv(m));
  }
}

void write_series_csv(const fs::path& path, const TimeSeries& ts) { write_text(path, matrix_to_csv(ts.data)); }

TimeSeries read_series_csv(const fs::path& path, double dt) {
  TimeSeries ts;
  ts.data = matrix_from_csv(read_text(path));
  ts.dt = dt;
  return ts;
}

void write_series_binary(const fs::path& path, const TimeSeries& ts) {
  const Eigen::Index n = ts.channels();
  const Eigen::Index t = ts.length();
  std::string bytes(static_cast<std::size_t>(n * t) * sizeof(double), '\0');
  char* dst = bytes.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(ts.data(i, k));
      for (int b = 0; b < 8; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  write_text(path, bytes);
  const json side = {{"n", n}, {"T", t}, {"dt", ts.dt}, {"seed", ts.seed}};
  write_text(fs::path(path.string() + ".json"), side.dump(2) + "\n");
}

TimeSeries read_series_binary(const fs::path& path) {
  json side;
  try {
    side = json::parse(read_text(fs::path(path.string() + ".json")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("series sidecar: ") + e.what());
  }
  TimeSeries ts;
  const Eigen::Index n = side.at("n").get<Eigen::Index>();
  const Eigen::Index t = side.at("T").get<Eigen::Index>();
  ts.dt = side.at("dt").get<double>();
  ts.seed = side.value("seed", std::uint64_t{0});
  const std::string bytes = read_text(path);
  if (static_cast<Eigen::Index>(bytes.size()) != n * t * 8) {
    throw Error(ErrorCode::ParseError, "series binary size does not match sidecar");
  }
  ts.data.resize(n, t);
  const unsigned char* src = reinterpret_cast<const unsigned char*>(bytes.data());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(*src++) << (8 * b);
      ts.data(i, k) = std::bit_cast<double>(bits);
    }
  }
  return ts;
}

TimeSeries read_series(const fs::path& path, double dt) {
  return path.extension() == ".bin" ? read_series_binary(path) : read_series_csv(path, dt);
}

void write_constraints_csv(const fs::path& prefix, const ConstraintSystem& cs) {
  std::string m = "row,col,value\n";
  for (Eigen::Index k = 0; k < cs.M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(cs.M, k); it; ++it)
      m += std::to_string(it.row()) + "," + std::to_string(it.col()) + "," + fmt(it.value()) + "\n";
  write_text(fs::path(prefix.string() + "_M.csv"), m);
  std::string b;
  for (Eigen::Index i = 0; i < cs.b.size(); ++i) b += fmt(cs.b(i)) + "\n";
  write_text(fs::path(prefix.string() + "_b.csv"), b);
}

json lp_to_json(const LpProblem& p) {
  return {{"num_variables", p.num_variables()},
          {"costs", from_vector(p.costs)},
          {"eq", sparse_to_json(p.eq_matrix, p.eq_rhs)},
          {"ineq", sparse_to_json(p.ineq_matrix, p.ineq_rhs)}};
}

LpProblem lp_from_json(const json& j) {
  try {
    LpProblem p;
    p.costs = to_vector(j.at("costs"));
    const Eigen::Index n = j.value("num_variables", p.costs.size());
    if (n != p.costs.size()) throw Error(ErrorCode::DimensionMismatch, "LP JSON: costs length differs from num_variables");
    if (j.contains("eq")) {
      sparse_from_json(j.at("eq"), n, p.eq_matrix, p.eq_rhs);
    } else {
      p.eq_matrix.resize(0, n);
      p.eq_rhs.resize(0);
    }
    if (j.contains("ineq")) {
      sparse_from_json(j.at("ineq"), n, p.ineq_matrix, p.ineq_rhs);
    } else {
      p.ineq_matrix.resize(0, n);
      p.ineq_rhs.resize(0);
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("LP JSON: ") + e.what());
  }
}

json lp_solution_to_json(const LpSolution& s) {
  return {{"status", to_string(s.status)},
          {"method", s.method},
          {"objective", json_number(s.objective)},
          {"dual_objective", json_number(s.dual_objective)},
          {"primal_residual", json_number(s.primal_residual)},
          {"dual_residual", json_number(s.dual_residual)},
          {"gap", json_number(s.gap)},
          {"iterations", s.iterations},
          {"x", from_vector(s.x)},
          {"eq_dual", from_vector(s.eq_dual)},
          {"ineq_dual", from_vector(s.ineq_dual)}};
}

json edges_to_json(const EdgeSet& e) {
  json arr = json::array();
  for (const auto& edge : e.edges) arr.push_back({{"source", edge.source}, {"target", edge.target}, {"te_nats", edge.te_nats}});
  return arr;
}

EdgeSet edges_from_json(const json& j) {
  try {
    EdgeSet e;
    for (const auto& item : j) {
      e.edges.push_back({item.at("source").get<Eigen::Index>(), item.at("target").get<Eigen::Index>(),
                         item.value("te_nats", 0.0)});
    }
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("edge set JSON: ") + ex.what());
  }
}

json reconstruction_to_json(const ReconstructionResult& r) {
  return {{"matrix", matrix_to_json(r.a_hat)},
          {"objective", json_number(r.objective)},
          {"weighted_l1", json_number(r.weighted_l1)},
          {"status", to_string(r.lp_status)},
          {"residual", json_number(r.membership_residual)},
          {"iterations", r.iterations},
          {"solver", r.method},
          {"wall_time", r.wall_time}};
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
  std::vector<std::string> dyn, methods;
  for (const auto d : cfg.dynamics) dyn.emplace_back(to_string(d));
  for (const auto m : cfg.methods) methods.emplace_back(to_string(m));
  json te = {{"lag", cfg.te.lag},
             {"max_sources_per_target", cfg.te.max_sources_per_target},
             {"n_surrogates", cfg.te.n_surrogates},
             {"surrogate_k", cfg.te.surrogate_k}};
  if (cfg.te.max_total_edges) te["max_total_edges"] = *cfg.te.max_total_edges;
  return {{"n", cfg.n},
          {"edge_counts", cfg.edge_counts},
          {"epsilons", cfg.epsilons},
          {"trials_per_cell", cfg.trials_per_cell},
          {"dynamics", dyn},
          {"methods", methods},
          {"master_seed", cfg.master_seed},
          {"output_dir", cfg.output_dir},
          {"dt", cfg.dt},
          {"steps", cfg.steps},
          {"te", te},
          {"diag_weight", cfg.diagonal_weight},
          {"ridge", cfg.ridge},
          {"covariance", cfg.covariance == CovarianceSource::Exact ? "exact" : "empirical"},
          {"lp", {{"tol", cfg.lp.tol}, {"max_iter", cfg.lp.max_iter}}},
          {"workers", cfg.workers}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.edge_counts = j.value("edge_counts", cfg.edge_counts);
    cfg.epsilons = j.value("epsilons", cfg.epsilons);
    cfg.trials_per_cell = j.value("trials_per_cell", cfg.trials_per_cell);
    if (j.contains("dynamics")) {
      cfg.dynamics.clear();
      const json& d = j.at("dynamics");
      if (d.is_string() && (d == "both" || d == "Both")) {
        cfg.dynamics = {Dynamics::Linear, Dynamics::Tanh};
      } else if (d.is_string()) {
        cfg.dynamics = {parse_dynamics(d.get<std::string>())};
      } else {
        for (const auto& s : d) cfg.dynamics.push_back(parse_dynamics(s.get<std::string>()));
      }
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& s : j.at("methods")) cfg.methods.push_back(parse_method(s.get<std::string>()));
    }
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.steps = j.value("steps", cfg.steps);
    if (j.contains("te")) {
      const json& te = j.at("te");
      cfg.te.lag = te.value("lag", cfg.te.lag);
      cfg.te.max_sources_per_target = te.value("max_sources_per_target", cfg.te.max_sources_per_target);
      cfg.te.n_surrogates = te.value("n_surrogates", cfg.te.n_surrogates);
      cfg.te.surrogate_k = te.value("surrogate_k", cfg.te.surrogate_k);
      if (te.contains("max_total_edges")) cfg.te.max_total_edges = te.at("max_total_edges").get<Eigen::Index>();
    }
    cfg.diagonal_weight = j.value("diag_weight", cfg.diagonal_weight);
    cfg.ridge = j.value("ridge", cfg.ridge);
    const std::string cov = j.value("covariance", std::string("empirical"));
    if (cov == "exact") {
      cfg.covariance = CovarianceSource::Exact;
    } else if (cov == "empirical") {
      cfg.covariance = CovarianceSource::Empirical;
    } else {
      throw Error(ErrorCode::InvalidArgument, "covariance must be 'empirical' or 'exact'");
    }
    if (j.contains("lp")) {
      cfg.lp.tol = j.at("lp").value("tol", cfg.lp.tol);
      cfg.lp.max_iter = j.at("lp").value("max_iter", cfg.lp.max_iter);
    }
    cfg.workers = j.value("workers", cfg.workers);
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("experiment config: ") + e.what());
  }
}

}  // namespace lyapnet::io
