#pragma once

// File formats.
//
//   matrix CSV     row-major, comma separated, optional non-numeric header line
//   matrix JSON    {"n": int, "data": [row-major values]} (nested rows accepted)
//   series CSV     one row per channel
//   series binary  little-endian float64, channel-major (row per channel),
//                  sidecar <path>.json = {"n", "T", "dt", "seed"}
//   constraints    <prefix>_M.csv triplets "row,col,value" and <prefix>_b.csv,
//                  0-based indices (row = upper_index, col = full_index)
//   LP JSON        {"num_variables", "costs", "eq": {"rows", "triplets", "rhs"},
//                   "ineq": {...}}; triplets are [row, col, value]
//   edge set JSON  [{"source", "target", "te_nats"}, ...], 0-based nodes

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lyapnet/experiment.hpp"
#include "lyapnet/lp.hpp"
#include "lyapnet/sde.hpp"
#include "lyapnet/solution_space.hpp"
#include "lyapnet/sparse_recovery.hpp"
#include "lyapnet/transfer_entropy.hpp"

namespace lyapnet::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(const std::string& text);

/// Dispatches on extension: .json, otherwise CSV.
Matrix read_matrix(const fs::path& path);
void write_matrix(const fs::path& path, const Matrix& m);

void write_series_csv(const fs::path& path, const TimeSeries& ts);
TimeSeries read_series_csv(const fs::path& path, double dt);
void write_series_binary(const fs::path& path, const TimeSeries& ts);
TimeSeries read_series_binary(const fs::path& path);
/// .bin goes through the binary reader, anything else through CSV.
TimeSeries read_series(const fs::path& path, double dt);

void write_constraints_csv(const fs::path& prefix, const ConstraintSystem& cs);

json lp_to_json(const LpProblem& p);
LpProblem lp_from_json(const json& j);
json lp_solution_to_json(const LpSolution& s);

json edges_to_json(const EdgeSet& e);
EdgeSet edges_from_json(const json& j);

json reconstruction_to_json(const ReconstructionResult& r);

json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const json& j);

}  // namespace lyapnet::io
