#pragma once

// Random sparse Hurwitz ground truths and Euler-Maruyama simulation of
//   linear:  dx = A x dt + dW
//   tanh:    dx_i = (A_ii x_i + sum_{j != i} tanh(A_ij x_j)) dt + dW_i

#include <cstdint>
#include <optional>
#include <string>

#include "lyapnet/types.hpp"

namespace lyapnet {

struct GeneratorConfig {
  Eigen::Index n = 10;
  Eigen::Index n_edges = 20;  // off-diagonal nonzeros of B
  double epsilon = 0.5;       // in (0, 1]
  std::uint64_t seed = 0;
  int max_retries = 100;

  void validate() const;
};

struct HurwitzSample {
  Matrix a;
  Matrix b;            // raw Erdos-Renyi weights, zero diagonal
  double b_max = 0;    // spectral abscissa of b (0 when b has no cycle)
  double abscissa = 0; // measured spectral abscissa of a
  int attempts = 0;
};

/// A = -I + ((1 - epsilon) / b_max) B with B supported on exactly n_edges
/// uniformly chosen off-diagonal positions and standard normal weights.
/// Draws with b_max <= 0 (acyclic or purely oscillatory support), or whose
/// rescaled abscissa misses -epsilon by more than 1e-8, are redrawn.
HurwitzSample random_hurwitz_sample(const GeneratorConfig& cfg);
Matrix random_hurwitz(const GeneratorConfig& cfg);

/// True when the directed graph of the off-diagonal support contains a cycle.
bool has_directed_cycle(const Matrix& b);

enum class Dynamics { Linear, Tanh };

const char* to_string(Dynamics d) noexcept;
Dynamics parse_dynamics(const std::string& s);

struct SimConfig {
  double dt = 0.1;
  Eigen::Index steps = 100000;
  std::uint64_t seed = 0;
  Dynamics dynamics = Dynamics::Linear;
  bool noise = true;                     // false: deterministic drift only
  std::optional<Vector> initial_state;   // zero when unset

  void validate() const;
};

/// n channels x T samples; column k is the state after step k+1.
struct TimeSeries {
  Matrix data;
  double dt = 0.1;
  std::uint64_t seed = 0;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index length() const { return data.cols(); }
};

inline constexpr double kBlowupThreshold = 1e8;

Vector linear_drift(const Matrix& a, const Vector& x);
Vector tanh_drift(const Matrix& a, const Vector& x);

TimeSeries simulate_linear(const Matrix& a, SimConfig cfg);
TimeSeries simulate_tanh(const Matrix& a, SimConfig cfg);
TimeSeries simulate(const Matrix& a, const SimConfig& cfg);

}  // namespace lyapnet
