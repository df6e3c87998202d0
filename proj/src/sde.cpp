#include "lyapnet/sde.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "lyapnet/lyapunov.hpp"

namespace lyapnet {

void GeneratorConfig::validate() const {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "generator: n must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidArgument, "generator: epsilon must lie in (0, 1]");
  if (n_edges < 0 || n_edges > n * (n - 1)) {
    throw Error(ErrorCode::InvalidArgument, "generator: edge count must lie in [0, n(n-1)]");
  }
  if (max_retries < 1) throw Error(ErrorCode::InvalidArgument, "generator: max_retries must be >= 1");
}

namespace {
constexpr double kAbscissaTolerance = 1e-8;
}  // namespace

bool has_directed_cycle(const Matrix& b) {
  const Eigen::Index n = b.rows();
  // Edge j -> i for b(i, j) != 0. Kahn's algorithm on in-degrees.
  std::vector<int> indeg(n, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && b(i, j) != 0.0) ++indeg[i];
  std::vector<Eigen::Index> ready;
  for (Eigen::Index i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  Eigen::Index removed = 0;
  while (!ready.empty()) {
    const Eigen::Index j = ready.back();
    ready.pop_back();
    ++removed;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && b(i, j) != 0.0 && --indeg[i] == 0) ready.push_back(i);
    }
  }
  return removed < n;
}

HurwitzSample random_hurwitz_sample(const GeneratorConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = cfg.n;
  HurwitzSample out;
  out.b = Matrix::Zero(n, n);
  if (cfg.n_edges == 0 || cfg.epsilon == 1.0) {
    out.a = -Matrix::Identity(n, n);
    out.abscissa = -1.0;
    out.attempts = 1;
    return out;
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::Index> slots(static_cast<std::size_t>(n * (n - 1)));
  std::iota(slots.begin(), slots.end(), Eigen::Index{0});

  for (int attempt = 1; attempt <= cfg.max_retries; ++attempt) {
    // Partial Fisher-Yates: the first n_edges slots are a uniform sample.
    for (Eigen::Index k = 0; k < cfg.n_edges; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, slots.size() - 1);
      std::swap(slots[k], slots[pick(rng)]);
    }
    Matrix b = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < cfg.n_edges; ++k) {
      const Eigen::Index s = slots[k];
      const Eigen::Index i = s / (n - 1);
      Eigen::Index j = s % (n - 1);
      if (j >= i) ++j;
      b(i, j) = normal(rng);
    }
    // Acyclic supports are nilpotent; skip the eigen solve, whose rounding
    // would otherwise report a tiny spurious abscissa.
    if (!has_directed_cycle(b)) continue;
    const double b_max = spectral_abscissa(b);
    if (!(b_max > 1e-9 * max_abs(b))) continue;

    // A defective zero eigenvalue of B shows up as a rounding-level b_max that
    // the rescaling then amplifies; such draws miss the design abscissa -eps.
    const Matrix a = -Matrix::Identity(n, n) + ((1.0 - cfg.epsilon) / b_max) * b;
    const double abscissa = spectral_abscissa(a);
    if (!(std::abs(abscissa + cfg.epsilon) <= kAbscissaTolerance)) continue;

    out.b = b;
    out.b_max = b_max;
    out.a = a;
    out.abscissa = abscissa;
    out.attempts = attempt;
    return out;
  }
  throw Error(ErrorCode::RetryExhausted, "random_hurwitz: no draw with a usable positive spectral abscissa");
}

Matrix random_hurwitz(const GeneratorConfig& cfg) { return random_hurwitz_sample(cfg).a; }

const char* to_string(Dynamics d) noexcept { return d == Dynamics::Linear ? "linear" : "tanh"; }

Dynamics parse_dynamics(const std::string& s) {
  if (s == "linear" || s == "Linear") return Dynamics::Linear;
  if (s == "tanh" || s == "Tanh") return Dynamics::Tanh;
  throw Error(ErrorCode::InvalidArgument, "unknown dynamics '" + s + "'");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation: dt must be positive");
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "simulation: steps must be >= 1");
}

Vector linear_drift(const Matrix& a, const Vector& x) { return a * x; }

Vector tanh_drift(const Matrix& a, const Vector& x) {
  const Eigen::Index n = a.rows();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = a(i, i) * x(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && a(i, j) != 0.0) acc += std::tanh(a(i, j) * x(j));
    }
    out(i) = acc;
  }
  return out;
}

namespace {

template <typename Drift>
TimeSeries euler_maruyama(const Matrix& a, const SimConfig& cfg, Drift drift) {
  cfg.validate();
  if (a.rows() != a.cols() || a.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "simulation: A must be square");
  const Eigen::Index n = a.rows();
  Vector x = cfg.initial_state.value_or(Vector::Zero(n));
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "simulation: initial state has wrong length");

  TimeSeries ts;
  ts.dt = cfg.dt;
  ts.seed = cfg.seed;
  ts.data.resize(n, cfg.steps);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  const double sqdt = std::sqrt(cfg.dt);
  Vector xi = Vector::Zero(n);
  for (Eigen::Index k = 0; k < cfg.steps; ++k) {
    if (cfg.noise) {
      for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(rng);
    }
    x += cfg.dt * drift(a, x) + sqdt * xi;
    if (!(x.cwiseAbs().maxCoeff() <= kBlowupThreshold)) {
      throw Error(ErrorCode::Blowup, "simulation diverged at step " + std::to_string(k + 1));
    }
    ts.data.col(k) = x;
  }
  return ts;
}

}  // namespace

TimeSeries simulate_linear(const Matrix& a, SimConfig cfg) {
  cfg.dynamics = Dynamics::Linear;
  return euler_maruyama(a, cfg, [](const Matrix& m, const Vector& x) { return Vector(m * x); });
}

TimeSeries simulate_tanh(const Matrix& a, SimConfig cfg) {
  cfg.dynamics = Dynamics::Tanh;
  return euler_maruyama(a, cfg, tanh_drift);
}

TimeSeries simulate(const Matrix& a, const SimConfig& cfg) {
  return cfg.dynamics == Dynamics::Linear ? simulate_linear(a, cfg) : simulate_tanh(a, cfg);
}

}  // namespace lyapnet
