#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "lyapnet/lyapunov.hpp"
#include "lyapnet/sde.hpp"

using namespace lyapnet;

TEST_SUITE("sde-simulator") {

TEST_CASE("degenerate generator settings give -I") {
  GeneratorConfig cfg;
  cfg.n = 6;
  cfg.n_edges = 0;
  CHECK(random_hurwitz(cfg) == Matrix(-Matrix::Identity(6, 6)));
  cfg.n_edges = 10;
  cfg.epsilon = 1.0;
  CHECK(random_hurwitz(cfg) == Matrix(-Matrix::Identity(6, 6)));
}

TEST_CASE("generator structure and abscissa") {
  GeneratorConfig cfg;
  cfg.n = 10;
  cfg.n_edges = 20;
  cfg.epsilon = 0.5;
  cfg.seed = 42;
  const HurwitzSample s = random_hurwitz_sample(cfg);
  int nonzeros = 0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    CHECK(s.b(i, i) == 0.0);
    CHECK(s.a(i, i) == -1.0);
    for (Eigen::Index j = 0; j < 10; ++j) nonzeros += (i != j && s.b(i, j) != 0.0) ? 1 : 0;
  }
  CHECK(nonzeros == 20);
  CHECK(has_directed_cycle(s.b));

  // Independent eigenvalue oracle: abscissa(B) from a fresh solve, then the
  // scaling identity abscissa(A) = -1 + (1 - eps) = -eps.
  Eigen::EigenSolver<Matrix> eb(s.b, false);
  const double b_max = eb.eigenvalues().real().maxCoeff();
  CHECK(b_max == doctest::Approx(s.b_max).epsilon(1e-10));
  Eigen::EigenSolver<Matrix> ea(s.a, false);
  const double a_max = ea.eigenvalues().real().maxCoeff();
  CHECK(std::abs(a_max - (-1.0 + (1.0 - cfg.epsilon))) <= 1e-8);
  CHECK(std::abs(s.abscissa + cfg.epsilon) <= 1e-8);
  CHECK(is_hurwitz(s.a));
}

TEST_CASE("generator output is always Hurwitz with margin") {
  for (int seed = 0; seed < 60; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 3 + seed % 8;
    cfg.n_edges = std::min<Eigen::Index>(cfg.n * (cfg.n - 1), 2 + seed % 25);
    cfg.epsilon = 0.05 + 0.9 * (seed % 10) / 9.0;
    cfg.seed = static_cast<std::uint64_t>(seed);
    CHECK(is_hurwitz(random_hurwitz(cfg), 1e-6));
  }
}

TEST_CASE("cycle detection") {
  Matrix b = Matrix::Zero(3, 3);
  b(1, 0) = 1.0;
  b(2, 1) = 1.0;
  CHECK_FALSE(has_directed_cycle(b));
  b(0, 2) = 1.0;
  CHECK(has_directed_cycle(b));
}

TEST_CASE("generator validation") {
  GeneratorConfig cfg;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(random_hurwitz(cfg), Error);
  cfg.epsilon = 0.5;
  cfg.n = 3;
  cfg.n_edges = 7;
  CHECK_THROWS_AS(random_hurwitz(cfg), Error);
  // Two nodes, one edge: never a cycle, so retries run out.
  cfg.n = 2;
  cfg.n_edges = 1;
  try {
    random_hurwitz(cfg);
    FAIL("expected RetryExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RetryExhausted);
  }
}

TEST_CASE("OU stationary variance") {
  SimConfig sim;
  sim.seed = 5;
  const TimeSeries ts = simulate(Matrix(-Matrix::Identity(1, 1)), sim);
  CHECK(ts.length() == 100000);
  const double var = empirical_covariance(ts.data)(0, 0);
  CHECK(var >= 0.45);
  CHECK(var <= 0.55);
}

TEST_CASE("deterministic decay without noise") {
  std::mt19937_64 rng(6);
  const Matrix a = -fixtures::random_spd(5, rng);
  SimConfig sim;
  sim.noise = false;
  sim.steps = 200;
  sim.initial_state = Vector::Ones(5);
  const TimeSeries ts = simulate(a, sim);
  double prev = std::sqrt(5.0);
  for (Eigen::Index k = 0; k < ts.length(); ++k) {
    const double norm = ts.data.col(k).norm();
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("empirical covariance matches the Lyapunov solution") {
  GeneratorConfig gen;
  gen.n = 10;
  gen.n_edges = 20;
  gen.epsilon = 0.5;
  gen.seed = 7;
  const Matrix a = random_hurwitz(gen);
  const Matrix g = forward_lyapunov_solve(a);
  SimConfig sim;
  sim.seed = 8;
  const Matrix est = empirical_covariance(simulate(a, sim).data);
  CHECK(max_abs(Matrix(est - g)) <= 0.1 * max_abs(g));
}

TEST_CASE("covariance error shrinks with longer runs") {
  GeneratorConfig gen;
  gen.n = 5;
  gen.n_edges = 8;
  gen.epsilon = 0.5;
  gen.seed = 9;
  const Matrix a = random_hurwitz(gen);
  const Matrix g = forward_lyapunov_solve(a);
  auto error_at = [&](Eigen::Index steps) {
    double total = 0.0;
    for (std::uint64_t rep = 0; rep < 6; ++rep) {
      SimConfig sim;
      sim.steps = steps;
      sim.seed = 1000 * rep + static_cast<std::uint64_t>(steps);
      total += max_abs(Matrix(empirical_covariance(simulate(a, sim).data) - g));
    }
    return total / 6.0;
  };
  // Short runs; the dt bias floor is well below these errors.
  CHECK(error_at(16000) <= 2.0 * (error_at(4000) / 2.0));
}

TEST_CASE("bit-identical given the seed") {
  GeneratorConfig gen;
  gen.n = 4;
  gen.n_edges = 6;
  gen.seed = 10;
  const Matrix a = random_hurwitz(gen);
  for (const Dynamics d : {Dynamics::Linear, Dynamics::Tanh}) {
    SimConfig sim;
    sim.steps = 5000;
    sim.seed = 11;
    sim.dynamics = d;
    const TimeSeries x = simulate(a, sim);
    const TimeSeries y = simulate(a, sim);
    CHECK(x.data == y.data);
    sim.seed = 12;
    CHECK(simulate(a, sim).data != x.data);
  }
}

TEST_CASE("tanh dynamics") {
  SUBCASE("diagonal A matches the linear run") {
    Matrix a = Matrix::Zero(3, 3);
    a.diagonal() << -1.0, -0.5, -2.0;
    SimConfig sim;
    sim.steps = 3000;
    sim.seed = 13;
    const TimeSeries lin = simulate_linear(a, sim);
    const TimeSeries nl = simulate_tanh(a, sim);
    CHECK(lin.data == nl.data);
  }
  SUBCASE("small-signal drift agrees with the linear drift") {
    GeneratorConfig gen;
    gen.n = 10;
    gen.n_edges = 20;
    gen.seed = 14;
    const Matrix a = random_hurwitz(gen);
    std::mt19937_64 rng(15);
    Vector x = fixtures::gaussian(10, 1, rng);
    x *= 0.01;
    const double rel = (tanh_drift(a, x) - linear_drift(a, x)).norm() / linear_drift(a, x).norm();
    CHECK(rel <= 1e-3);
    // Third-order remainder: halving x cuts the absolute gap by about 8.
    const double gap1 = (tanh_drift(a, x) - linear_drift(a, x)).norm();
    const double gap2 = (tanh_drift(a, Vector(x / 2)) - linear_drift(a, Vector(x / 2))).norm();
    CHECK(gap1 / gap2 == doctest::Approx(8.0).epsilon(0.05));
  }
  SUBCASE("seeded n=10 run stays bounded") {
    GeneratorConfig gen;
    gen.n = 10;
    gen.n_edges = 20;
    gen.epsilon = 0.5;
    gen.seed = 16;
    SimConfig sim;
    sim.seed = 17;
    sim.dynamics = Dynamics::Tanh;
    CHECK_NOTHROW(simulate(random_hurwitz(gen), sim));
  }
}

TEST_CASE("simulation errors") {
  SimConfig sim;
  sim.steps = 1000;
  try {
    simulate(Matrix(Matrix::Identity(2, 2)), sim);
    FAIL("expected Blowup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Blowup);
  }
  sim.dt = -1.0;
  CHECK_THROWS_AS(simulate(Matrix(-Matrix::Identity(2, 2)), sim), Error);
  sim.dt = 0.1;
  sim.initial_state = Vector::Zero(3);
  CHECK_THROWS_AS(simulate(Matrix(-Matrix::Identity(2, 2)), sim), Error);
  CHECK(parse_dynamics("tanh") == Dynamics::Tanh);
  CHECK_THROWS_AS(parse_dynamics("cubic"), Error);
}

}  // TEST_SUITE
