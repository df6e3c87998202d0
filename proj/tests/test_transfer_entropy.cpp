#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lyapnet/sde.hpp"
#include "lyapnet/transfer_entropy.hpp"

using namespace lyapnet;

namespace {

// Y_t = 0.5 Y_{t-1} + 0.5 X_{t-1} + e_t with X, e white unit Gaussians.
// Channel 0 is X, channel 1 is Y.
TimeSeries ar1_pair(Eigen::Index length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  TimeSeries ts;
  ts.data.resize(2, length);
  double x = nd(rng), y = 0.0;
  for (Eigen::Index t = 0; t < length; ++t) {
    const double y_next = 0.5 * y + 0.5 * x + nd(rng);
    const double x_next = nd(rng);
    x = x_next;
    y = y_next;
    ts.data(0, t) = x;
    ts.data(1, t) = y;
  }
  return ts;
}

// Stationary covariance of (X_t, Y_t, X_{t-1}, Y_{t-1}), matching the
// estimator's variable layout delay * n + channel:
//   var Y = 0.25 var Y + 0.25 + 1 = 5/3,  cov(Y_t, Y_{t-1}) = 0.5 var Y,
//   cov(Y_t, X_{t-1}) = 0.5, all other cross terms vanish.
Matrix ar1_lagged_covariance() {
  const double vy = 5.0 / 3.0;
  Matrix c(4, 4);
  c << 1, 0, 0, 0,
       0, vy, 0.5, 0.5 * vy,
       0, 0.5, 1, 0,
       0, 0.5 * vy, 0, vy;
  return c;
}

TimeSeries white(Eigen::Index n, Eigen::Index length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TimeSeries ts;
  ts.data = fixtures::gaussian(n, length, rng);
  return ts;
}

TimeSeries simulate_seeded(const Matrix& a, std::uint64_t seed, Eigen::Index steps = 100000) {
  SimConfig sim;
  sim.seed = seed;
  sim.steps = steps;
  return simulate(a, sim);
}

}  // namespace

TEST_SUITE("te-priors") {

TEST_CASE("Gaussian CMI closed forms") {
  Matrix indep = Matrix::Identity(3, 3);
  CHECK(std::abs(gaussian_cmi(indep, {0}, {1}, {})) < 1e-10);

  Matrix rho(2, 2);
  rho << 1.0, 0.5, 0.5, 1.0;
  CHECK(gaussian_cmi(rho, {0}, {1}, {}) == doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-12));
  CHECK(gaussian_cmi(rho, {0}, {1}, {}) == doctest::Approx(0.143841).epsilon(1e-5));

  // Y duplicated into Z: the condition carries all shared information. The
  // duplicate makes the joint block singular, so regularize slightly.
  Matrix dup(3, 3);
  dup << 1.0, 0.5, 0.5, 0.5, 1.0, 1.0, 0.5, 1.0, 1.0;
  dup.diagonal().array() += 1e-9;
  CHECK(std::abs(gaussian_cmi(dup, {0}, {1}, {2})) < 1e-6);
}

TEST_CASE("Gaussian CMI symmetry and scale invariance") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const Matrix c = fixtures::random_spd(5, rng);
    const double base = gaussian_cmi(c, {0, 1}, {2}, {3, 4});
    CHECK(gaussian_cmi(c, {2}, {0, 1}, {3, 4}) == doctest::Approx(base).epsilon(1e-12));
    Vector s(5);
    s << 2.0, -0.3, 5.0, 0.1, -7.0;
    const Matrix scaled = s.asDiagonal() * c * s.asDiagonal();
    CHECK(std::abs(gaussian_cmi(scaled, {0, 1}, {2}, {3, 4}) - base) <= 1e-8);
  }
  Matrix c = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(gaussian_cmi(c, {}, {1}, {}), Error);
  CHECK_THROWS_AS(gaussian_cmi(c, {0}, {2}, {}), Error);
  Matrix sing = Matrix::Ones(2, 2);
  try {
    gaussian_cmi(sing, {0}, {1}, {});
    FAIL("expected SingularBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularBlock);
  }
}

TEST_CASE("AR(1) transfer entropy against the analytic oracle") {
  const double oracle = gaussian_cmi(ar1_lagged_covariance(), {2}, {1}, {3});
  CHECK(oracle == doctest::Approx(0.5 * std::log(1.25)).epsilon(1e-12));

  TeConfig cfg;
  const double te = conditional_te(ar1_pair(100000, 2), 0, 1, {}, cfg);
  CHECK(te > 0.0);
  CHECK(std::abs(te - oracle) <= 0.2 * oracle);
  // Nothing flows back from Y to X.
  CHECK(conditional_te(ar1_pair(100000, 2), 1, 0, {}, cfg) < 0.01 * oracle);
}

TEST_CASE("affine rescaling of channels leaves TE unchanged") {
  GeneratorConfig gen;
  gen.n = 4;
  gen.n_edges = 6;
  gen.seed = 3;
  TimeSeries ts = simulate_seeded(random_hurwitz(gen), 4, 20000);
  const TeEstimator before(ts, 1);
  const double base = before.conditional_te(0, 1, {2});
  const double lag2 = TeEstimator(ts, 2).conditional_te(3, 2, {0});
  ts.data.row(0) = 3.0 * ts.data.row(0).array() + 7.0;
  ts.data.row(1) = -0.2 * ts.data.row(1).array() - 1.0;
  ts.data.row(2) = 50.0 * ts.data.row(2);
  ts.data.row(3) = -ts.data.row(3).array() + 2.0;
  CHECK(std::abs(TeEstimator(ts, 1).conditional_te(0, 1, {2}) - base) <= 1e-8);
  CHECK(std::abs(TeEstimator(ts, 2).conditional_te(3, 2, {0}) - lag2) <= 1e-8);
}

TEST_CASE("conditioning on a mediator removes the indirect path") {
  Matrix a = -Matrix::Identity(3, 3);
  a(1, 0) = 0.9;  // X -> Z
  a(2, 1) = 0.9;  // Z -> Y
  const TeEstimator est(simulate_seeded(a, 5), 1);
  const double direct = est.conditional_te(0, 2, {});
  const double mediated = est.conditional_te(0, 2, {1});
  CHECK(direct > 0.0);
  CHECK(mediated < 0.1 * direct);
}

TEST_CASE("surrogate threshold") {
  SUBCASE("single surrogate has no spread term") {
    const TeEstimator est(white(2, 5000, 6), 1);
    TeConfig cfg;
    cfg.n_surrogates = 1;
    cfg.seed = 7;
    cfg.surrogate_k = 0.0;
    const double t0 = est.surrogate_threshold(0, 1, {}, cfg);
    cfg.surrogate_k = 3.0;
    CHECK(est.surrogate_threshold(0, 1, {}, cfg) == t0);
  }
  SUBCASE("a zero shift reproduces the raw estimate up to centering") {
    const TeEstimator est(white(3, 4000, 8), 1);
    CHECK(est.shifted_te(0, 1, {2}, 0) == doctest::Approx(est.conditional_te(0, 1, {2})).epsilon(1e-3));
  }
  SUBCASE("independent channels stay below the threshold") {
    int below = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const TeEstimator est(white(2, 20000, 100 + s), 1);
      TeConfig cfg;
      cfg.seed = s;
      if (est.conditional_te(0, 1, {}) < est.surrogate_threshold(0, 1, {}, cfg)) ++below;
    }
    CHECK(below >= 45);
  }
  SUBCASE("strong coupling clears the threshold") {
    int above = 0;
    Matrix a = -Matrix::Identity(2, 2);
    a(1, 0) = 2.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const TeEstimator est(simulate_seeded(a, 200 + s, 20000), 1);
      TeConfig cfg;
      cfg.seed = s;
      if (est.conditional_te(0, 1, {}) > est.surrogate_threshold(0, 1, {}, cfg)) ++above;
    }
    CHECK(above >= 19);
  }
}

TEST_CASE("greedy source selection") {
  Matrix a = -Matrix::Identity(4, 4);
  a(1, 0) = 2.0;
  a(1, 2) = 0.3;
  const TeEstimator est(simulate_seeded(a, 9), 1);
  TeConfig cfg;
  cfg.seed = 10;
  const auto picked = greedy_infer_sources(est, 1, cfg);
  REQUIRE_FALSE(picked.empty());
  CHECK(picked.front().source == 0);
  for (const auto& s : picked) CHECK(s.te_nats > s.threshold);

  cfg.max_sources_per_target = 0;
  CHECK(greedy_infer_sources(est, 1, cfg).empty());

  // Node 3 has no parents.
  cfg.max_sources_per_target = 5;
  int empty = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    TeConfig c = cfg;
    c.seed = s;
    const TeEstimator e(simulate_seeded(a, 300 + s, 20000), 1);
    empty += greedy_infer_sources(e, 3, c).empty() ? 1 : 0;
  }
  CHECK(empty >= 8);
}

TEST_CASE("edge inference") {
  SUBCASE("unidirectional pair") {
    Matrix a = -Matrix::Identity(2, 2);
    a(1, 0) = 0.8;
    int hits = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      TeConfig cfg;
      cfg.seed = s;
      const EdgeSet e = infer_edges(simulate_seeded(a, 400 + s), cfg);
      bool forward = false, reverse = false;
      for (const auto& edge : e.edges) {
        forward |= edge.source == 0 && edge.target == 1;
        reverse |= edge.source == 1 && edge.target == 0;
      }
      if (forward && !reverse) ++hits;
    }
    CHECK(hits >= 18);
  }
  SUBCASE("independent channels produce few spurious edges") {
    int spurious = 0;
    const int trials = 20;
    for (std::uint64_t s = 0; s < trials; ++s) {
      TeConfig cfg;
      cfg.seed = s;
      spurious += static_cast<int>(infer_edges(white(5, 20000, 500 + s), cfg).edges.size());
    }
    CHECK(static_cast<double>(spurious) / (trials * 20.0) <= 0.1);
  }
  SUBCASE("global cap") {
    GeneratorConfig gen;
    gen.n = 6;
    gen.n_edges = 15;
    gen.seed = 11;
    const TimeSeries ts = simulate_seeded(random_hurwitz(gen), 12);
    TeConfig cfg;
    cfg.seed = 13;
    const EdgeSet all = infer_edges(ts, cfg);
    REQUIRE(all.edges.size() > 3);
    cfg.max_total_edges = 3;
    CHECK(infer_edges(ts, cfg).edges.size() == 3);
  }
  SUBCASE("deterministic given the seed") {
    GeneratorConfig gen;
    gen.n = 5;
    gen.n_edges = 8;
    gen.seed = 14;
    const TimeSeries ts = simulate_seeded(random_hurwitz(gen), 15, 30000);
    TeConfig cfg;
    cfg.seed = 16;
    const EdgeSet x = infer_edges(ts, cfg), y = infer_edges(ts, cfg);
    REQUIRE(x.edges.size() == y.edges.size());
    for (std::size_t i = 0; i < x.edges.size(); ++i) {
      CHECK(x.edges[i].source == y.edges[i].source);
      CHECK(x.edges[i].target == y.edges[i].target);
      CHECK(x.edges[i].te_nats == y.edges[i].te_nats);
    }
  }
}

TEST_CASE("query validation") {
  const TeEstimator est(white(3, 200, 17), 1);
  CHECK_THROWS_AS(est.conditional_te(0, 0, {}), Error);
  CHECK_THROWS_AS(est.conditional_te(0, 3, {}), Error);
  CHECK_THROWS_AS(est.conditional_te(0, 1, {1}), Error);
  CHECK_THROWS_AS(TeEstimator(white(2, 3, 18), 1), Error);
  TeConfig bad;
  bad.lag = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

}  // TEST_SUITE
