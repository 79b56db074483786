#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hybridcov/randfield.hpp"

using namespace hybridcov;

namespace {

Kernel exponential(double alpha = 1.0, int dim = 1) {
  return Kernel(KernelSpec{Family::matern, {{"alpha", alpha}, {"nu", 0.5}}, dim});
}

Locations line(std::initializer_list<double> xs) {
  Locations l;
  l.points.resize(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) l.points(i++, 0) = x;
  return l;
}

}  // namespace

TEST_CASE("philox known answers") {
  // Published Random123 known-answer vectors.
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  CHECK(Philox4x32::block({1, 0, 0, 0}, {0, 0}) == Philox4x32::Counter{0xf8e4cca4u, 0x5cb200dbu, 0xb1a574ebu, 0x097eff67u});
}

TEST_CASE("random streams") {
  RandomStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool differs_stream = false;
  bool differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    differs_stream = differs_stream || u != c.uniform();
    differs_seed = differs_seed || u != d.uniform();
  }
  CHECK(differs_stream);
  CHECK(differs_seed);

  RandomStream n(7, 3);
  double s = 0.0, s2 = 0.0;
  const int m = 20000;
  for (int i = 0; i < m; ++i) {
    const double z = n.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s / m) < 0.03);
  CHECK(std::fabs(s2 / m - 1.0) < 0.04);
}

TEST_CASE("uniform locations") {
  const auto a = sample_uniform_locations(100, {0, 0}, {3, 3}, 1);
  const auto b = sample_uniform_locations(100, {0, 0}, {3, 3}, 1);
  CHECK(a.size() == 100);
  CHECK(a.dim() == 2);
  CHECK(a.points == b.points);
  CHECK(a.points.minCoeff() >= 0.0);
  CHECK(a.points.maxCoeff() <= 3.0);
  CHECK(sample_uniform_locations(256, {0, 0}, {3, 3}, 1).size() == 256);

  const auto u = sample_uniform_locations(10000, {0}, {1}, 5);
  CHECK(std::fabs(u.points.mean() - 0.5) < 0.02);

  CHECK_THROWS_AS(sample_uniform_locations(5, {0, 0}, {1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_uniform_locations(5, {1}, {0}, 1), std::invalid_argument);
}

TEST_CASE("covariance matrices") {
  const Kernel k = exponential();
  const auto one = covariance_matrix(k, line({0.3}));
  CHECK(one.rows() == 1);
  CHECK(one(0, 0) == 1.0);

  const auto three = covariance_matrix(k, line({0.0, 1.0, 2.0}));
  CHECK(three(0, 0) == 1.0);
  CHECK(three(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(three(0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  const auto dup = covariance_matrix(k, line({0.5, 0.5, 1.0}));
  CHECK(dup(0, 1) == k.variance());

  const Kernel hybrid(KernelSpec{Family::hybrid_cm, {{"omega", 1.0}, {"alpha", 0.125}, {"nu1", 0.75}, {"nu2", 0.5}, {"xi", 40.0}}, 2});
  const auto loc = sample_uniform_locations(60, {0, 0}, {3, 3}, 3);
  const auto s = covariance_matrix(hybrid, loc);
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.diagonal().array() == hybrid.variance()).all());

  CHECK_THROWS_AS(covariance_matrix(exponential(1.0, 2), line({0.0, 1.0})), std::invalid_argument);
}

TEST_CASE("jitter ladder") {
  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
  const auto f = factorize(singular, 1.0, {0.0, 1e-10, 1e-8});
  CHECK(f.jitter > 0.0);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(factorize(indefinite, 1.0), FactorizationError);
  try {
    factorize(indefinite, 1.0);
  } catch (const FactorizationError& e) {
    CHECK(e.last_jitter() == 1e-6);
    CHECK(e.condition_estimate() == doctest::Approx(3.0));
  }

  SimulationConfig bad;
  bad.jitter_ladder = {1e-8};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.jitter_ladder = {0.0, 1e-6, 1e-8};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("simulation is replayable") {
  const Kernel k = exponential(0.5, 2);
  const auto loc = sample_uniform_locations(20, {0, 0}, {1, 1}, 2);
  SimulationConfig cfg;
  cfg.seed = 99;
  cfg.n_replicates = 2;
  const auto a = simulate(k, loc, cfg);
  const auto b = simulate(k, loc, cfg);
  REQUIRE(a.replicates.size() == 2);
  CHECK(a.replicates[0].values == b.replicates[0].values);
  CHECK(a.replicates[1].values == b.replicates[1].values);
  CHECK(a.replicates[0].values != a.replicates[1].values);

  // Replicate r depends only on (seed, r).
  cfg.n_replicates = 1;
  CHECK(simulate(k, loc, cfg).replicates[0].values == a.replicates[0].values);
}

TEST_CASE("empirical covariance converges") {
  const Kernel k = exponential(1.0, 1);
  const auto loc = line({0.0, 0.3, 0.9, 1.7, 3.0});
  SimulationConfig cfg;
  cfg.seed = 2024;
  cfg.n_replicates = 5000;
  const auto sim = simulate(k, loc, cfg);
  Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(5, 5);
  for (const auto& r : sim.replicates) emp += r.values * r.values.transpose();
  emp /= static_cast<double>(cfg.n_replicates);
  const Eigen::MatrixXd sigma = covariance_matrix(k, loc);
  CHECK((emp - sigma).norm() / sigma.norm() < 0.05);
}

TEST_CASE("scenario (a) needs little jitter") {
  const Kernel k(KernelSpec{Family::hybrid_cm, {{"omega", 1.0}, {"alpha", 0.125}, {"nu1", 0.75}, {"nu2", 0.5}, {"xi", 40.0}}, 2});
  for (int n : {100, 256}) {
    const auto loc = sample_uniform_locations(n, {0, 0}, {3, 3}, 11);
    SimulationConfig cfg;
    cfg.seed = 1;
    const auto sim = simulate(k, loc, cfg);
    CHECK(sim.jitter_used <= 1e-10);

    const Eigen::MatrixXd sigma = covariance_matrix(k, loc);
    const auto f = factorize(sigma, k.variance());
    Eigen::MatrixXd target = sigma;
    target.diagonal().array() += f.jitter * k.variance();
    const Eigen::MatrixXd l = f.llt.matrixL();
    CHECK((l * l.transpose() - target).cwiseAbs().maxCoeff() <= 1e-9 * k.variance());
  }
}

TEST_CASE("field CSV round trip") {
  FieldSample s;
  s.locations = sample_uniform_locations(7, {0, -1}, {3, 1}, 4);
  s.values = Eigen::VectorXd::LinSpaced(7, -1.0 / 3.0, 2.0 / 7.0);
  std::stringstream buf;
  write_field_csv(buf, s);
  CHECK(buf.str().rfind("x1,x2,value\n", 0) == 0);
  const auto back = read_field_csv(buf);
  CHECK(back.locations.points == s.locations.points);
  CHECK(back.values == s.values);

  std::stringstream bad1("x1,value\n1,2\n3\n");
  CHECK_THROWS_AS(read_field_csv(bad1), std::runtime_error);
  std::stringstream bad2("a,b\n1,2\n");
  CHECK_THROWS_AS(read_field_csv(bad2), std::runtime_error);
  std::stringstream bad3("x1,value\n1,abc\n");
  CHECK_THROWS_AS(read_field_csv(bad3), std::runtime_error);
}
