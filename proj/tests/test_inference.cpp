#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "doctest.h"
#include "hybridcov/inference.hpp"
#include "hybridcov/optimize.hpp"

using namespace hybridcov;

namespace {

Kernel exponential(double alpha, double omega, int dim) {
  return Kernel(KernelSpec{Family::matern, {{"alpha", alpha}, {"nu", 0.5}, {"omega", omega}}, dim});
}

FieldSample five_points() {
  FieldSample s;
  s.locations.points.resize(5, 2);
  s.locations.points << 0.0, 0.0, 0.4, 0.1, 1.2, 0.7, 0.3, 1.5, 2.0, 2.0;
  s.values.resize(5);
  s.values << 0.3, -1.1, 0.8, 0.05, -0.6;
  return s;
}

// Dense evaluation through an LU determinant and inverse.
double dense_nll(const Kernel& k, const FieldSample& s) {
  const Eigen::Index n = s.values.size();
  Eigen::MatrixXd sigma(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      sigma(i, j) = k((s.locations.points.row(i) - s.locations.points.row(j)).norm());
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
  const double quad = s.values.dot(lu.inverse() * s.values);
  return 0.5 * (n * std::log(2.0 * std::numbers::pi) + std::log(lu.determinant()) + quad);
}

// Locations far enough apart that the exponential kernel gives Sigma = omega I.
FieldSample spread_sample(int n, std::uint64_t seed) {
  FieldSample s;
  s.locations.points.resize(n, 1);
  for (int i = 0; i < n; ++i) s.locations.points(i, 0) = 1000.0 * i;
  RandomStream rng(seed, 0);
  s.values.resize(n);
  for (int i = 0; i < n; ++i) s.values(i) = 1.7 * rng.normal();
  return s;
}

}  // namespace

TEST_CASE("likelihood of a single observation") {
  FieldSample s;
  s.locations.points = Eigen::MatrixXd::Zero(1, 2);
  s.values = Eigen::VectorXd::Constant(1, 0.7);
  const auto v = neg_log_likelihood(exponential(1.0, 2.5, 2), s);
  CHECK(v.ok);
  CHECK(v.value == doctest::Approx(0.5 * (std::log(2.0 * std::numbers::pi * 2.5) + 0.49 / 2.5)).epsilon(1e-14));
}

TEST_CASE("likelihood matches a dense evaluation") {
  const auto s = five_points();
  for (double alpha : {0.3, 1.0, 4.0}) {
    const Kernel k = exponential(alpha, 1.3, 2);
    CHECK(neg_log_likelihood(k, s).value == doctest::Approx(dense_nll(k, s)).epsilon(1e-12));
  }
  const Kernel cm(KernelSpec{Family::hybrid_cm, {{"omega", 1.0}, {"alpha", 0.125}, {"nu1", 0.75}, {"nu2", 0.5}, {"xi", 40.0}}, 2});
  CHECK(neg_log_likelihood(cm, s).value == doctest::Approx(dense_nll(cm, s)).epsilon(1e-10));
}

TEST_CASE("likelihood is invariant to reordering") {
  const auto s = five_points();
  FieldSample r = s;
  const int order[] = {3, 0, 4, 2, 1};
  for (int i = 0; i < 5; ++i) {
    r.locations.points.row(i) = s.locations.points.row(order[i]);
    r.values(i) = s.values(order[i]);
  }
  const Kernel k = exponential(0.8, 1.0, 2);
  CHECK(neg_log_likelihood(k, r).value == doctest::Approx(neg_log_likelihood(k, s).value).epsilon(1e-13));
}

TEST_CASE("likelihood under variance scaling") {
  const auto s = five_points();
  const double c = 3.7;
  const auto a = neg_log_likelihood(exponential(0.8, 1.0, 2), s);
  const auto b = neg_log_likelihood(exponential(0.8, c, 2), s);
  // quad term scales by 1/c, log det shifts by n log c.
  const double quad = 2.0 * a.value - 5.0 * std::log(2.0 * std::numbers::pi) - std::log(
      Eigen::FullPivLU<Eigen::MatrixXd>(covariance_matrix(exponential(0.8, 1.0, 2), s.locations)).determinant());
  CHECK(b.value - a.value == doctest::Approx(0.5 * (5.0 * std::log(c) + quad * (1.0 / c - 1.0))).epsilon(1e-10));
}

TEST_CASE("likelihood under joint data and variance scaling") {
  const auto s = five_points();
  for (double c : {-2.5, 0.1, 7.0}) {
    FieldSample t = s;
    t.values *= c;
    const Kernel cm1(KernelSpec{Family::hybrid_cm, {{"omega", 0.8}, {"alpha", 0.3}, {"nu1", 0.75}, {"nu2", 1.5}, {"xi", 10.0}}, 2});
    const Kernel cm2(KernelSpec{Family::hybrid_cm, {{"omega", 0.8 * c * c}, {"alpha", 0.3}, {"nu1", 0.75}, {"nu2", 1.5}, {"xi", 10.0}}, 2});
    CHECK(neg_log_likelihood(cm2, t).value - neg_log_likelihood(cm1, s).value ==
          doctest::Approx(5.0 * std::log(std::fabs(c))).epsilon(1e-10));
  }
}

TEST_CASE("likelihood of zero data with identity covariance") {
  auto s = spread_sample(7, 1);
  s.values.setZero();
  CHECK(neg_log_likelihood(exponential(1.0, 1.0, 1), s).value ==
        doctest::Approx(3.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("failed factorization returns the penalty") {
  FieldSample s = five_points();
  s.locations.points.row(1) = s.locations.points.row(0);
  s.locations.points.row(2) = s.locations.points.row(0);
  const auto v = neg_log_likelihood(exponential(0.5, 1.0, 2), s, std::vector<double>{0.0});
  CHECK_FALSE(v.ok);
  CHECK(v.value == kFailedLikelihoodPenalty);
  CHECK_FALSE(v.diagnostic.empty());
}

TEST_CASE("nelder-mead on test functions") {
  const Objective rosen = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  NelderMeadOptions o;
  o.max_iterations = 5000;
  const auto r = nelder_mead(rosen, x0, o);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.simplex_size < 1e-8);

  const Objective walls = [](const Eigen::VectorXd& x) {
    return x(0) < 0.0 ? std::nan("") : (x(0) - 2.0) * (x(0) - 2.0);
  };
  const auto w = nelder_mead(walls, Eigen::VectorXd::Constant(1, 0.1));
  CHECK(w.x(0) == doctest::Approx(2.0).epsilon(1e-7));

  o.max_iterations = 3;
  CHECK_FALSE(nelder_mead(rosen, x0, o).converged);
}

TEST_CASE("hessian of a quadratic") {
  Eigen::Matrix2d a;
  a << 3.0, 1.0, 1.0, 2.0;
  const Objective q = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) + x.sum(); };
  const Eigen::MatrixXd h = numerical_hessian(q, Eigen::Vector2d(0.3, -0.2), 1e-3);
  CHECK((h - a).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("fitting an iid variance") {
  const int n = 400;
  const auto s = spread_sample(n, 5);
  ParamMask mask{{"omega"}, {{"alpha", 1.0}, {"nu", 0.5}}};
  FitOptions opt;
  opt.n_starts = 2;
  const auto fit = fit_mle(Family::matern, 1, mask, s, {{"omega", 1.0}}, opt);
  const double omega = s.values.squaredNorm() / n;
  CHECK(fit.converged);
  CHECK(fit.estimates.at("omega") == doctest::Approx(omega).epsilon(1e-7));
  REQUIRE(fit.std_errors.count("omega"));
  CHECK(fit.std_errors.at("omega") == doctest::Approx(omega * std::sqrt(2.0 / n)).epsilon(1e-5));
  const double loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * omega) + 1.0);
  CHECK(fit.loglik == doctest::Approx(loglik).epsilon(1e-12));
  CHECK(fit.aic == doctest::Approx(2.0 - 2.0 * loglik).epsilon(1e-12));
  CHECK(aic(3, -10.0) == 26.0);
  CHECK(aic(3, 20.015) == doctest::Approx(-34.03).epsilon(1e-12));
  CHECK(aic(0, 20.015) == -40.03);
  CHECK(aic(4, 20.015) - aic(3, 20.015) == 2.0);
}

TEST_CASE("fits are deterministic and report their mask") {
  const auto s = five_points();
  ParamMask mask{{"omega", "alpha"}, {{"nu", 0.5}}};
  FitOptions opt;
  opt.seed = 12;
  const auto a = fit_mle(Family::matern, 2, mask, s, {{"omega", 0.5}, {"alpha", 1.0}}, opt);
  const auto b = fit_mle(Family::matern, 2, mask, s, {{"omega", 0.5}, {"alpha", 1.0}}, opt);
  CHECK(a.estimates == b.estimates);
  CHECK(a.n_evaluations == b.n_evaluations);
  CHECK(fit_to_json(a) == fit_to_json(b));
  CHECK(fit_to_json(a).find("\"k\": 2") != std::string::npos);
  // The optimum is no worse than the starting point.
  CHECK(-a.loglik <= neg_log_likelihood(exponential(1.0, 0.5, 2), s).value);
}

TEST_CASE("parsimonious xi is fitted on the tilde scale") {
  const auto s = five_points();
  ParamMask mask{{"xi"}, {{"omega", 1.0}, {"alpha", 0.5}, {"nu1", 0.75}, {"nu2", 0.5}}};
  FitOptions opt;
  opt.n_starts = 1;
  opt.std_errors = false;
  const auto fit = fit_mle(Family::hybrid_cm, 2, mask, s, {{"xi", 4.0}}, opt);
  CHECK(fit.mask.free.count("xi_tilde") == 1);
  CHECK(fit.estimates.count("xi_tilde") == 1);
  CHECK(fit.estimates.count("xi") == 0);
}

TEST_CASE("bad masks are rejected") {
  const auto s = five_points();
  CHECK_THROWS_AS(fit_mle(Family::matern, 2, {{"alpha"}, {}}, s, {{"alpha", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(Family::matern, 2, {{"alpha"}, {{"nu", 0.5}}}, s, {}), std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(Family::matern, 2, {{"alpha"}, {{"nu", 0.5}, {"alpha", 1.0}}}, s, {{"alpha", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(Family::matern, 2, {{"alpha"}, {{"nu", 0.5}}}, s, {{"alpha", -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(Family::matern, 3, {{"alpha"}, {{"nu", 0.5}}}, s, {{"alpha", 1.0}}), std::invalid_argument);
}
