#include <cmath>
#include <random>

#include "doctest.h"
#include "hybridcov/kernels.hpp"
#include "hybridcov/mixture_oracle.hpp"
#include "hybridcov/specfun.hpp"

using namespace hybridcov;

namespace {

HybridCMParams cm_reference(double nu2, double xi) {
  return kernels::expand_parsimonious(ParsimoniousCM{0.5, 0.125, 0.75, nu2, 0.125 * std::sqrt(xi)});
}

HybridHMParams hm_reference(double nu, double xi) {
  HybridHMParams p;
  p.lambda1 = p.lambda2 = MaternParams{0.125, nu};
  p.omega1 = p.omega2 = 0.5;
  p.xi1 = p.xi2 = xi;
  p.tau = 2.0;
  p.eta = 3.5;
  return p;
}

template <class Closed>
double worst_gap(const std::vector<MixtureSegment>& segs, Closed closed, QuadratureScheme scheme) {
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double h = 0.05 * i;
    worst = std::max(worst, std::fabs(closed(h) - eval_mixture(segs, h, oracle_settings(), scheme)));
  }
  return worst;
}

}  // namespace

TEST_CASE("single-segment mixtures reproduce the base families") {
  const CauchyParams c{0.125, 0.75};
  const auto cs = cauchy_segments(c);
  for (double h : {0.0, 1.0, 4.0}) CHECK(std::fabs(eval_mixture(cs, h) - kernels::cauchy(h, c)) <= 1e-10);

  for (const MaternParams m : {MaternParams{1.0, 0.75}, MaternParams{0.125, 0.5}, MaternParams{0.3, 2.5}}) {
    const auto ms = matern_segments(m);
    for (double h : {0.0, 0.2, 1.0, 3.0}) CHECK(std::fabs(eval_mixture(ms, h) - kernels::matern(h, m)) <= 1e-10);
  }
}

TEST_CASE("closed forms match the oracle on the reference configurations") {
  for (double nu2 : {0.5, 1.5}) {
    for (double xi : {1.0, 10.0, 40.0, 100.0}) {
      const auto p = cm_reference(nu2, xi);
      const auto closed = [&](double h) { return kernels::hybrid_cm(h, p); };
      CHECK(worst_gap(hybrid_cm_segments(p), closed, QuadratureScheme::gauss_kronrod) <= 1e-8);
    }
  }
  for (double nu : {0.5, 1.5}) {
    for (double xi : {1.0, 10.0, 100.0}) {
      const auto p = hm_reference(nu, xi);
      const auto closed = [&](double h) { return kernels::hybrid_hm(h, p); };
      CHECK(worst_gap(hybrid_hm_segments(p), closed, QuadratureScheme::gauss_kronrod) <= 1e-8);
    }
  }
}

TEST_CASE("closed forms match the oracle on randomized parameters") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };

  for (int k = 0; k < 20; ++k) {
    HybridCMParams p;
    p.lambda1 = CauchyParams{log_uniform(0.02, 2.0), log_uniform(0.25, 3.0)};
    p.lambda2 = MaternParams{log_uniform(0.05, 1.0), log_uniform(0.25, 3.0)};
    p.omega1 = log_uniform(0.2, 3.0);
    p.omega2 = log_uniform(0.2, 3.0);
    p.xi1 = log_uniform(0.5, 200.0);
    p.xi2 = log_uniform(0.5, 200.0);
    const double scale = std::max(1.0, kernels::hybrid_cm(0.0, p));
    const auto closed = [&](double h) { return kernels::hybrid_cm(h, p); };
    CHECK(worst_gap(hybrid_cm_segments(p), closed, QuadratureScheme::gauss_kronrod) <= 1e-8 * scale);
  }

  for (int k = 0; k < 20; ++k) {
    HybridHMParams p;
    p.lambda1 = MaternParams{log_uniform(0.05, 1.0), log_uniform(0.25, 3.0)};
    p.lambda2 = MaternParams{log_uniform(0.05, 1.0), log_uniform(0.25, 3.0)};
    p.omega1 = log_uniform(0.2, 3.0);
    p.omega2 = log_uniform(0.2, 3.0);
    p.xi1 = log_uniform(0.5, 200.0);
    p.xi2 = log_uniform(0.5, 200.0);
    p.dim = 1 + k % 3;
    p.tau = 1.2 + 3.0 * unit(rng);
    p.eta = 1.0 + (std::pow(p.tau, 2.0 / p.dim) - 1.0) * (0.05 + 0.9 * unit(rng));
    const double scale = std::max(1.0, std::fabs(kernels::hybrid_hm(0.0, p)));
    const auto closed = [&](double h) { return kernels::hybrid_hm(h, p); };
    CHECK(worst_gap(hybrid_hm_segments(p), closed, QuadratureScheme::gauss_kronrod) <= 1e-8 * scale);
  }
}

TEST_CASE("two quadrature schemes agree") {
  for (double nu2 : {0.5, 1.5}) {
    for (double xi : {1.0, 10.0, 100.0}) {
      const auto segs = hybrid_cm_segments(cm_reference(nu2, xi));
      const auto kronrod = [&](double h) { return eval_mixture(segs, h); };
      CHECK(worst_gap(segs, kronrod, QuadratureScheme::gauss_legendre) <= 1e-9);
    }
  }
  for (double nu : {0.5, 1.5}) {
    for (double xi : {1.0, 10.0, 100.0}) {
      const auto segs = hybrid_hm_segments(hm_reference(nu, xi));
      const auto kronrod = [&](double h) { return eval_mixture(segs, h); };
      CHECK(worst_gap(segs, kronrod, QuadratureScheme::gauss_legendre) <= 1e-9);
    }
  }
}

TEST_CASE("linearity in weights") {
  auto segs = hybrid_cm_segments(cm_reference(0.5, 40.0));
  const double base = eval_mixture(segs, 0.4);
  for (auto& s : segs) s.weight *= 2.0;
  CHECK(std::fabs(eval_mixture(segs, 0.4) - 2.0 * base) <= 1e-12);
}

TEST_CASE("mass identity at the origin") {
  const auto p = cm_reference(1.5, 40.0);
  const double b = 1.0 / (4.0 * p.xi2 * p.lambda2.alpha * p.lambda2.alpha);
  const double mass = p.omega1 * specfun::reg_lower_gamma(0.5 * p.lambda1.nu, p.lambda1.alpha * p.xi1) +
                      p.omega2 * specfun::reg_lower_gamma(p.lambda2.nu, b);
  CHECK(std::fabs(eval_mixture(hybrid_cm_segments(p), 0.0) - mass) <= 1e-10);
}

TEST_CASE("superposition") {
  const auto equal = cm_reference(0.5, 40.0);
  for (double h : {0.0, 0.5, 2.0}) {
    CHECK(superposition_mixture(equal, h) == doctest::Approx(kernels::hybrid_cm(h, equal)).epsilon(1e-9));
  }

  auto wide = equal;
  wide.xi2 = 1e-8;
  wide.xi1 = 1e8;
  for (double h : {0.0, 0.5, 2.0}) {
    const double full = wide.omega1 * kernels::cauchy(h, wide.lambda1) + wide.omega2 * kernels::matern(h, wide.lambda2);
    CHECK(std::fabs(superposition_mixture(wide, h) - full) <= 1e-4);
  }

  // The overlap [xi2, xi1) carries both densities, so the mass exceeds
  // either non-overlapping split at the same end points.
  auto overlap = equal;
  overlap.xi2 = 10.0;
  overlap.xi1 = 100.0;
  const double at10 = kernels::hybrid_cm(0.0, cm_reference(0.5, 10.0));
  const double at100 = kernels::hybrid_cm(0.0, cm_reference(0.5, 100.0));
  CHECK(superposition_mixture(overlap, 0.0) > std::max(at10, at100));

  auto reversed = equal;
  reversed.xi1 = 1.0;
  reversed.xi2 = 2.0;
  CHECK_THROWS_AS(superposition_mixture(reversed, 0.0), std::invalid_argument);
}

TEST_CASE("segment validation") {
  MixtureSegment s;
  s.mixing = [](double u) { return std::exp(-u); };
  CHECK(eval_mixture({s}, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  s.u_hi = 0.0;
  CHECK_THROWS_AS(eval_mixture({s}, 0.0), std::invalid_argument);
  s.u_hi = 1.0;
  s.weight = 0.0;
  CHECK_THROWS_AS(eval_mixture({s}, 0.0), std::invalid_argument);
  s.weight = 1.0;
  CHECK_THROWS_AS(eval_mixture({s}, -1.0), std::domain_error);

  // 1/u is not integrable at 0.
  MixtureSegment bad;
  bad.u_hi = 1.0;
  bad.mixing = [](double u) { return 1.0 / u; };
  CHECK_THROWS_AS(eval_mixture({bad}, 0.0), QuadratureError);
}
