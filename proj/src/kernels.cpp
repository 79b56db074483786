#include "hybridcov/kernels.hpp"

#include <cmath>
#include <limits>

#include "hybridcov/specfun.hpp"

namespace hybridcov::kernels {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidityError(message);
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

void check_lag(double h) {
  if (!(h >= 0.0) || std::isnan(h)) throw std::domain_error("covariance lag must be nonnegative");
}

// Past xi h^2 = 40 the Matern branch on [xi, inf) is below
// exp(-40) omega2 < 5e-18 omega2 and is returned as zero.
constexpr double kNegligibleExponent = 40.0;

}  // namespace

void validate(const MaternParams& p) {
  require(positive(p.alpha), "matern: alpha must be positive");
  require(positive(p.nu), "matern: nu must be positive");
}

void validate(const CauchyParams& p) {
  require(positive(p.alpha), "cauchy: alpha must be positive");
  require(positive(p.nu), "cauchy: nu must be positive");
}

void validate(const GenCauchyParams& p) {
  require(positive(p.alpha), "gencauchy: alpha must be positive");
  require(positive(p.nu), "gencauchy: nu must be positive");
  require(p.delta > 0.0 && p.delta <= 2.0, "gencauchy: delta must lie in (0, 2]");
}

void validate(const HybridCMParams& p) {
  validate(p.lambda1);
  validate(p.lambda2);
  require(positive(p.omega1) && positive(p.omega2), "hybrid_cm: omega1 and omega2 must be positive");
  require(positive(p.xi1) && positive(p.xi2), "hybrid_cm: xi1 and xi2 must be positive");
}

void validate(const HybridHMParams& p) {
  validate(p.lambda1);
  validate(p.lambda2);
  require(positive(p.omega1) && positive(p.omega2), "hybrid_hm: omega1 and omega2 must be positive");
  require(positive(p.xi1) && positive(p.xi2), "hybrid_hm: xi1 and xi2 must be positive");
  require(positive(p.tau), "hybrid_hm: tau must be positive");
  require(p.dim >= 1, "hybrid_hm: dim must be at least 1");
  require(hm_validity(p.tau, p.eta, p.dim), "hybrid_hm: requires 1 < eta < tau^(2/dim) for positive definiteness");
}

void validate(const ParsimoniousCM& p) {
  require(positive(p.omega) && positive(p.alpha), "hybrid_cm: omega and alpha must be positive");
  require(positive(p.nu1) && positive(p.nu2), "hybrid_cm: nu1 and nu2 must be positive");
  require(positive(p.xi_tilde), "hybrid_cm: xi_tilde must be positive");
}

double log_matern(double h, const MaternParams& p) {
  check_lag(h);
  if (h == 0.0) return 0.0;
  const double x = h / p.alpha;
  const double log_norm = (1.0 - p.nu) * std::log(2.0) - std::lgamma(p.nu);
  return log_norm + p.nu * std::log(x) + std::log(specfun::bessel_k_scaled(p.nu, x)) - x;
}

double matern(double h, const MaternParams& p) {
  check_lag(h);
  if (h == 0.0) return 1.0;
  const double x = h / p.alpha;
  // Tiny lags: the series limit is 1 to working precision long before
  // x^nu K_nu(x) loses accuracy.
  if (x < 1e-300) return 1.0;
  const double v = std::exp(log_matern(h, p));
  return std::min(v, 1.0);
}

double cauchy(double h, const CauchyParams& p) {
  check_lag(h);
  return std::pow(1.0 + h * h / p.alpha, -0.5 * p.nu);
}

double gen_cauchy(double h, const GenCauchyParams& p) {
  check_lag(h);
  if (p.delta == 2.0) return std::pow(1.0 + h * h / p.alpha, -0.5 * p.nu);
  return std::pow(1.0 + std::pow(h, p.delta) / p.alpha, -p.nu / p.delta);
}

double mixing_cauchy(double u, const CauchyParams& p) {
  if (!(u > 0.0)) return 0.0;
  const double shape = 0.5 * p.nu;
  return std::exp(shape * std::log(p.alpha) - std::lgamma(shape) + (shape - 1.0) * std::log(u) - p.alpha * u);
}

double mixing_matern(double u, const MaternParams& p) {
  if (!(u > 0.0)) return 0.0;
  const double scale = 1.0 / (4.0 * p.alpha * p.alpha);
  return std::exp(p.nu * std::log(scale) - std::lgamma(p.nu) - (p.nu + 1.0) * std::log(u) - scale / u);
}

double cauchy_lower_branch(double h, const CauchyParams& p, double xi) {
  check_lag(h);
  const double rate = h * h + p.alpha;
  return specfun::reg_lower_gamma(0.5 * p.nu, rate * xi) * cauchy(h, p);
}

double matern_upper_branch(double h, const MaternParams& p, double xi, const QuadratureSettings& settings) {
  check_lag(h);
  const double b = 1.0 / (4.0 * xi * p.alpha * p.alpha);
  if (h == 0.0) return specfun::reg_lower_gamma(p.nu, b);
  // The branch is bounded by exp(-xi h^2) P(nu, b).
  if (xi * h * h > kNegligibleExponent) return 0.0;
  const double c = h * h / (4.0 * p.alpha * p.alpha);
  // matern(h) - Gamma(nu; b; c) / Gamma(nu), taken as the integral over
  // [0, b] directly.
  if (p.nu == 0.5 || p.nu == 1.5) return specfun::lower_gen_inc_gamma_half(p.nu, b, c) / specfun::gamma_fn(p.nu);
  return specfun::lower_gen_inc_gamma(p.nu, b, c, settings) / specfun::gamma_fn(p.nu);
}

double hole_lower_branch(double h, const MaternParams& p, double xi, double tau, double eta,
                         const QuadratureSettings& settings) {
  check_lag(h);
  const double b = 1.0 / (4.0 * xi * p.alpha * p.alpha);
  if (h == 0.0) return (tau - 1.0) * specfun::reg_upper_gamma(p.nu, b);
  const double c = h * h / (4.0 * p.alpha * p.alpha);
  const double g = specfun::gamma_fn(p.nu);
  return (tau * specfun::gen_inc_gamma(p.nu, b, eta * c, settings) - specfun::gen_inc_gamma(p.nu, b, c, settings)) / g;
}

double hybrid_cm(double h, const HybridCMParams& p, const QuadratureSettings& settings) {
  return p.omega1 * cauchy_lower_branch(h, p.lambda1, p.xi1) +
         p.omega2 * matern_upper_branch(h, p.lambda2, p.xi2, settings);
}

double hybrid_hm(double h, const HybridHMParams& p, const QuadratureSettings& settings) {
  if (!hm_validity(p.tau, p.eta, p.dim)) {
    throw ValidityError("hybrid_hm: requires 1 < eta < tau^(2/dim) for positive definiteness");
  }
  return p.omega1 * hole_lower_branch(h, p.lambda1, p.xi1, p.tau, p.eta, settings) +
         p.omega2 * matern_upper_branch(h, p.lambda2, p.xi2, settings);
}

bool hm_validity(double tau, double eta, int dim) {
  if (!(tau > 0.0) || dim < 1 || !std::isfinite(eta)) return false;
  return eta > 1.0 && eta < std::pow(tau, 2.0 / dim);
}

double hole_minimizer(double u, double tau, double eta) {
  return std::sqrt(std::log(tau * eta) / (u * (eta - 1.0)));
}

double hm_lower_bound(const HybridHMParams& p) {
  validate(p);
  const double depth = std::pow(p.tau * p.eta, -1.0 / (p.eta - 1.0)) * (1.0 - p.eta) / p.eta;
  const double mass = specfun::reg_upper_gamma(p.lambda1.nu, 1.0 / (4.0 * p.xi1 * p.lambda1.alpha * p.lambda1.alpha));
  return p.omega1 * depth * mass;
}

HybridCMParams expand_parsimonious(const ParsimoniousCM& p) {
  validate(p);
  const double ratio = p.xi_tilde / p.alpha;
  const double xi = ratio * ratio;
  HybridCMParams out;
  out.lambda1 = CauchyParams{p.alpha, p.nu1};
  out.lambda2 = MaternParams{p.alpha, p.nu2};
  out.omega1 = out.omega2 = p.omega;
  out.xi1 = out.xi2 = xi;
  return out;
}

ParsimoniousCM contract_parsimonious(const HybridCMParams& p) {
  validate(p);
  require(p.omega1 == p.omega2 && p.lambda1.alpha == p.lambda2.alpha && p.xi1 == p.xi2,
          "hybrid_cm: parameters are not of the parsimonious form");
  return ParsimoniousCM{p.omega1, p.lambda1.alpha, p.lambda1.nu, p.lambda2.nu, p.lambda1.alpha * std::sqrt(p.xi1)};
}

}  // namespace hybridcov::kernels
