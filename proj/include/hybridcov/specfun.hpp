#pragma once

// Special functions behind the closed-form kernels.
//
// All functions are pure. Domain violations raise std::domain_error,
// results beyond the double range raise std::overflow_error or
// std::underflow_error instead of returning inf or a silent zero.

#include "hybridcov/quadrature.hpp"

namespace hybridcov::specfun {

/// Gamma function for a > 0.
double gamma_fn(double a);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double reg_lower_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly so that small tails keep their relative accuracy.
double reg_upper_gamma(double a, double x);

/// Generalized incomplete gamma
///   Gamma(a; b; c) = int_b^inf t^(a-1) exp(-t - c/t) dt,  a > 0, b, c >= 0.
/// Reduces to the upper incomplete gamma for c = 0; otherwise evaluated by
/// adaptive quadrature split at max(b, sqrt(c)).
double gen_inc_gamma(double a, double b, double c, const QuadratureSettings& settings = {});

/// Complement on [0, b]:
///   int_0^b t^(a-1) exp(-t - c/t) dt = Gamma(a; 0; c) - Gamma(a; b; c).
/// A finite integral, so no cancellation when the upper part dominates.
double lower_gen_inc_gamma(double a, double b, double c, const QuadratureSettings& settings = {});

/// Closed form of the same integral for a in {1/2, 3/2} through erfc.
/// Accurate to a few ulps of Gamma(a) in absolute terms; throws
/// std::domain_error for other a.
double lower_gen_inc_gamma_half(double a, double b, double c);

/// exp(x^2) erfc(x).
double erfcx(double x);

/// Modified Bessel function of the second kind K_nu(x), x > 0. The order
/// enters only through |nu|.
double bessel_k(double nu, double x);

/// exp(x) * K_nu(x); finite wherever K_nu itself would underflow.
double bessel_k_scaled(double nu, double x);

/// Standard normal density, distribution and quantile functions.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace hybridcov::specfun
