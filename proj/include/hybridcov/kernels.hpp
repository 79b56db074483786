#pragma once

// Isotropic covariance families built as Gaussian scale mixtures:
// Matern, Cauchy, Generalized Cauchy, and the two hybrid classes obtained by
// splitting the mixing density at a point xi (hybrid Cauchy-Matern and
// hybrid Hole-Effect-Matern).
//
// All functions return covariances (not correlations) and take the lag
// h = |s - s'| >= 0.

#include <stdexcept>
#include <string>

#include "hybridcov/quadrature.hpp"

namespace hybridcov {

/// Parameter values outside a family's validity domain.
class ValidityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matern: scale alpha (distance units), smoothness nu.
struct MaternParams {
  double alpha = 1.0;
  double nu = 0.5;
};

/// Cauchy: alpha has units of squared distance, nu is the tail exponent.
struct CauchyParams {
  double alpha = 1.0;
  double nu = 1.0;
};

struct GenCauchyParams {
  double alpha = 1.0;
  double nu = 1.0;
  double delta = 2.0;  // in (0, 2]
};

/// Cauchy mixing density on [0, xi1), Matern mixing density on [xi2, inf).
struct HybridCMParams {
  CauchyParams lambda1;
  MaternParams lambda2;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double xi1 = 1.0;
  double xi2 = 1.0;
};

/// Hole-effect kernel tau exp(-u eta h^2) - exp(-u h^2) mixed against the
/// Matern density on [0, xi1); Gaussian kernel on [xi2, inf).
struct HybridHMParams {
  MaternParams lambda1;
  MaternParams lambda2;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double xi1 = 1.0;
  double xi2 = 1.0;
  double tau = 2.0;
  double eta = 1.5;
  int dim = 1;
};

/// Five-parameter hybrid Cauchy-Matern with shared variance, scale and
/// split point; the split enters through xi_tilde = alpha * sqrt(xi).
struct ParsimoniousCM {
  double omega = 1.0;
  double alpha = 1.0;
  double nu1 = 1.0;
  double nu2 = 0.5;
  double xi_tilde = 1.0;
};

namespace kernels {

void validate(const MaternParams& p);
void validate(const CauchyParams& p);
void validate(const GenCauchyParams& p);
void validate(const HybridCMParams& p);
void validate(const HybridHMParams& p);
void validate(const ParsimoniousCM& p);

double matern(double h, const MaternParams& p);
/// log of the Matern correlation; finite far beyond the point where the
/// value itself underflows.
double log_matern(double h, const MaternParams& p);

double cauchy(double h, const CauchyParams& p);
double gen_cauchy(double h, const GenCauchyParams& p);

/// Gamma density with shape nu/2 and rate alpha.
double mixing_cauchy(double u, const CauchyParams& p);
/// Inverse-gamma density with shape nu and scale 1/(4 alpha^2).
double mixing_matern(double u, const MaternParams& p);

/// Cauchy part restricted to u in [0, xi):
///   P(nu/2, (h^2 + alpha) xi) * cauchy(h).
double cauchy_lower_branch(double h, const CauchyParams& p, double xi);

/// Matern part restricted to u in [xi, inf):
///   matern(h) - Gamma(nu; 1/(4 xi alpha^2); h^2/(4 alpha^2)) / Gamma(nu).
double matern_upper_branch(double h, const MaternParams& p, double xi, const QuadratureSettings& settings = {});

/// Hole-effect part on u in [0, xi):
///   [tau Gamma(nu; b; eta c) - Gamma(nu; b; c)] / Gamma(nu),
/// with b = 1/(4 xi alpha^2) and c = h^2/(4 alpha^2).
double hole_lower_branch(double h, const MaternParams& p, double xi, double tau, double eta,
                         const QuadratureSettings& settings = {});

double hybrid_cm(double h, const HybridCMParams& p, const QuadratureSettings& settings = {});

/// Throws ValidityError unless 1 < eta < tau^(2/dim).
double hybrid_hm(double h, const HybridHMParams& p, const QuadratureSettings& settings = {});

/// Positive definiteness of the hole-effect kernel in R^dim.
bool hm_validity(double tau, double eta, int dim);

/// Lower bound of hybrid_hm over h >= 0:
///   omega1 (tau eta)^(-1/(eta-1)) ((1-eta)/eta) * M,
/// where M = Q(nu1, 1/(4 xi1 alpha1^2)) is the mass the Matern density puts
/// on [0, xi1).
double hm_lower_bound(const HybridHMParams& p);

/// Lag at which tau exp(-u eta h^2) - exp(-u h^2) is smallest.
double hole_minimizer(double u, double tau, double eta);

HybridCMParams expand_parsimonious(const ParsimoniousCM& p);
/// Inverse of expand_parsimonious; throws ValidityError if the weights,
/// scales or split points differ.
ParsimoniousCM contract_parsimonious(const HybridCMParams& p);

}  // namespace kernels
}  // namespace hybridcov
