#pragma once

// Gaussian likelihood, maximum-likelihood fitting over log-parameters,
// numerical-Hessian standard errors and AIC.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybridcov/kernel_spec.hpp"
#include "hybridcov/randfield.hpp"

namespace hybridcov {

/// Returned by the likelihood in place of a value when the covariance
/// matrix cannot be factorized or the parameters are invalid.
inline constexpr double kFailedLikelihoodPenalty = 1e12;

struct LikelihoodValue {
  double value = 0.0;      // 1/2 (n log 2 pi + log det Sigma + z' Sigma^-1 z)
  double jitter = 0.0;     // relative jitter that made Sigma factorizable
  bool ok = true;          // false: value is the penalty
  std::string diagnostic;  // reason for a penalty
};

/// Centered Gaussian negative log-likelihood through a Cholesky factor.
LikelihoodValue neg_log_likelihood(const Kernel& kernel, const FieldSample& sample,
                                   const std::vector<double>& jitter_ladder = SimulationConfig{}.jitter_ladder);
/// Same, reusing precomputed pairwise distances of sample.locations.
LikelihoodValue neg_log_likelihood(const Kernel& kernel, const FieldSample& sample, const Eigen::MatrixXd& distances,
                                   const std::vector<double>& jitter_ladder = SimulationConfig{}.jitter_ladder);

struct ParamMask {
  std::set<std::string> free;
  ParamMap fixed;
};

struct FitOptions {
  int n_starts = 3;
  double start_jitter = 0.5;  // half-width of the uniform log-space perturbation
  std::uint64_t seed = 0;
  double xtol = 1e-8;
  int max_iterations = 2000;
  double initial_step = 0.25;
  bool std_errors = true;
  double hessian_step = 1e-4;
  std::vector<double> jitter_ladder = SimulationConfig{}.jitter_ladder;
};

struct FitResult {
  Family family = Family::matern;
  int dim = 2;
  ParamMask mask;
  ParamMap estimates;  // all parameters, free and fixed
  std::map<std::string, double> std_errors;
  double loglik = 0.0;
  double aic = 0.0;
  int n_iterations = 0;
  int n_evaluations = 0;
  bool converged = false;
  double final_simplex_size = 0.0;
  double jitter_used = 0.0;
  int best_start = 0;
  std::string diagnostic;

  KernelSpec spec() const { return KernelSpec{family, estimates, dim}; }
};

/// Maximises the likelihood over the logs of the free parameters, from init
/// and from n_starts - 1 perturbed copies of it; the lowest objective wins,
/// the earliest start on ties. For parsimonious hybrids xi is fitted as
/// xi_tilde; a mask naming xi is rewritten.
/// Throws std::invalid_argument when mask and init do not cover the family
/// exactly or a value is not positive.
FitResult fit_mle(Family family, int dim, const ParamMask& mask, const FieldSample& sample, const ParamMap& init,
                  const FitOptions& options = {});

/// Square roots of the diagonal of the inverse Hessian of the negative
/// log-likelihood in log-parameters, mapped back by the delta method. Empty,
/// with fit.diagnostic set, when the Hessian is not positive definite.
std::map<std::string, double> std_errors(FitResult& fit, const FieldSample& sample, const FitOptions& options = {});

/// 2 k - 2 loglik with k the number of free parameters.
double aic(const FitResult& fit);
double aic(int k, double loglik);

std::string fit_to_json(const FitResult& fit);

}  // namespace hybridcov
