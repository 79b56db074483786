#pragma once

// Derivative-free minimisation and finite-difference Hessians.

#include <Eigen/Core>

#include <functional>

namespace hybridcov {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadOptions {
  double xtol = 1e-8;          // stop when the simplex diameter falls below
  int max_iterations = 2000;
  double initial_step = 0.25;  // edge length of the starting simplex
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double simplex_size = 0.0;  // largest vertex-to-vertex distance
};

/// Nelder-Mead with the standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite objective values are treated as
/// +infinity.
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options = {});

/// Central-difference Hessian with a common absolute step.
Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double step);

}  // namespace hybridcov
