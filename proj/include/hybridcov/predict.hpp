#pragma once

// Simple (zero-mean) kriging, Gaussian predictive scores and
// leave-one-out cross-validation.

#include <iosfwd>
#include <string>

#include "hybridcov/kernel_spec.hpp"
#include "hybridcov/randfield.hpp"

namespace hybridcov {

struct PredictionSet {
  Locations targets;
  Eigen::VectorXd means;
  Eigen::VectorXd variances;      // clamped to [0, phi(0)]
  Eigen::VectorXd raw_variances;  // before clamping
  double jitter = 0.0;            // relative jitter used to factorize
};

/// mean = c' Sigma^-1 z, variance = phi(0) - c' Sigma^-1 c.
PredictionSet simple_krige(const Kernel& kernel, const FieldSample& sample, const Locations& targets,
                           const std::vector<double>& jitter_ladder = SimulationConfig{}.jitter_ladder);

struct PointScores {
  double se = 0.0;
  double ae = 0.0;
  double lscore = 0.0;  // negative log predictive density
  double crps = 0.0;
};

/// Scores of a N(mean, variance) forecast against actual.
/// Throws std::domain_error unless variance > 0.
PointScores gaussian_scores(double mean, double variance, double actual);

struct CVScores {
  double mse = 0.0;
  double mae = 0.0;
  double lscore = 0.0;
  double crps = 0.0;
  int n = 0;
};

struct CVResult {
  CVScores scores;
  Eigen::VectorXd means;
  Eigen::VectorXd variances;
};

/// Kriges each value from the other n - 1 and averages the scores.
/// A failed fold raises FactorizationError naming the fold index.
CVResult loo_cv(const Kernel& kernel, const FieldSample& sample,
                const std::vector<double>& jitter_ladder = SimulationConfig{}.jitter_ladder);

/// Header x1,...,xd,mean,variance.
void write_prediction_csv(std::ostream& out, const PredictionSet& p);
std::string scores_to_json(const CVScores& s);

}  // namespace hybridcov
