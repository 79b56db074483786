#include "hybridcov/predict.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "hybridcov/specfun.hpp"
#include "json.hpp"

namespace hybridcov {

namespace {

// Pairwise summation in index order.
double pairwise_sum(const Eigen::VectorXd& v, Eigen::Index lo, Eigen::Index hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) s += v(i);
    return s;
  }
  const Eigen::Index mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double mean_of(const Eigen::VectorXd& v) { return pairwise_sum(v, 0, v.size()) / static_cast<double>(v.size()); }

}  // namespace

PredictionSet simple_krige(const Kernel& kernel, const FieldSample& sample, const Locations& targets,
                           const std::vector<double>& jitter_ladder) {
  sample.validate();
  targets.validate();
  if (sample.locations.dim() != kernel.dim() || targets.dim() != kernel.dim()) {
    throw std::invalid_argument("simple_krige: dimension mismatch between kernel, sample and targets");
  }
  const double var = kernel.variance();
  const CholeskyFactor f = factorize(covariance_matrix(kernel, sample.locations), var, jitter_ladder);
  const Eigen::MatrixXd c = cross_covariance(kernel, sample.locations, targets);
  const Eigen::VectorXd weights_z = f.llt.solve(sample.values);
  const Eigen::MatrixXd v = f.llt.matrixL().solve(c);

  PredictionSet out;
  out.targets = targets;
  out.jitter = f.jitter;
  out.means = c.transpose() * weights_z;
  out.raw_variances = (var - v.colwise().squaredNorm().array()).matrix().transpose();
  out.variances = out.raw_variances.cwiseMax(0.0).cwiseMin(var);
  return out;
}

PointScores gaussian_scores(double mean, double variance, double actual) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw std::domain_error("gaussian_scores: variance must be positive");
  const double sigma = std::sqrt(variance);
  const double r = actual - mean;
  const double z = r / sigma;
  PointScores s;
  s.se = r * r;
  s.ae = std::fabs(r);
  s.lscore = 0.5 * std::log(2.0 * std::numbers::pi * variance) + r * r / (2.0 * variance);
  s.crps = sigma * (z * (2.0 * specfun::normal_cdf(z) - 1.0) + 2.0 * specfun::normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
  return s;
}

CVResult loo_cv(const Kernel& kernel, const FieldSample& sample, const std::vector<double>& jitter_ladder) {
  sample.validate();
  const Eigen::Index n = sample.values.size();
  if (n < 3) throw std::invalid_argument("loo_cv: need at least 3 observations");
  const Eigen::MatrixXd sigma = covariance_matrix(kernel, sample.locations);
  const double var = kernel.variance();

  CVResult out;
  out.means.resize(n);
  out.variances.resize(n);
  Eigen::VectorXd se(n), ae(n), ls(n), crps(n);
  Eigen::VectorXi keep(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0, m = 0; k < n; ++k) {
      if (k != i) keep(m++) = static_cast<int>(k);
    }
    const Eigen::MatrixXd sub = sigma(keep, keep);
    const Eigen::VectorXd c = sigma(keep, Eigen::seqN(i, 1));
    const Eigen::VectorXd z = sample.values(keep);
    CholeskyFactor f;
    try {
      f = factorize(sub, var, jitter_ladder);
    } catch (const FactorizationError& e) {
      throw FactorizationError("loo_cv fold " + std::to_string(i) + ": " + e.what(), e.last_jitter(),
                               e.condition_estimate());
    }
    const double mean = c.dot(f.llt.solve(z));
    const double raw = var - f.llt.matrixL().solve(c).squaredNorm();
    const double v = std::min(std::max(raw, 0.0), var);
    if (!(v > 0.0)) {
      throw std::domain_error("loo_cv fold " + std::to_string(i) + ": kriging variance is zero");
    }
    out.means(i) = mean;
    out.variances(i) = v;
    const PointScores s = gaussian_scores(mean, v, sample.values(i));
    se(i) = s.se;
    ae(i) = s.ae;
    ls(i) = s.lscore;
    crps(i) = s.crps;
  }
  out.scores.mse = mean_of(se);
  out.scores.mae = mean_of(ae);
  out.scores.lscore = mean_of(ls);
  out.scores.crps = mean_of(crps);
  out.scores.n = static_cast<int>(n);
  return out;
}

void write_prediction_csv(std::ostream& out, const PredictionSet& p) {
  const int d = p.targets.dim();
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "mean,variance\n";
  for (Eigen::Index i = 0; i < p.means.size(); ++i) {
    for (int k = 0; k < d; ++k) out << format_double(p.targets.points(i, k)) << ',';
    out << format_double(p.means(i)) << ',' << format_double(p.variances(i)) << '\n';
  }
}

std::string scores_to_json(const CVScores& s) {
  nlohmann::ordered_json j;
  j["mse"] = s.mse;
  j["mae"] = s.mae;
  j["lscore"] = s.lscore;
  j["crps"] = s.crps;
  j["n"] = s.n;
  return j.dump(2);
}

}  // namespace hybridcov
