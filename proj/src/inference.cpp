#include "hybridcov/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hybridcov/optimize.hpp"
#include "json.hpp"

namespace hybridcov {

namespace {

LikelihoodValue penalty(std::string why) {
  LikelihoodValue v;
  v.value = kFailedLikelihoodPenalty;
  v.ok = false;
  v.diagnostic = std::move(why);
  return v;
}

struct Problem {
  Family family;
  int dim;
  std::vector<std::string> free;  // optimisation order
  ParamMap fixed;
};

ParamMap assemble(const Problem& p, const Eigen::VectorXd& x) {
  ParamMap m = p.fixed;
  for (std::size_t i = 0; i < p.free.size(); ++i) m[p.free[i]] = std::exp(x(static_cast<Eigen::Index>(i)));
  return m;
}

LikelihoodValue evaluate(const Problem& p, const Eigen::VectorXd& x, const FieldSample& sample,
                         const Eigen::MatrixXd& distances, const std::vector<double>& ladder) {
  try {
    const Kernel k(KernelSpec{p.family, assemble(p, x), p.dim});
    return neg_log_likelihood(k, sample, distances, ladder);
  } catch (const QuadratureError& e) {
    return penalty(std::string("kernel evaluation failed: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return penalty(std::string("invalid parameters: ") + e.what());
  } catch (const std::domain_error& e) {
    return penalty(std::string("kernel evaluation failed: ") + e.what());
  }
}

}  // namespace

LikelihoodValue neg_log_likelihood(const Kernel& kernel, const FieldSample& sample, const Eigen::MatrixXd& distances,
                                   const std::vector<double>& jitter_ladder) {
  const Eigen::Index n = sample.values.size();
  if (distances.rows() != n || distances.cols() != n) {
    throw std::invalid_argument("neg_log_likelihood: distance matrix does not match the sample");
  }
  if (!(kernel.variance() > 0.0)) return penalty("kernel variance is not positive");
  Eigen::MatrixXd sigma;
  try {
    sigma = covariance_from_distances(kernel, distances);
  } catch (const std::domain_error& e) {
    return penalty(e.what());
  }
  CholeskyFactor f;
  try {
    f = factorize(sigma, kernel.variance(), jitter_ladder);
  } catch (const FactorizationError& e) {
    return penalty(e.what());
  }
  const Eigen::VectorXd w = f.llt.matrixL().solve(sample.values);
  const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  LikelihoodValue out;
  out.value = 0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det + w.squaredNorm());
  out.jitter = f.jitter;
  if (!std::isfinite(out.value)) return penalty("likelihood is not finite");
  return out;
}

LikelihoodValue neg_log_likelihood(const Kernel& kernel, const FieldSample& sample,
                                   const std::vector<double>& jitter_ladder) {
  sample.validate();
  if (sample.locations.dim() != kernel.dim()) {
    throw std::invalid_argument("neg_log_likelihood: kernel and sample differ in dimension");
  }
  return neg_log_likelihood(kernel, sample, distance_matrix(sample.locations), jitter_ladder);
}

double aic(int k, double loglik) { return 2.0 * k - 2.0 * loglik; }

double aic(const FitResult& fit) { return aic(static_cast<int>(fit.mask.free.size()), fit.loglik); }

FitResult fit_mle(Family family, int dim, const ParamMask& mask, const FieldSample& sample, const ParamMap& init,
                  const FitOptions& options) {
  sample.validate();
  if (sample.locations.dim() != dim) throw std::invalid_argument("fit_mle: sample dimension differs from dim");
  if (options.n_starts < 1) throw std::invalid_argument("fit_mle: n_starts must be positive");
  if (!(options.start_jitter >= 0.0)) throw std::invalid_argument("fit_mle: start_jitter must be nonnegative");

  Problem p{family, dim, {}, mask.fixed};
  ParamMap start = init;
  for (const auto& name : mask.free) {
    if (mask.fixed.count(name)) throw std::invalid_argument("fit_mle: '" + name + "' is both free and fixed");
    if (!init.count(name)) throw std::invalid_argument("fit_mle: no initial value for free parameter '" + name + "'");
  }
  for (const auto& [name, v] : init) {
    if (!mask.free.count(name)) throw std::invalid_argument("fit_mle: initial value for non-free parameter '" + name + "'");
  }

  ParamMask resolved = mask;
  KernelSpec probe{family, mask.fixed, dim};
  for (const auto& [k, v] : init) probe.params[k] = v;
  const bool parsimonious = is_parsimonious(probe);
  if (parsimonious && mask.free.count("xi")) {
    const double alpha = probe.params.count("alpha") ? probe.params.at("alpha") : 0.0;
    if (!(alpha > 0.0) || !(init.at("xi") > 0.0)) throw std::invalid_argument("fit_mle: alpha and xi must be positive");
    start.erase("xi");
    start["xi_tilde"] = alpha * std::sqrt(init.at("xi"));
    resolved.free.erase("xi");
    resolved.free.insert("xi_tilde");
  }
  // Optional variances default to 1 and count as fixed.
  if ((family == Family::matern || family == Family::cauchy || family == Family::gencauchy) &&
      !resolved.free.count("omega") && !resolved.fixed.count("omega")) {
    resolved.fixed["omega"] = 1.0;
  }
  p.fixed = resolved.fixed;
  KernelSpec all{family, resolved.fixed, dim};
  for (const auto& [k, v] : start) all.params[k] = v;
  canonicalize(all);  // throws on missing or unknown names
  for (const auto& name : parameter_names(all)) {
    if (resolved.free.count(name)) p.free.push_back(name);
  }
  for (const auto& name : resolved.free) {
    if (std::find(p.free.begin(), p.free.end(), name) == p.free.end()) {
      throw std::invalid_argument("fit_mle: '" + name + "' cannot be fitted for family " + family_name(family));
    }
  }
  Eigen::VectorXd x0(static_cast<Eigen::Index>(p.free.size()));
  for (std::size_t i = 0; i < p.free.size(); ++i) {
    const double v = start.at(p.free[i]);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("fit_mle: initial value of '" + p.free[i] + "' must be positive");
    }
    x0(static_cast<Eigen::Index>(i)) = std::log(v);
  }

  const Eigen::MatrixXd distances = distance_matrix(sample.locations);
  const Objective objective = [&](const Eigen::VectorXd& x) {
    return evaluate(p, x, sample, distances, options.jitter_ladder).value;
  };

  FitResult out;
  out.family = family;
  out.dim = dim;
  out.mask = resolved;

  Eigen::VectorXd best_x = x0;
  if (p.free.empty()) {
    out.converged = true;
  } else {
    NelderMeadOptions nm;
    nm.xtol = options.xtol;
    nm.max_iterations = options.max_iterations;
    nm.initial_step = options.initial_step;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < options.n_starts; ++s) {
      Eigen::VectorXd xs = x0;
      if (s > 0) {
        RandomStream rng(options.seed, static_cast<std::uint64_t>(s));
        for (Eigen::Index i = 0; i < xs.size(); ++i) xs(i) += options.start_jitter * (2.0 * rng.uniform() - 1.0);
      }
      const NelderMeadResult r = nelder_mead(objective, xs, nm);
      out.n_evaluations += r.evaluations;
      if (r.value < best) {
        best = r.value;
        best_x = r.x;
        out.best_start = s;
        out.n_iterations = r.iterations;
        out.converged = r.converged;
        out.final_simplex_size = r.simplex_size;
      }
    }
  }

  const LikelihoodValue at_best = evaluate(p, best_x, sample, distances, options.jitter_ladder);
  out.estimates = assemble(p, best_x);
  out.loglik = -at_best.value;
  out.jitter_used = at_best.jitter;
  out.aic = aic(out);
  if (!at_best.ok) {
    out.converged = false;
    out.diagnostic = at_best.diagnostic;
    return out;
  }
  if (!out.converged) out.diagnostic = "maximum iterations reached before the simplex collapsed";
  if (options.std_errors && out.converged) std_errors(out, sample, options);
  return out;
}

std::map<std::string, double> std_errors(FitResult& fit, const FieldSample& sample, const FitOptions& options) {
  fit.std_errors.clear();
  std::vector<std::string> names;
  for (const auto& name : parameter_names(fit.spec())) {
    if (fit.mask.free.count(name)) names.push_back(name);
  }
  if (names.empty()) return {};
  if (!fit.converged) {
    fit.diagnostic = "standard errors need a converged fit";
    return {};
  }
  Problem p{fit.family, fit.dim, names, fit.estimates};
  for (const auto& n : names) p.fixed.erase(n);
  Eigen::VectorXd x(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) x(static_cast<Eigen::Index>(i)) = std::log(fit.estimates.at(names[i]));

  const Eigen::MatrixXd distances = distance_matrix(sample.locations);
  bool failed = false;
  const Objective objective = [&](const Eigen::VectorXd& y) {
    const LikelihoodValue v = evaluate(p, y, sample, distances, options.jitter_ladder);
    failed = failed || !v.ok;
    return v.value;
  };
  const Eigen::MatrixXd hessian = numerical_hessian(objective, x, options.hessian_step);
  const Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  if (failed || !hessian.allFinite() || llt.info() != Eigen::Success) {
    fit.diagnostic = "Hessian of the negative log-likelihood is not positive definite; standard errors omitted";
    return {};
  }
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    fit.std_errors[names[i]] = fit.estimates.at(names[i]) * std::sqrt(cov(k, k));
  }
  return fit.std_errors;
}

std::string fit_to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["family"] = family_name(fit.family);
  j["dim"] = fit.dim;
  nlohmann::ordered_json mask;
  mask["free"] = std::vector<std::string>(fit.mask.free.begin(), fit.mask.free.end());
  nlohmann::ordered_json fixed = nlohmann::ordered_json::object();
  for (const auto& [k, v] : fit.mask.fixed) fixed[k] = v;
  mask["fixed"] = fixed;
  j["mask"] = mask;
  nlohmann::ordered_json est = nlohmann::ordered_json::object();
  for (const auto& [k, v] : fit.estimates) est[k] = v;
  j["estimates"] = est;
  nlohmann::ordered_json se = nlohmann::ordered_json::object();
  for (const auto& [k, v] : fit.std_errors) se[k] = v;
  j["std_errors"] = se;
  j["k"] = fit.mask.free.size();
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["converged"] = fit.converged;
  j["n_iterations"] = fit.n_iterations;
  j["n_evaluations"] = fit.n_evaluations;
  j["final_simplex_size"] = fit.final_simplex_size;
  j["jitter_used"] = fit.jitter_used;
  if (!fit.diagnostic.empty()) j["diagnostic"] = fit.diagnostic;
  return j.dump(2);
}

}  // namespace hybridcov
