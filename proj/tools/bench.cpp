#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hybridcov/randfield.hpp"

namespace hybridcov::bench {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string delta_label(double d) {
  std::ostringstream s;
  s << "gencauchy_delta=" << d;
  return s.str();
}

ReplicateOutcome run_replicate(const ScenarioSpec& spec, const BenchOptions& options, const FieldSample& sample,
                               int r) {
  ReplicateOutcome out;
  FitOptions fo;
  fo.n_starts = options.n_starts;
  fo.std_errors = false;
  const auto fit_seed = [&](int model) {
    return splitmix(splitmix(options.seed ^ 0x5eed) + static_cast<std::uint64_t>(r) * 131 + static_cast<std::uint64_t>(model));
  };
  try {
    fo.seed = fit_seed(0);
    ParamMask hybrid{{"omega", "alpha", "xi_tilde"}, {{"nu1", spec.nu1}, {"nu2", spec.nu2}}};
    out.fits.push_back(fit_mle(Family::hybrid_cm, 2, hybrid, sample,
                               {{"omega", spec.omega}, {"alpha", spec.alpha}, {"xi_tilde", spec.xi_tilde()}}, fo));
    const double var = sample.values.squaredNorm() / static_cast<double>(sample.values.size());
    for (std::size_t k = 0; k < options.gc_deltas.size(); ++k) {
      fo.seed = fit_seed(static_cast<int>(k) + 1);
      ParamMask gc{{"omega", "alpha"}, {{"nu", options.gc_nu}, {"delta", options.gc_deltas[k]}}};
      out.fits.push_back(fit_mle(Family::gencauchy, 2, gc, sample, {{"omega", var}, {"alpha", spec.alpha}}, fo));
    }
    for (const auto& f : out.fits) {
      if (f.loglik <= -kFailedLikelihoodPenalty) {
        out.failure = family_name(f.family) + " fit: " + f.diagnostic;
        return out;
      }
    }
    if (options.cross_validate) {
      for (const auto& f : out.fits) out.scores.push_back(loo_cv(Kernel(f.spec()), sample).scores);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

double ScenarioSpec::xi_tilde() const { return alpha * std::sqrt(xi); }

KernelSpec ScenarioSpec::kernel_spec() const {
  return KernelSpec{Family::hybrid_cm, {{"omega", omega}, {"alpha", alpha}, {"nu1", nu1}, {"nu2", nu2}, {"xi", xi}}, 2};
}

ScenarioSpec scenario(const std::string& label) {
  ScenarioSpec s;
  s.label = label;
  if (label == "a") {
    s.nu2 = 0.5, s.xi = 40.0;
  } else if (label == "b") {
    s.nu2 = 0.5, s.xi = 120.0;
  } else if (label == "c") {
    s.nu2 = 1.5, s.xi = 40.0;
  } else if (label == "d") {
    s.nu2 = 1.5, s.xi = 120.0;
  } else {
    throw std::invalid_argument("unknown scenario '" + label + "' (expected a, b, c or d)");
  }
  return s;
}

std::vector<std::string> model_labels(const BenchOptions& options) {
  std::vector<std::string> out{"hybrid_cm"};
  for (double d : options.gc_deltas) out.push_back(delta_label(d));
  return out;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const BenchOptions& options) {
  if (options.n_points < 3) throw std::invalid_argument("bench: need at least 3 points");
  if (options.n_replicates < 1) throw std::invalid_argument("bench: need at least one replicate");
  if (options.n_starts < 1) throw std::invalid_argument("bench: need at least one start");
  for (double d : options.gc_deltas) {
    if (!(d > 0.0 && d <= 2.0)) throw std::invalid_argument("bench: gencauchy delta must lie in (0, 2]");
  }
  const Kernel truth(spec.kernel_spec());
  const Locations loc = sample_uniform_locations(options.n_points, {0.0, 0.0}, {options.box_hi, options.box_hi},
                                                 options.seed);
  SimulationConfig sim;
  sim.seed = options.seed;
  sim.n_replicates = options.n_replicates;
  const SimulationResult fields = simulate(truth, loc, sim);

  ScenarioResult result;
  result.spec = spec;
  result.replicates.resize(static_cast<std::size_t>(options.n_replicates));
  const int workers = std::max(1, std::min(options.threads, options.n_replicates));
  if (workers == 1) {
    for (int r = 0; r < options.n_replicates; ++r) {
      result.replicates[r] = run_replicate(spec, options, fields.replicates[r], r);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < options.n_replicates; r += workers) {
          result.replicates[r] = run_replicate(spec, options, fields.replicates[r], r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  const auto labels = model_labels(options);
  result.models.resize(labels.size());
  for (std::size_t m = 0; m < labels.size(); ++m) result.models[m].model = labels[m];
  int ok = 0;
  for (const auto& rep : result.replicates) {
    if (!rep.ok) {
      ++result.n_failed;
      continue;
    }
    ++ok;
    for (std::size_t m = 0; m < rep.scores.size(); ++m) {
      auto& s = result.models[m].mean_scores;
      s.mse += rep.scores[m].mse;
      s.mae += rep.scores[m].mae;
      s.lscore += rep.scores[m].lscore;
      s.crps += rep.scores[m].crps;
    }
  }
  for (auto& model : result.models) {
    auto& s = model.mean_scores;
    s.n = options.cross_validate ? ok : 0;
    if (s.n > 0) {
      s.mse /= s.n;
      s.mae /= s.n;
      s.lscore /= s.n;
      s.crps /= s.n;
    }
  }
  return result;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: no values");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::string scores_csv(const std::vector<ScenarioResult>& results) {
  std::ostringstream out;
  out << "scenario,model,n_used,n_failed,mse,mae,lscore,crps\n";
  for (const auto& r : results) {
    for (const auto& m : r.models) {
      out << r.spec.label << ',' << m.model << ',' << m.mean_scores.n << ',' << r.n_failed << ','
          << format_double(m.mean_scores.mse) << ',' << format_double(m.mean_scores.mae) << ','
          << format_double(m.mean_scores.lscore) << ',' << format_double(m.mean_scores.crps) << '\n';
    }
  }
  return out.str();
}

std::string estimates_csv(const std::vector<ScenarioResult>& results) {
  std::ostringstream out;
  out << "scenario,parameter,truth,n,q05,q25,q50,q75,q95\n";
  for (const auto& r : results) {
    const std::pair<const char*, double> params[] = {
        {"omega", r.spec.omega}, {"alpha", r.spec.alpha}, {"xi_tilde", r.spec.xi_tilde()}};
    for (const auto& [name, truth] : params) {
      std::vector<double> centered;
      for (const auto& rep : r.replicates) {
        if (rep.ok) centered.push_back(rep.fits.front().estimates.at(name) - truth);
      }
      out << r.spec.label << ',' << name << ',' << format_double(truth) << ',' << centered.size();
      for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        out << ',' << (centered.empty() ? std::string("nan") : format_double(quantile(centered, p)));
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace hybridcov::bench
