#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "bench.hpp"
#include "hybridcov/inference.hpp"
#include "hybridcov/predict.hpp"

namespace hybridcov::cli {

namespace {

FieldSample load_field(const RunConfig& cfg) {
  const std::string path = cfg.get_string("data");
  return stage("reading " + path, [&] {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "cannot open " + path + " for reading");
    return read_field_csv(in);
  });
}

Kernel make_kernel(const KernelSpec& spec) {
  return stage("kernel spec", [&] { return Kernel(spec); }, kExitConfig);
}

// Data dimension fills in --dim when neither the flag nor an @file sets it.
KernelSpec spec_for_data(RunConfig& cfg, const FieldSample& data, const std::string& model_key = "model",
                         const std::string& params_key = "params") {
  KernelSpec spec = kernel_spec_from(cfg, model_key, params_key);
  if (!cfg.has("dim") && !parse_params(cfg.raw(params_key)).dim) spec.dim = data.locations.dim();
  if (spec.dim != data.locations.dim()) {
    throw CliError(kExitConfig, "kernel dimension " + std::to_string(spec.dim) + " differs from data dimension " +
                                    std::to_string(data.locations.dim()));
  }
  return spec;
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
  return out.str();
}

Locations read_locations(const std::string& path) {
  return stage("reading " + path, [&] {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "cannot open " + path + " for reading");
    std::vector<std::string> header;
    const auto rows = read_numeric_csv(in, header);
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] != "x" + std::to_string(k + 1)) {
        throw std::runtime_error("location columns must be x1,...,xd; found '" + header[k] + "'");
      }
    }
    Locations loc;
    loc.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t k = 0; k < header.size(); ++k) loc.points(i, k) = rows[i][k];
    }
    loc.validate();
    return loc;
  });
}

// --box lo,hi for every axis, or lo1,hi1,...,lod,hid.
void parse_box(const RunConfig& cfg, int dim, std::vector<double>& lo, std::vector<double>& hi) {
  const auto v = parse_doubles(cfg.get_string("box", "0,3"));
  lo.assign(dim, 0.0);
  hi.assign(dim, 0.0);
  if (v.size() == 2) {
    std::fill(lo.begin(), lo.end(), v[0]);
    std::fill(hi.begin(), hi.end(), v[1]);
  } else if (v.size() == static_cast<std::size_t>(2 * dim)) {
    for (int k = 0; k < dim; ++k) {
      lo[k] = v[2 * k];
      hi[k] = v[2 * k + 1];
    }
  } else {
    throw CliError(kExitConfig, "--box: expected lo,hi or 2*dim values");
  }
  for (int k = 0; k < dim; ++k) {
    if (!(lo[k] < hi[k])) throw CliError(kExitConfig, "--box: each lower bound must be below its upper bound");
  }
}

std::uint64_t seed_of(RunConfig& cfg) {
  cfg.default_to("seed", 0);
  const long long s = cfg.get_int("seed");
  if (s < 0) throw CliError(kExitConfig, "--seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

}  // namespace

int cmd_curves(RunConfig& cfg, std::ostream& log) {
  const KernelSpec spec = kernel_spec_from(cfg);
  const Kernel k = make_kernel(spec);
  cfg.default_to("h-max", 10.0);
  cfg.default_to("n-grid", 200);
  const double h_max = cfg.get_double("h-max");
  const long long n_grid = cfg.get_int("n-grid");
  if (!(h_max > 0.0) || !std::isfinite(h_max)) throw CliError(kExitConfig, "--h-max must be positive");
  if (n_grid < 1 || n_grid > 10000000) throw CliError(kExitConfig, "--n-grid must lie in [1, 1e7]");
  const bool rescale = cfg.get_flag("rescale");
  const bool reference = cfg.get_flag("reference");
  const bool oracle = cfg.get_flag("oracle");

  using Curve = std::function<double(double)>;
  std::vector<std::string> names{"h", "phi"};
  std::vector<Curve> curves{[&](double h) { return k(h); }};
  if (reference) {
    if (spec.family == Family::hybrid_cm) {
      const HybridCMParams p = hybrid_cm_params(spec);
      names.insert(names.end(), {"cauchy", "matern"});
      curves.push_back([p](double h) { return p.omega1 * kernels::cauchy(h, p.lambda1); });
      curves.push_back([p](double h) { return p.omega2 * kernels::matern(h, p.lambda2); });
    } else if (spec.family == Family::hybrid_hm) {
      const HybridHMParams p = hybrid_hm_params(spec);
      names.insert(names.end(), {"limit_small_xi", "limit_large_xi"});
      curves.push_back([p](double h) { return p.omega2 * kernels::matern(h, p.lambda2); });
      curves.push_back([p](double h) {
        return p.omega1 * (p.tau * kernels::matern(std::sqrt(p.eta) * h, p.lambda1) - kernels::matern(h, p.lambda1));
      });
    } else {
      throw CliError(kExitConfig, "--reference: reference curves exist only for hybrid_cm and hybrid_hm");
    }
  }
  std::vector<MixtureSegment> segments;
  if (oracle) {
    segments = stage("oracle", [&] { return mixture_segments(spec); }, kExitConfig);
    names.push_back("oracle");
    curves.push_back([&](double h) { return eval_mixture(segments, h); });
  }

  std::vector<double> scale(curves.size(), 1.0);
  if (rescale) {
    for (std::size_t j = 0; j < curves.size(); ++j) scale[j] = stage("rescale", [&] { return curves[j](0.0); });
    for (double s : scale) {
      if (!(s > 0.0)) throw CliError(kExitNumeric, "rescale: curve value at h = 0 is not positive");
    }
  }
  std::vector<std::vector<double>> rows;
  double max_delta = 0.0;
  for (long long i = 0; i <= n_grid; ++i) {
    const double h = h_max * static_cast<double>(i) / static_cast<double>(n_grid);
    std::vector<double> row{h};
    for (std::size_t j = 0; j < curves.size(); ++j) row.push_back(stage("evaluating curves", [&] { return curves[j](h); }) / scale[j]);
    if (reference && spec.family == Family::hybrid_cm) row.insert(row.begin() + 4, 0.5 * (row[2] + row[3]));
    if (oracle) max_delta = std::max(max_delta, std::fabs(row[1] - row.back()));
    rows.push_back(std::move(row));
  }
  if (reference && spec.family == Family::hybrid_cm) names.insert(names.begin() + 4, "average");

  const auto dir = output_dir(cfg);
  write_text_file(dir / "curves.csv", table_csv(names, rows));
  nlohmann::ordered_json details;
  details["spec"] = nlohmann::ordered_json::parse(to_json(canonicalize(spec)));
  details["variance"] = k.variance();
  if (oracle) {
    details["max_abs_oracle_difference"] = max_delta;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", max_delta);
    log << "max |phi - oracle| = " << buf << '\n';
  }
  write_manifest(dir, cfg, {"curves.csv"}, details);
  return kExitOk;
}

int cmd_simulate(RunConfig& cfg, std::ostream& log) {
  const KernelSpec spec = kernel_spec_from(cfg);
  const Kernel k = make_kernel(spec);
  const std::uint64_t seed = seed_of(cfg);
  cfg.default_to("replicates", 1);
  const long long reps = cfg.get_int("replicates");
  if (reps < 1 || reps > 100000) throw CliError(kExitConfig, "--replicates must lie in [1, 100000]");

  Locations loc;
  if (cfg.has("locations")) {
    loc = read_locations(cfg.get_string("locations"));
    if (loc.dim() != spec.dim) throw CliError(kExitConfig, "--locations: dimension differs from --dim");
  } else {
    cfg.default_to("n", 100);
    cfg.default_to("box", "0,3");
    const long long n = cfg.get_int("n");
    if (n < 1 || n > 20000) throw CliError(kExitConfig, "--n must lie in [1, 20000]");
    std::vector<double> lo, hi;
    parse_box(cfg, spec.dim, lo, hi);
    loc = stage("sampling locations", [&] { return sample_uniform_locations(static_cast<int>(n), lo, hi, seed); });
  }
  SimulationConfig sc;
  sc.seed = seed;
  sc.n_replicates = static_cast<int>(reps);
  const SimulationResult sim = stage("simulation", [&] { return simulate(k, loc, sc); });

  const bool lognormal = cfg.has("exp-mean");
  const double shift = lognormal ? cfg.get_double("exp-mean") : 0.0;
  const auto dir = output_dir(cfg);
  std::vector<std::string> outputs;
  for (long long r = 0; r < reps; ++r) {
    FieldSample s = sim.replicates[r];
    if (lognormal) s.values = (s.values.array() + shift).exp().matrix();
    char name[32];
    if (reps == 1) {
      std::snprintf(name, sizeof name, "field.csv");
    } else {
      std::snprintf(name, sizeof name, "field_%04lld.csv", r);
    }
    std::ostringstream out;
    write_field_csv(out, s);
    write_text_file(dir / name, out.str());
    outputs.emplace_back(name);
  }
  nlohmann::ordered_json details;
  details["spec"] = nlohmann::ordered_json::parse(to_json(canonicalize(spec)));
  details["variance"] = k.variance();
  details["n"] = loc.size();
  details["jitter_used"] = sim.jitter_used;
  write_manifest(dir, cfg, outputs, details);
  log << "simulated " << reps << " replicate(s) at " << loc.size() << " locations, jitter " << sim.jitter_used << '\n';
  return kExitOk;
}

int cmd_fit(RunConfig& cfg, std::ostream& log) {
  const FieldSample data = load_field(cfg);
  const KernelSpec init = spec_for_data(cfg, data);
  ParamMask mask;
  for (const auto& [name, v] : init.params) mask.free.insert(name);
  if (cfg.has("fixed")) mask.fixed = parse_params(cfg.raw("fixed")).params;
  FitOptions fo;
  fo.seed = seed_of(cfg);
  cfg.default_to("starts", fo.n_starts);
  fo.n_starts = static_cast<int>(cfg.get_int("starts"));
  const FitResult fit = stage("fit", [&] { return fit_mle(init.family, init.dim, mask, data, init.params, fo); },
                              kExitNumeric);
  const auto dir = output_dir(cfg);
  write_text_file(dir / "fit.json", fit_to_json(fit) + "\n");
  write_manifest(dir, cfg, {"fit.json"});
  if (fit.loglik <= -kFailedLikelihoodPenalty) throw CliError(kExitNumeric, "fit: " + fit.diagnostic);
  log << family_name(fit.family) << ": loglik " << format_double(fit.loglik) << ", aic " << format_double(fit.aic)
      << ", converged " << (fit.converged ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_krige(RunConfig& cfg, std::ostream& log) {
  const FieldSample data = load_field(cfg);
  const KernelSpec spec = spec_for_data(cfg, data);
  const Kernel k = make_kernel(spec);
  Locations targets;
  if (cfg.has("targets")) {
    targets = read_locations(cfg.get_string("targets"));
  } else {
    cfg.default_to("grid", 20);
    const long long g = cfg.get_int("grid");
    if (g < 1 || g > 2000) throw CliError(kExitConfig, "--grid must lie in [1, 2000]");
    const int d = data.locations.dim();
    if (d > 2) throw CliError(kExitConfig, "--grid supports dimensions 1 and 2; pass --targets instead");
    const Eigen::RowVectorXd lo = data.locations.points.colwise().minCoeff();
    const Eigen::RowVectorXd hi = data.locations.points.colwise().maxCoeff();
    const auto axis = [&](int k2, long long i) {
      return g == 1 ? 0.5 * (lo(k2) + hi(k2)) : lo(k2) + (hi(k2) - lo(k2)) * static_cast<double>(i) / static_cast<double>(g - 1);
    };
    const long long n = d == 1 ? g : g * g;
    targets.points.resize(n, d);
    for (long long i = 0; i < n; ++i) {
      targets.points(i, 0) = axis(0, d == 1 ? i : i % g);
      if (d == 2) targets.points(i, 1) = axis(1, i / g);
    }
  }
  const PredictionSet p = stage("kriging", [&] { return simple_krige(k, data, targets); }, kExitNumeric);
  const auto dir = output_dir(cfg);
  std::ostringstream out;
  write_prediction_csv(out, p);
  write_text_file(dir / "predictions.csv", out.str());
  int clamped = 0;
  for (Eigen::Index i = 0; i < p.variances.size(); ++i) clamped += p.variances(i) != p.raw_variances(i);
  nlohmann::ordered_json details;
  details["spec"] = nlohmann::ordered_json::parse(to_json(canonicalize(spec)));
  details["jitter_used"] = p.jitter;
  details["n_variances_clamped"] = clamped;
  details["min_raw_variance"] = p.raw_variances.minCoeff();
  write_manifest(dir, cfg, {"predictions.csv"}, details);
  log << "kriged " << targets.size() << " targets from " << data.values.size() << " observations\n";
  return kExitOk;
}

int cmd_cv(RunConfig& cfg, std::ostream& log) {
  const FieldSample data = load_field(cfg);
  const auto models = cfg.get_list("model");
  if (!cfg.has("params")) cfg.raw("params");
  std::vector<nlohmann::ordered_json> params;
  const auto& raw = cfg.raw("params");
  if (raw.is_array()) {
    for (const auto& p : raw) params.push_back(p);
  } else {
    params.push_back(raw);
  }
  if (models.empty() || models.size() != params.size()) {
    throw CliError(kExitConfig, "cv: give one --params per --model (" + std::to_string(models.size()) + " models, " +
                                    std::to_string(params.size()) + " parameter sets)");
  }
  nlohmann::ordered_json report;
  report["models"] = nlohmann::ordered_json::array();
  std::string winner;
  double best = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    RunConfig one(cfg.command());
    one.set("model", models[i]);
    one.set("params", params[i]);
    if (cfg.has("dim")) one.set("dim", cfg.raw("dim"));
    const KernelSpec spec = spec_for_data(one, data);
    const Kernel k = make_kernel(spec);
    const std::string label = "model" + std::to_string(i + 1) + ":" + family_name(spec.family);
    const CVResult r = stage("cross-validation of " + label, [&] { return loo_cv(k, data); }, kExitNumeric);
    nlohmann::ordered_json entry;
    entry["label"] = label;
    entry["spec"] = nlohmann::ordered_json::parse(to_json(canonicalize(spec)));
    entry["scores"] = nlohmann::ordered_json::parse(scores_to_json(r.scores));
    report["models"].push_back(entry);
    log << "[" << label << "]\n" << scores_to_json(r.scores) << '\n';
    if (winner.empty() || r.scores.mse < best) {
      winner = label;
      best = r.scores.mse;
    }
  }
  report["winner_by_mse"] = winner;
  log << "winner by MSE: " << winner << '\n';
  const auto dir = output_dir(cfg);
  write_text_file(dir / "cv.json", report.dump(2) + "\n");
  write_manifest(dir, cfg, {"cv.json"});
  return kExitOk;
}

int cmd_bench_scenarios(RunConfig& cfg, std::ostream& log) {
  bench::BenchOptions o;
  o.seed = seed_of(cfg);
  cfg.default_to("labels", "a,b,c,d");
  cfg.default_to("n", o.n_points);
  cfg.default_to("replicates", o.n_replicates);
  cfg.default_to("gc-delta", "1,2");
  cfg.default_to("starts", o.n_starts);
  cfg.default_to("threads", static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  o.n_points = static_cast<int>(cfg.get_int("n"));
  o.n_replicates = static_cast<int>(cfg.get_int("replicates"));
  o.gc_deltas = parse_doubles(cfg.get_string("gc-delta"));
  o.n_starts = static_cast<int>(cfg.get_int("starts"));
  o.threads = static_cast<int>(cfg.get_int("threads"));
  if (o.n_points < 3 || o.n_points > 5000) throw CliError(kExitConfig, "--n must lie in [3, 5000]");
  if (o.n_replicates < 1) throw CliError(kExitConfig, "--replicates must be positive");
  if (o.threads < 1) throw CliError(kExitConfig, "--threads must be positive");
  std::vector<bench::ScenarioSpec> specs;
  for (const auto& label : cfg.get_list("labels")) {
    specs.push_back(stage("scenario labels", [&] { return bench::scenario(label); }, kExitConfig));
  }
  if (specs.empty()) throw CliError(kExitConfig, "--labels: no scenarios given");
  if (o.n_replicates == 1) log << "warning: a single replicate; means are single values\n";

  std::vector<bench::ScenarioResult> results;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::string failed_scenarios;
  for (const auto& s : specs) {
    results.push_back(stage("scenario " + s.label, [&] { return bench::run_scenario(s, o); }, kExitNumeric));
    const auto& r = results.back();
    nlohmann::ordered_json d;
    d["n_failed"] = r.n_failed;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.replicates.size(); ++i) {
      if (!r.replicates[i].ok) failures.push_back({{"replicate", i}, {"reason", r.replicates[i].failure}});
    }
    d["failures"] = failures;
    details[s.label] = d;
    if (r.n_failed > 0) log << "scenario " << s.label << ": " << r.n_failed << " failed replicate(s) excluded\n";
    if (r.n_failed > 0.05 * o.n_replicates) failed_scenarios += (failed_scenarios.empty() ? "" : ",") + s.label;
    for (const auto& m : r.models) {
      log << s.label << ' ' << m.model << ": mse " << format_double(m.mean_scores.mse) << " crps "
          << format_double(m.mean_scores.crps) << '\n';
    }
  }
  const auto dir = output_dir(cfg);
  write_text_file(dir / "scores.csv", bench::scores_csv(results));
  write_text_file(dir / "estimates.csv", bench::estimates_csv(results));
  write_manifest(dir, cfg, {"scores.csv", "estimates.csv"}, details);
  if (!failed_scenarios.empty()) {
    throw CliError(kExitNumeric, "bench-scenarios: more than 5% of replicates failed in scenario(s) " + failed_scenarios);
  }
  return kExitOk;
}

int cmd_preprocess(RunConfig& cfg, std::ostream& log) {
  const std::string path = cfg.get_string("data");
  std::vector<std::string> header;
  auto rows = stage("reading " + path, [&] {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "cannot open " + path + " for reading");
    return read_numeric_csv(in, header);
  });
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const bool inverse = cfg.get_flag("inverse");
  const auto dir = output_dir(cfg);
  nlohmann::ordered_json details;

  if (inverse) {
    const std::string mpath = cfg.get_string("transform-manifest");
    nlohmann::ordered_json m;
    try {
      m = nlohmann::ordered_json::parse(read_text_file(mpath));
    } catch (const nlohmann::json::exception& e) {
      throw CliError(kExitConfig, "--transform-manifest: " + std::string(e.what()));
    }
    if (!m.contains("details") || !m["details"].contains("transform")) {
      throw CliError(kExitConfig, "--transform-manifest: " + mpath + " is not a preprocess manifest");
    }
    const auto transform = m["details"]["transform"].get<std::vector<std::string>>();
    const double mean = m["details"].value("subtracted_mean", 0.0);
    std::vector<int> cols;
    for (const char* name : {"value", "mean"}) {
      if (column(name) >= 0) cols.push_back(column(name));
    }
    if (cols.empty()) throw CliError(kExitConfig, "preprocess: no value or mean column in " + path);
    for (auto& row : rows) {
      for (int c : cols) {
        for (auto t = transform.rbegin(); t != transform.rend(); ++t) {
          if (*t == "center") row[c] += mean;
          if (*t == "log") row[c] = std::exp(row[c]);
        }
      }
    }
    details["inverted"] = transform;
    details["added_mean"] = mean;
    write_text_file(dir / "restored.csv", table_csv(header, rows));
    write_manifest(dir, cfg, {"restored.csv"}, details);
    log << "restored " << rows.size() << " rows\n";
    return kExitOk;
  }

  cfg.default_to("transform", "log,center");
  const auto transform = cfg.get_list("transform");
  const int vc = column("value");
  if (vc < 0) throw CliError(kExitConfig, "preprocess: no value column in " + path);
  if (rows.empty()) throw CliError(kExitIo, "preprocess: " + path + " has no data rows");
  double subtracted = 0.0;
  for (const auto& t : transform) {
    if (t == "log") {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i][vc] > 0.0)) {
          throw CliError(kExitNumeric, "preprocess: log of nonpositive value at data row " + std::to_string(i + 1));
        }
        rows[i][vc] = std::log(rows[i][vc]);
      }
    } else if (t == "center") {
      Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) v(i) = rows[i][vc];
      const double mean = v.mean();
      for (auto& row : rows) row[vc] -= mean;
      subtracted += mean;
    } else {
      throw CliError(kExitConfig, "--transform: unknown step '" + t + "' (expected log or center)");
    }
  }
  details["transform"] = transform;
  details["subtracted_mean"] = subtracted;
  write_text_file(dir / "preprocessed.csv", table_csv(header, rows));
  write_manifest(dir, cfg, {"preprocessed.csv"}, details);
  log << "transformed " << rows.size() << " rows; subtracted mean " << format_double(subtracted) << '\n';
  return kExitOk;
}

}  // namespace hybridcov::cli
