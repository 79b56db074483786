#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using hybridcov::cli::RunConfig;
using Command = std::function<int(RunConfig&, std::ostream&)>;

struct Subcommand {
  CLI::App* app = nullptr;
  Command run;
  std::map<std::string, std::pair<CLI::Option*, std::unique_ptr<std::string>>> values;
  std::map<std::string, std::pair<CLI::Option*, std::unique_ptr<std::vector<std::string>>>> lists;
  std::map<std::string, CLI::Option*> flags;

  void value(const std::string& name, const std::string& help) {
    auto v = std::make_unique<std::string>();
    CLI::Option* o = app->add_option("--" + name, *v, help);
    values.emplace(name, std::make_pair(o, std::move(v)));
  }
  void list(const std::string& name, const std::string& help) {
    auto v = std::make_unique<std::vector<std::string>>();
    CLI::Option* o = app->add_option("--" + name, *v, help);
    lists.emplace(name, std::make_pair(o, std::move(v)));
  }
  void flag(const std::string& name, const std::string& help) { flags[name] = app->add_flag("--" + name, help); }

  RunConfig config(const std::string& name) const {
    RunConfig cfg(name);
    const auto cfg_file = values.find("config");
    if (cfg_file->second.first->count()) cfg.load_file(*cfg_file->second.second);
    for (const auto& [key, v] : values) {
      if (key != "config" && v.first->count()) cfg.set(key, *v.second);
    }
    for (const auto& [key, v] : lists) {
      if (!v.first->count()) continue;
      if (v.second->size() == 1) {
        cfg.set(key, v.second->front());
      } else {
        cfg.set(key, *v.second);
      }
    }
    for (const auto& [key, o] : flags) {
      if (o->count()) cfg.set(key, true);
    }
    return cfg;
  }
};

void model_options(Subcommand& s) {
  s.value("model", "kernel family: matern, cauchy, gencauchy, hybrid_cm, hybrid_hm");
  s.value("params", "name=value list, JSON object, or @file");
  s.value("dim", "ambient dimension (default 2, or the data dimension)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid Cauchy-Matern and hole-effect covariance models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(HYBRIDCOV_VERSION));

  std::map<std::string, Subcommand> subs;
  const auto add = [&](const std::string& name, const std::string& help, Command run) -> Subcommand& {
    Subcommand& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.run = std::move(run);
    s.value("config", "JSON file of settings; flags override it");
    s.value("seed", "random seed");
    s.value("out", "output directory (default .)");
    return s;
  };

  {
    auto& s = add("curves", "tabulate a covariance function", hybridcov::cli::cmd_curves);
    model_options(s);
    s.value("h-max", "largest lag (default 10)");
    s.value("n-grid", "number of grid intervals (default 200)");
    s.flag("rescale", "divide each curve by its value at 0");
    s.flag("reference", "add the component or limit curves");
    s.flag("oracle", "add the quadrature mixture oracle");
  }
  {
    auto& s = add("simulate", "simulate Gaussian fields", hybridcov::cli::cmd_simulate);
    model_options(s);
    s.value("n", "number of uniform locations (default 100)");
    s.value("box", "lo,hi or lo1,hi1,...,lod,hid (default 0,3)");
    s.value("replicates", "number of fields (default 1)");
    s.value("locations", "CSV of locations x1,...,xd");
    s.value("exp-mean", "write exp(mean + field) instead of the field");
  }
  {
    auto& s = add("fit", "maximum likelihood fit", hybridcov::cli::cmd_fit);
    model_options(s);
    s.value("data", "field CSV");
    s.value("fixed", "parameters held fixed");
    s.value("starts", "number of optimizer starts (default 3)");
  }
  {
    auto& s = add("krige", "simple kriging predictions", hybridcov::cli::cmd_krige);
    model_options(s);
    s.value("data", "field CSV");
    s.value("targets", "CSV of target locations");
    s.value("grid", "grid size over the data bounding box (default 20)");
  }
  {
    auto& s = add("cv", "leave-one-out cross-validation", hybridcov::cli::cmd_cv);
    s.value("data", "field CSV");
    s.list("model", "kernel family, repeatable");
    s.list("params", "parameters of the matching --model, repeatable");
    s.value("dim", "ambient dimension");
  }
  {
    auto& s = add("bench-scenarios", "simulation benchmark", hybridcov::cli::cmd_bench_scenarios);
    s.value("labels", "scenarios among a,b,c,d (default all)");
    s.value("n", "locations per field (default 100)");
    s.value("replicates", "fields per scenario (default 30)");
    s.value("gc-delta", "generalized Cauchy deltas (default 1,2)");
    s.value("starts", "optimizer starts (default 3)");
    s.value("threads", "worker threads");
  }
  {
    auto& s = add("preprocess", "log and centering transforms", hybridcov::cli::cmd_preprocess);
    s.value("data", "field CSV");
    s.value("transform", "steps in order (default log,center)");
    s.flag("inverse", "undo the steps recorded in --transform-manifest");
    s.value("transform-manifest", "manifest.json of the forward run");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hybridcov::cli::kExitConfig;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      RunConfig cfg = s.config(name);
      return s.run(cfg, std::cout);
    } catch (const hybridcov::cli::CliError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.code();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return hybridcov::cli::kExitIo;
    }
  }
  return hybridcov::cli::kExitConfig;
}
