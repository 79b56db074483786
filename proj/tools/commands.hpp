#pragma once

#include <iosfwd>

#include "cli_support.hpp"

namespace hybridcov::cli {

// Each command reads its settings from cfg, writes its outputs and a
// manifest under --out, and returns an exit code. Failures are reported
// by throwing CliError.
int cmd_curves(RunConfig& cfg, std::ostream& log);
int cmd_simulate(RunConfig& cfg, std::ostream& log);
int cmd_fit(RunConfig& cfg, std::ostream& log);
int cmd_krige(RunConfig& cfg, std::ostream& log);
int cmd_cv(RunConfig& cfg, std::ostream& log);
int cmd_bench_scenarios(RunConfig& cfg, std::ostream& log);
int cmd_preprocess(RunConfig& cfg, std::ostream& log);

}  // namespace hybridcov::cli
