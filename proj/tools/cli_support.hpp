#pragma once

// Run configuration, exit codes and file helpers shared by the
// hybridcov subcommands.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridcov/kernel_spec.hpp"
#include "hybridcov/quadrature.hpp"
#include "hybridcov/randfield.hpp"
#include "json.hpp"

namespace hybridcov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

/// Flat key/value configuration. Values from a --config JSON file are
/// loaded first; flags given on the command line overwrite them.
class RunConfig {
 public:
  explicit RunConfig(std::string command) : command_(std::move(command)) {}

  void load_file(const std::string& path);
  void set(const std::string& key, nlohmann::ordered_json value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.contains(key); }

  std::string get_string(const std::string& key, const std::optional<std::string>& fallback = std::nullopt) const;
  double get_double(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  long long get_int(const std::string& key, std::optional<long long> fallback = std::nullopt) const;
  bool get_flag(const std::string& key) const;
  /// A JSON array, or a comma-separated string.
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback = {}) const;
  const nlohmann::ordered_json& raw(const std::string& key) const;

  /// Records a default so that the manifest shows the value actually used.
  template <typename T>
  void default_to(const std::string& key, T value) {
    if (!has(key)) values_[key] = value;
  }

  const std::string& command() const { return command_; }
  const nlohmann::ordered_json& values() const { return values_; }

 private:
  std::string command_;
  nlohmann::ordered_json values_ = nlohmann::ordered_json::object();
};

/// Parameters given inline ("alpha=0.125,nu=0.5" or a JSON object), or
/// "@path" naming a KernelSpec or fit report JSON file.
struct ParamSource {
  ParamMap params;
  std::optional<Family> family;
  std::optional<int> dim;
};
ParamSource parse_params(const nlohmann::ordered_json& value);

/// Kernel spec from the model, params and dim keys; a family or dim
/// carried by an @file fills in whatever the flags leave out.
KernelSpec kernel_spec_from(const RunConfig& cfg, const std::string& model_key = "model",
                            const std::string& params_key = "params");

std::vector<double> parse_doubles(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::filesystem::path output_dir(const RunConfig& cfg);

/// Writes manifest.json next to the outputs.
void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg, const std::vector<std::string>& outputs,
                    const nlohmann::ordered_json& details = nlohmann::ordered_json::object());

/// Runs fn, turning library exceptions into CliError tagged with the stage.
/// Parse and validation errors map to exit 2, numeric failures to 4 and any
/// other runtime error to io_code.
template <typename F>
auto stage(const std::string& name, F&& fn, int io_code = kExitIo) -> decltype(fn()) {
  try {
    return fn();
  } catch (const CliError&) {
    throw;
  } catch (const FactorizationError& e) {
    throw CliError(kExitNumeric, name + ": " + e.what());
  } catch (const QuadratureError& e) {
    throw CliError(kExitNumeric, name + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw CliError(kExitNumeric, name + ": " + e.what());
  } catch (const std::range_error& e) {
    throw CliError(kExitNumeric, name + ": " + e.what());
  } catch (const std::overflow_error& e) {
    throw CliError(kExitNumeric, name + ": " + e.what());
  } catch (const std::underflow_error& e) {
    throw CliError(kExitNumeric, name + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError(kExitConfig, name + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw CliError(kExitConfig, name + ": " + e.what());
  } catch (const std::exception& e) {
    throw CliError(io_code, name + ": " + e.what());
  }
}

}  // namespace hybridcov::cli
