#include "cli_support.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hybridcov::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw CliError(kExitConfig, what + ": '" + text + "' is not a number");
  return v;
}

ParamMap params_from_object(const nlohmann::ordered_json& obj) {
  ParamMap m;
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_number()) throw CliError(kExitConfig, "params: value of '" + k + "' is not a number");
    m[k] = v.get<double>();
  }
  return m;
}

}  // namespace

void RunConfig::load_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CliError(kExitConfig, "config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw CliError(kExitConfig, "config " + path + ": top level must be an object");
  for (const auto& [k, v] : j.items()) values_[k] = v;
}

const nlohmann::ordered_json& RunConfig::raw(const std::string& key) const {
  if (!has(key)) throw CliError(kExitConfig, command_ + ": missing required setting --" + key);
  return values_.at(key);
}

std::string RunConfig::get_string(const std::string& key, const std::optional<std::string>& fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    raw(key);
  }
  const auto& v = values_.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

double RunConfig::get_double(const std::string& key, std::optional<double> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    raw(key);
  }
  const auto& v = values_.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return to_double(trim(v.get<std::string>()), "--" + key);
  throw CliError(kExitConfig, "--" + key + ": expected a number");
}

long long RunConfig::get_int(const std::string& key, std::optional<long long> fallback) const {
  const double v = get_double(key, fallback ? std::optional<double>(static_cast<double>(*fallback)) : std::nullopt);
  if (v != std::floor(v) || std::fabs(v) > 9.0e15) throw CliError(kExitConfig, "--" + key + ": expected an integer");
  return static_cast<long long>(v);
}

bool RunConfig::get_flag(const std::string& key) const {
  if (!has(key)) return false;
  const auto& v = values_.at(key);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw CliError(kExitConfig, "--" + key + ": expected true or false");
}

std::vector<std::string> RunConfig::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    return out;
  }
  std::stringstream ss(v.is_string() ? v.get<std::string>() : v.dump());
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ParamSource parse_params(const nlohmann::ordered_json& value) {
  ParamSource src;
  if (value.is_object()) {
    src.params = params_from_object(value);
    return src;
  }
  if (!value.is_string()) throw CliError(kExitConfig, "params: expected a string or an object");
  const std::string text = trim(value.get<std::string>());
  if (text.empty()) return src;
  if (text.front() == '@' || text.front() == '{') {
    const std::string body = text.front() == '@' ? read_text_file(text.substr(1)) : text;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw CliError(kExitConfig, "params: " + std::string(e.what()));
    }
    if (!j.is_object()) throw CliError(kExitConfig, "params: expected a JSON object");
    if (j.contains("family") && j["family"].is_string()) {
      try {
        src.family = family_from_name(j["family"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw CliError(kExitConfig, std::string("params: ") + e.what());
      }
    }
    if (j.contains("dim") && j["dim"].is_number_integer()) src.dim = j["dim"].get<int>();
    if (j.contains("estimates")) {
      src.params = params_from_object(j["estimates"]);
    } else if (j.contains("params")) {
      src.params = params_from_object(j["params"]);
    } else {
      j.erase("family");
      j.erase("dim");
      src.params = params_from_object(j);
    }
    return src;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CliError(kExitConfig, "params: expected name=value, got '" + item + "'");
    const std::string name = trim(item.substr(0, eq));
    if (src.params.count(name)) throw CliError(kExitConfig, "params: '" + name + "' given twice");
    src.params[name] = to_double(trim(item.substr(eq + 1)), "params " + name);
  }
  return src;
}

KernelSpec kernel_spec_from(const RunConfig& cfg, const std::string& model_key, const std::string& params_key) {
  const ParamSource src = parse_params(cfg.raw(params_key));
  KernelSpec spec;
  if (cfg.has(model_key)) {
    try {
      spec.family = family_from_name(cfg.get_string(model_key));
    } catch (const std::invalid_argument& e) {
      throw CliError(kExitConfig, std::string("--") + model_key + ": " + e.what());
    }
  } else if (src.family) {
    spec.family = *src.family;
  } else {
    cfg.raw(model_key);
  }
  spec.dim = static_cast<int>(cfg.get_int("dim", src.dim.value_or(2)));
  spec.params = src.params;
  return spec;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), "list"));
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitIo, "cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw CliError(kExitIo, "error reading " + path);
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError(kExitIo, "cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw CliError(kExitIo, "error writing " + path.string());
}

std::filesystem::path output_dir(const RunConfig& cfg) {
  const std::filesystem::path dir = cfg.get_string("out", ".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CliError(kExitIo, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg, const std::vector<std::string>& outputs,
                    const nlohmann::ordered_json& details) {
  nlohmann::ordered_json m;
  m["tool"] = "hybridcov";
  m["version"] = HYBRIDCOV_VERSION;
  m["command"] = cfg.command();
  m["config"] = cfg.values();
  m["outputs"] = outputs;
  if (!details.empty()) m["details"] = details;
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace hybridcov::cli
