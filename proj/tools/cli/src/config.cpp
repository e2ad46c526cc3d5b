#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "sdflow_cli/cli.hpp"

namespace sdflow::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> load_config_args(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
             c == '-' || c == '_';
    });
    if (!key_ok) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    if (key == "config") {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": nested config");
    }
    std::replace(key.begin(), key.end(), '_', '-');
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

std::filesystem::path output_root(const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (const char* env = std::getenv("SDFLOW_OUTPUT_ROOT"); env && *env) return env;
  return "sdflow-out";
}

}  // namespace sdflow::cli
