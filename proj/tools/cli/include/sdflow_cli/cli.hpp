#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdflow::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kNotCertified = 2,
  kUsage = 64,
  kParse = 65,
};

/// Malformed key=value configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads `key = value` lines ('#' starts a comment) into `--key=value`
/// arguments; underscores in keys become dashes.
std::vector<std::string> load_config_args(const std::filesystem::path& path);

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

/// --out, else $SDFLOW_OUTPUT_ROOT, else ./sdflow-out.
std::filesystem::path output_root(const std::string& out_flag);

}  // namespace sdflow::cli
