#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace backflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr std::int64_t kDefaultSeed = 0xB0F107;

enum class OutputFormat { Csv, Json };

using ParamValue = std::variant<std::int64_t, double, std::string>;

struct RunConfig {
  std::string command;
  std::map<std::string, ParamValue> params;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::int64_t integer(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& text(const std::string& key) const;
};

// Thrown for malformed command lines; maps to exit code 2.
struct UsageError {
  std::string message;
};

// Parses argv-style arguments (without the program name). Unknown commands or
// flags raise UsageError. Returns a config with command "help" when --help
// was requested; its text is in params["text"].
RunConfig parse_args(const std::vector<std::string>& args);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run with every failure mapped to an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

// Comma-separated integers, e.g. "8,12,16".
std::vector<int> parse_int_list(const std::string& text);

struct VerifyOptions {
  std::vector<std::string> groups;  // empty: all
  std::int64_t seed = kDefaultSeed;
  std::string mutate;               // "", or "flux-eps-sign"
};

struct CheckResult {
  std::string group;
  std::string name;
  bool passed = false;
  std::string detail;
};

const std::vector<std::string>& verify_groups();

std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace backflow::cli
