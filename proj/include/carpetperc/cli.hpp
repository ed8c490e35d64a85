#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace carpetperc::cli {

/// Every flag of every subcommand; JSON keys are the long flag names with '-' replaced by '_'.
struct RunConfig {
  std::string subcommand;

  // global
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  int workers = 1;
  int max_level = 7;

  // geometry
  std::string generator = "carpet3";
  int n = 2;
  int cols = 1;
  int rows = 1;

  // sampling and events
  double p = 0.5;
  std::uint64_t samples = 1000;
  std::string event = "lr";
  bool dual_overlay = false;
  std::string x = "0,0";
  std::string y = "1,0";
  int m0 = 1;

  // estimator
  std::string p_grid = "0.1:0.9:0.1";
  std::string n_list = "1,2";
  bool coupled = true;
  double tol = 0.01;
  bool dual = false;
  double h = 0.02;
  std::uint64_t budget = 0;  // 0: 100 * samples
  bool conditional = false;

  // recursion
  std::string table = "f";
  int k = 3;
  std::string grid = "0:1:0.125";

  // branching
  int big_n = 3;
  int m = 2;
  bool audit = false;
  bool sample = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string config_to_json(const RunConfig& c);
/// Accepts a plain config or a run manifest (its "config" member). Parse errors carry the line
/// and column.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& c, const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// "a:b:step" (inclusive, tolerant to rounding) or "v1,v2,...".
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

enum ExitCode : int { kOk = 0, kInvalid = 2, kRuntime = 3 };

/// Parses argv, validates, dispatches. Output goes to `out` unless --out is given, in which case
/// a manifest `<out>.manifest.json` is written beside the artifact.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace carpetperc::cli
