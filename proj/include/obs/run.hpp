#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace obs::cli {

/// Everything a verification run needs. Defaults are chosen per subcommand
/// where a field is left at its sentinel (level -1, modes 0, t0 0).
struct RunConfig {
  std::string command;
  std::string shape = "standard-2";
  int level = -1;
  int level_min = -1;  ///< first level of an `eig` convergence table
  int modes = 0;
  std::string face = "all";
  std::string data = "random";  ///< random | stationary
  int mode = 1;                 ///< 1-based mode index for stationary data
  int random_modes = 20;
  double t0 = 0.0;
  int t_points = 11;
  double t_ratio = 2.0;
  double ratio_from = 32.0;  ///< ratio is asserted for T >= ratio_from * t0
  std::uint64_t seed = 1;
  int states = 1;
  double tol_ratio = 0.10;
  double tol_identity = 0.10;
  double tol_quadrature = 1e-10;
  double slope_min = -1.3;
  double slope_max = -0.7;
  double order_min = 1.8;
  double order_max = 2.2;
  std::vector<int> n = {1, 2, 5, 10};
  double time = 0.0;  ///< 0 selects pi for `counterexample` and t0 for `identity`
  int samples = 100;
  std::string out;
  std::vector<std::string> format = {"csv", "json"};
  bool dump_mesh = false;

  /// Throws InvalidInput on out-of-range values.
  void validate() const;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"geom", "eig", "observe", "identity", "counterexample", "poincare"};
  return names;
}

/// Overlay JSON keys (flag names with '-' or '_') onto `base`; unknown keys and
/// mistyped values raise InvalidInput.
RunConfig apply_json(RunConfig base, const std::string& json_text);

/// Output directory: `out` if set, else obs-<command>-<UTC timestamp>.
std::filesystem::path output_directory(const RunConfig& cfg);

/// Runs one subcommand and writes its reports. Returns 0 when every asserted
/// tolerance holds and 1 otherwise; throws obs::Error subclasses on failure.
int run(const RunConfig& cfg, std::ostream& log);

/// run() with the error contract applied: invalid input maps to 2 and other
/// failures to 1, with the message printed to `err`.
int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace obs::cli
