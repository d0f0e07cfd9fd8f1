// Batch driver for boundary-observability verification runs on simplices.

#include "obs/errors.hpp"
#include "obs/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

void apply_thread_cap() {
  const char* env = std::getenv("OBS_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "ignoring OBS_THREADS='" << env << "': expected a positive integer\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_max_threads())));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw obs::InvalidInput("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"Boundary observability of the Schroedinger equation on simplices"};
  app.require_subcommand(1);
  app.fallthrough();

  nlohmann::json flags = nlohmann::json::object();
  std::vector<std::function<void()>> collect;
  auto option = [&]<class T>(const std::string& name, T& target, const std::string& help) {
    auto* opt = app.add_option("--" + name, target, help);
    collect.push_back([&flags, &target, opt, name] {
      if (opt->count() > 0) flags[name] = target;
    });
    return opt;
  };

  std::string shape, face, data, out, config_path;
  int level = 0, level_min = 0, modes = 0, mode = 0, random_modes = 0, t_points = 0, states = 0, samples = 0;
  double t0 = 0, t_ratio = 0, ratio_from = 0, tol_ratio = 0, tol_identity = 0, tol_quadrature = 0;
  double slope_min = 0, slope_max = 0, order_min = 0, order_max = 0, time = 0;
  std::uint64_t seed = 0;
  std::vector<int> n;
  std::vector<std::string> format;

  option("shape", shape, "standard-2, standard-3, half-square-pi, equilateral:<side>, random-<n>:<seed>, JSON or @file");
  option("level", level, "refinement level (at most 8 in 2D, 5 in 3D)");
  option("level-min", level_min, "first level of the eig convergence table");
  option("modes", modes, "number of eigenmodes");
  option("face", face, "face index or 'all'");
  option("data", data, "initial data: random or stationary");
  option("mode", mode, "1-based eigenmode for stationary data");
  option("random-modes", random_modes, "modes carrying random initial data");
  option("t0", t0, "first time of the geometric grid (default 2 pi / lambda_1)");
  option("t-points", t_points, "number of grid times");
  option("t-ratio", t_ratio, "grid growth factor");
  option("ratio-from", ratio_from, "ratio is checked for T >= ratio-from * t0");
  option("seed", seed, "seed for random data");
  option("states", states, "number of random states for identity");
  option("tol-ratio", tol_ratio, "allowed |N/P - 1|");
  option("tol-identity", tol_identity, "allowed relative residual of the flux identity");
  option("tol-quadrature", tol_quadrature, "allowed quadrature discrepancy");
  option("slope-min", slope_min, "lower end of the accepted remainder slope");
  option("slope-max", slope_max, "upper end of the accepted remainder slope");
  option("order-min", order_min, "lower end of the accepted convergence order");
  option("order-max", order_max, "upper end of the accepted convergence order");
  option("n", n, "counterexample mode numbers")->delimiter(',');
  option("time", time, "final time for counterexample and identity");
  option("samples", samples, "random functions in the Poincare sweep");
  option("out", out, "report directory (default obs-<command>-<timestamp>)");
  option("format", format, "any of csv,json,svg")->delimiter(',');
  auto* dump = app.add_flag("--dump-mesh", "write mesh.json");
  app.add_option("--config", config_path, "JSON file with the same keys as the flags; flags win");

  for (const auto& name : obs::cli::commands()) app.add_subcommand(name, "run " + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& f : collect) f();
  if (dump->count() > 0) flags["dump-mesh"] = true;

  obs::cli::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = obs::cli::apply_json(cfg, read_file(config_path));
    cfg = obs::cli::apply_json(cfg, flags.dump());
  } catch (const obs::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return obs::cli::execute(cfg, std::cout, std::cerr);
}
