#include "obs/run.hpp"

#include "obs/dynamics.hpp"
#include "obs/errors.hpp"
#include "obs/exact.hpp"
#include "obs/fem.hpp"
#include "obs/geometry.hpp"
#include "obs/mesh.hpp"
#include "obs/report.hpp"
#include "obs/shapes.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <ctime>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>

namespace obs::cli {

using json = nlohmann::ordered_json;

namespace {

bool wants(const RunConfig& cfg, std::string_view fmt) {
  return std::find(cfg.format.begin(), cfg.format.end(), fmt) != cfg.format.end();
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

class Writer {
 public:
  Writer(const RunConfig& cfg, std::ostream& log) : dir_(output_directory(cfg)), log_(log) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void text(const std::string& name, const std::string& content) {
    report::write_file(dir_ / name, content);
    log_ << "wrote " << (dir_ / name).string() << '\n';
  }

  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  std::ostream& log_;
};

int default_level(const RunConfig& cfg, int dim) {
  if (cfg.level >= 0) return cfg.level;
  if (cfg.command == "eig") return dim == 2 ? 6 : 4;
  if (cfg.command == "identity") return dim == 2 ? 4 : 3;
  if (cfg.command == "poincare") return dim == 2 ? 3 : 2;
  if (cfg.command == "geom") return 0;
  return dim == 2 ? 5 : 3;
}

void check_level(int level, int dim) {
  const int cap = dim == 2 ? 8 : 5;
  if (level < 0 || level > cap)
    throw InvalidInput("level " + std::to_string(level) + " outside 0.." + std::to_string(cap) + " for dimension " +
                       std::to_string(dim));
}

std::vector<int> selected_faces(const RunConfig& cfg, int dim) {
  std::vector<int> out;
  if (cfg.face == "all") {
    for (int j = 0; j <= dim; ++j) out.push_back(j);
    return out;
  }
  int j = -1;
  try {
    std::size_t used = 0;
    j = std::stoi(cfg.face, &used);
    if (used != cfg.face.size()) j = -1;
  } catch (const std::exception&) {
    j = -1;
  }
  if (j < 0 || j > dim) throw InvalidInput("face must be 'all' or an index in 0.." + std::to_string(dim));
  out.push_back(j);
  return out;
}

mesh::MeshPtr build_mesh(const geometry::Simplex& s, int level, const RunConfig& cfg, Writer& w) {
  auto m = std::make_shared<const mesh::SimplicialMesh>(mesh::uniform_mesh(s, level));
  if (cfg.dump_mesh) w.text("mesh.json", mesh::to_json(*m));
  return m;
}

int cmd_geom(const RunConfig& cfg, const geometry::Simplex& s, Writer& w) {
  const int n = s.dim();
  const auto norm = geometry::normalize(s);
  const auto fs = geometry::faces(s);
  const double vol = geometry::volume(s);

  Eigen::VectorXd closure = Eigen::VectorXd::Zero(n);
  json faces = json::array();
  std::vector<std::vector<double>> rows;
  for (const auto& f : fs) {
    closure += f.volume * f.normal;
    json jf;
    jf["index"] = f.index;
    jf["normal"] = vec_json(f.normal);
    jf["volume"] = f.volume;
    jf["centroid"] = vec_json(f.centroid);
    jf["height"] = geometry::vertex_height(s, f.index);
    if (n == 2) jf["altitude"] = geometry::altitude(s, f.index);
    jf["observability_constant"] = dynamics::observability_constant(s, f.index);
    faces.push_back(jf);
    std::vector<double> row = {static_cast<double>(f.index), f.volume, geometry::vertex_height(s, f.index),
                               dynamics::observability_constant(s, f.index)};
    for (int d = 0; d < n; ++d) row.push_back(f.normal(d));
    rows.push_back(row);
  }

  double roundtrip = 0.0;
  for (int j = 0; j <= n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    if (j > 0) e(j - 1) = 1.0;
    roundtrip = std::max(roundtrip, (norm.to_reference(s.vertex(j)) - e).norm());
  }
  const double scale = std::pow(s.max_edge_length(), n - 1);
  const bool closure_ok = closure.norm() <= 1e-10 * scale;
  const bool roundtrip_ok = roundtrip <= 1e-10 * std::max(1.0, norm.condition);

  json j;
  j["dim"] = n;
  json verts = json::array();
  for (int v = 0; v <= n; ++v) verts.push_back(vec_json(s.vertex(v)));
  j["vertices"] = verts;
  j["volume"] = vol;
  j["signed_det"] = s.signed_det();
  j["normalization"] = {{"A", mat_json(norm.A)},
                        {"B", mat_json(norm.B)},
                        {"Gamma", mat_json(norm.Gamma)},
                        {"detA", norm.detA},
                        {"condition", norm.condition},
                        {"ill_conditioned", norm.ill_conditioned}};
  j["faces"] = faces;
  j["parallelepiped_face_volume"] = geometry::parallelepiped_face_volume(s, 0);
  j["closure_residual"] = closure.norm();
  j["normalization_residual"] = roundtrip;
  j["pass"] = closure_ok && roundtrip_ok;
  w.json_file("geometry.json", j);

  if (wants(cfg, "csv")) {
    std::vector<std::string> header = {"face", "volume", "height", "observability_constant"};
    for (int d = 0; d < n; ++d) header.push_back("normal_" + std::to_string(d));
    w.text("faces.csv", report::csv(header, rows));
  }
  if (cfg.dump_mesh) w.text("mesh.json", mesh::to_json(mesh::uniform_mesh(s, default_level(cfg, n))));
  return closure_ok && roundtrip_ok ? 0 : 1;
}

int cmd_eig(const RunConfig& cfg, const geometry::Simplex& s, Writer& w, std::ostream& log) {
  const int n = s.dim();
  const int top = default_level(cfg, n);
  check_level(top, n);
  const int bottom = cfg.level_min >= 0 ? cfg.level_min : std::min(top, std::max(2, top - 3));
  if (bottom > top) throw InvalidInput("level-min exceeds level");
  const int m = cfg.modes > 0 ? cfg.modes : 10;

  std::vector<report::EigenRow> rows;
  std::vector<Eigen::VectorXd> values;
  bool residuals_ok = true;
  for (int level = bottom; level <= top; ++level) {
    const auto t0 = std::chrono::steady_clock::now();
    auto mesh = std::make_shared<const mesh::SimplicialMesh>(mesh::uniform_mesh(s, level));
    if (cfg.dump_mesh && level == top) w.text("mesh.json", mesh::to_json(*mesh));
    const auto sys = fem::assemble(mesh);
    const auto basis = fem::solve_eigen(sys, std::min(m, sys.dofs()));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << "level " << level << ": " << sys.dofs() << " dofs, " << basis.count() << " modes, "
        << report::format_double(secs) << " s\n";
    for (int k = 0; k < basis.count(); ++k) {
      rows.push_back({level, k + 1, basis.eigenvalues(k), basis.residuals(k)});
      residuals_ok = residuals_ok && basis.residuals(k) <= 1e-9;
    }
    values.push_back(basis.eigenvalues);
  }
  if (wants(cfg, "csv")) w.text("eigenvalues.csv", report::eigen_csv(rows));

  json j;
  j["levels"] = {bottom, top};
  j["modes"] = m;
  bool pass = residuals_ok;
  const bool exact_known = cfg.shape == "half-square-pi";
  json conv = json::array();
  if (exact_known) {
    const auto modes = exact::lowest_triangle_modes(m);
    double worst_order_dev = 0.0;
    for (int k = 0; k < m; ++k) {
      json jk;
      const double lam = modes[static_cast<std::size_t>(k)].eigenvalue();
      jk["k"] = k + 1;
      jk["exact"] = lam;
      json errs = json::array(), orders = json::array();
      for (std::size_t L = 0; L < values.size(); ++L) {
        if (values[L].size() <= k) continue;
        errs.push_back(std::abs(values[L](k) - lam) / lam);
      }
      for (std::size_t L = 1; L < values.size(); ++L) {
        if (values[L].size() <= k || values[L - 1].size() <= k) continue;
        const double order = std::log2(std::abs(values[L - 1](k) - lam) / std::abs(values[L](k) - lam));
        orders.push_back(order);
      }
      jk["relative_error"] = errs;
      jk["order"] = orders;
      if (!orders.empty()) {
        const double last = orders.back().get<double>();
        const bool ok = last >= cfg.order_min && last <= cfg.order_max;
        jk["order_in_range"] = ok;
        pass = pass && ok;
        worst_order_dev = std::max(worst_order_dev, std::abs(last - 2.0));
      }
      conv.push_back(jk);
    }
    j["reference"] = "m^2 + k^2";
    j["lambda1_relative_error"] = std::abs(values.back()(0) - modes[0].eigenvalue()) / modes[0].eigenvalue();
    j["worst_order_deviation"] = worst_order_dev;
  } else {
    for (int k = 0; k < m; ++k) {
      json jk;
      jk["k"] = k + 1;
      json orders = json::array();
      for (std::size_t L = 2; L < values.size(); ++L) {
        if (values[L].size() <= k) continue;
        const double d1 = values[L - 2](k) - values[L - 1](k);
        const double d2 = values[L - 1](k) - values[L](k);
        orders.push_back(std::log2(std::abs(d1 / d2)));
      }
      jk["richardson_order"] = orders;
      conv.push_back(jk);
    }
  }
  j["convergence"] = conv;
  j["residuals_ok"] = residuals_ok;
  j["pass"] = pass;
  if (wants(cfg, "json")) w.json_file("summary.json", j);
  return pass ? 0 : 1;
}

int cmd_observe(const RunConfig& cfg, const geometry::Simplex& s, Writer& w, std::ostream& log) {
  const int n = s.dim();
  const int level = default_level(cfg, n);
  check_level(level, n);
  const auto faces = selected_faces(cfg, n);
  const auto mesh = build_mesh(s, level, cfg, w);
  const auto sys = fem::assemble(mesh);
  int count = cfg.modes > 0 ? cfg.modes : fem::default_mode_count(sys);
  const bool stationary = cfg.data == "stationary";
  count = std::max(count, stationary ? cfg.mode : cfg.random_modes);
  auto basis = std::make_shared<const fem::EigenBasis>(fem::solve_eigen(sys, count));
  log << "level " << level << ": " << sys.dofs() << " dofs, " << basis->count() << " modes\n";

  Eigen::VectorXcd c;
  if (stationary) {
    c = Eigen::VectorXcd::Zero(basis->count());
    c(cfg.mode - 1) = 1.0;
  } else {
    c = dynamics::random_smooth_coefficients(*basis, cfg.random_modes, cfg.seed);
  }
  const dynamics::SpectralState state(basis, c);
  const double t0 = cfg.t0 > 0 ? cfg.t0 : dynamics::default_t0(*basis);
  const auto grid = dynamics::geometric_grid(t0, cfg.t_points, cfg.t_ratio);

  json per_face = json::array();
  bool pass = true;
  double worst_ratio = 1.0, worst_dev = -1.0, sup_all = 0.0;
  double slope_worst = -std::numeric_limits<double>::infinity();
  for (int face : faces) {
    const auto r = dynamics::remainder_scan(state, sys, face, grid);
    const std::string stem = "observe-face" + std::to_string(face);
    if (wants(cfg, "csv")) w.text(stem + ".csv", report::observability_csv(r));
    if (wants(cfg, "svg")) w.text(stem + ".svg", report::remainder_svg(r));

    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    for (std::size_t i = 0; i < r.T.size(); ++i) {
      if (r.T[i] + 1e-12 * r.T[i] < cfg.ratio_from * t0 && i + 1 != r.T.size()) continue;
      rmin = std::min(rmin, r.ratio[i]);
      rmax = std::max(rmax, r.ratio[i]);
    }
    const bool ratio_ok = std::abs(rmin - 1.0) < cfg.tol_ratio && std::abs(rmax - 1.0) < cfg.tol_ratio;
    const bool slope_ok = stationary || (r.slope >= cfg.slope_min && r.slope <= cfg.slope_max);
    const bool face_ok = ratio_ok && slope_ok;
    pass = pass && face_ok;

    json jf;
    jf["face"] = face;
    jf["ratio"] = r.ratio.back();
    jf["ratio_min"] = rmin;
    jf["ratio_max"] = rmax;
    jf["sup_T_R"] = r.sup_T_R;
    jf["slope"] = r.slope;
    jf["rate"] = r.rate;
    jf["energy"] = r.energy;
    jf["lower_bound_ratio"] = r.lower_bound_ratio;
    jf["long_time_ratio"] = r.long_time_ratio;
    jf["pass_ratio"] = ratio_ok;
    if (!stationary) jf["pass_slope"] = slope_ok;
    jf["pass"] = face_ok;
    per_face.push_back(jf);

    const double dev = std::max(std::abs(rmin - 1.0), std::abs(rmax - 1.0));
    if (dev > worst_dev) {
      worst_dev = dev;
      worst_ratio = std::abs(rmin - 1.0) > std::abs(rmax - 1.0) ? rmin : rmax;
    }
    sup_all = std::max(sup_all, r.sup_T_R);
    slope_worst = std::max(slope_worst, r.slope);
    log << "face " << face << ": ratio " << report::format_double(r.ratio.back()) << ", slope "
        << report::format_double(r.slope) << (face_ok ? " ok" : " FAIL") << '\n';
  }

  json j;
  j["ratio"] = worst_ratio;
  j["sup_T_R"] = sup_all;
  j["slope"] = slope_worst;
  j["pass"] = pass;
  j["data"] = cfg.data;
  if (stationary) j["mode"] = cfg.mode; else j["seed"] = cfg.seed;
  j["level"] = level;
  j["dofs"] = sys.dofs();
  j["modes"] = basis->count();
  j["t0"] = t0;
  j["faces"] = per_face;
  if (wants(cfg, "json")) w.json_file("summary.json", j);
  return pass ? 0 : 1;
}

int cmd_identity(const RunConfig& cfg, const geometry::Simplex& s, Writer& w, std::ostream& log) {
  const int n = s.dim();
  const int level = default_level(cfg, n);
  check_level(level, n);
  const auto mesh = build_mesh(s, level, cfg, w);
  const auto sys = fem::assemble(mesh);
  const int count = std::max(cfg.modes > 0 ? cfg.modes : fem::default_mode_count(sys), cfg.random_modes);
  auto basis = std::make_shared<const fem::EigenBasis>(fem::solve_eigen(sys, count));
  const auto ops = dynamics::commutator_operators(*basis, sys);
  const double T = cfg.time > 0 ? cfg.time : dynamics::default_t0(*basis);

  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (int i = 0; i < cfg.states; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    const dynamics::SpectralState st(basis, dynamics::random_smooth_coefficients(*basis, cfg.random_modes, seed));
    const auto id = dynamics::commutator_identity(st, ops, T);
    rows.push_back({static_cast<double>(seed), T, id.boundary.real(), id.boundary.imag(), id.energy_term,
                    id.volume_term.real(), id.volume_term.imag(), id.residual});
    worst = std::max(worst, id.residual);
    log << "seed " << seed << ": residual " << report::format_double(id.residual) << '\n';
  }
  const bool pass = worst < cfg.tol_identity;
  if (wants(cfg, "csv"))
    w.text("identity.csv", report::csv({"seed", "T", "boundary_re", "boundary_im", "energy_term", "volume_re",
                                        "volume_im", "residual"},
                                       rows));
  json j;
  j["residual_max"] = worst;
  j["tolerance"] = cfg.tol_identity;
  j["level"] = level;
  j["dofs"] = sys.dofs();
  j["T"] = T;
  j["states"] = cfg.states;
  j["pass"] = pass;
  if (wants(cfg, "json")) w.json_file("summary.json", j);
  return pass ? 0 : 1;
}

int cmd_counterexample(const RunConfig& cfg, Writer& w) {
  const double T = cfg.time > 0 ? cfg.time : std::numbers::pi;
  std::vector<std::vector<double>> rows;
  json results = json::array();
  bool pass = true;
  for (int n : cfg.n) {
    const auto r = exact::square_counterexample(n, T, true);
    const bool ok = std::abs(r.observability_quadrature - r.right_edge_observability) <=
                        cfg.tol_quadrature * std::max(1.0, r.right_edge_observability) &&
                    std::abs(r.energy_quadrature - r.energy) <= cfg.tol_quadrature * std::max(1.0, r.energy) &&
                    std::abs(r.l2_norm_quadrature - 1.0) <= cfg.tol_quadrature;
    pass = pass && ok;
    rows.push_back({static_cast<double>(n), T, r.energy, r.right_edge_observability, r.ratio, r.energy_quadrature,
                    r.observability_quadrature, r.l2_norm_quadrature});
    results.push_back({{"n", n},
                       {"energy", r.energy},
                       {"observability", r.right_edge_observability},
                       {"ratio", r.ratio},
                       {"energy_quadrature", r.energy_quadrature},
                       {"observability_quadrature", r.observability_quadrature},
                       {"l2_norm_quadrature", r.l2_norm_quadrature},
                       {"pass", ok}});
  }
  if (wants(cfg, "csv"))
    w.text("counterexample.csv", report::csv({"n", "T", "energy", "observability", "ratio", "energy_quadrature",
                                              "observability_quadrature", "l2_norm_quadrature"},
                                             rows));
  json j;
  j["T"] = T;
  j["ratio"] = results.empty() ? json(nullptr) : results.back()["ratio"];
  j["results"] = results;
  j["pass"] = pass;
  if (wants(cfg, "json")) w.json_file("summary.json", j);
  return pass ? 0 : 1;
}

int cmd_poincare(const RunConfig& cfg, const geometry::Simplex& s, Writer& w) {
  const int n = s.dim();
  const int level = default_level(cfg, n);
  check_level(level, n);
  const auto mesh = build_mesh(s, level, cfg, w);
  const auto boundary = mesh::boundary_vertex_mask(*mesh);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  int violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.samples; ++i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(mesh->vertex_count());
    for (int p = 0; p < mesh->vertex_count(); ++p) {
      const double re = normal(rng), im = normal(rng);
      if (!boundary[static_cast<std::size_t>(p)]) v(p) = {re, im};
    }
    const auto r = dynamics::poincare_check(*mesh, v);
    if (!r.pass) ++violations;
    const double margin = r.lhs > 0 ? r.rhs / r.lhs : std::numeric_limits<double>::infinity();
    min_margin = std::min(min_margin, margin);
    rows.push_back({static_cast<double>(i), r.lhs, r.rhs, margin});
  }
  if (wants(cfg, "csv")) w.text("poincare.csv", report::csv({"sample", "lhs", "rhs", "margin"}, rows));
  json j;
  j["samples"] = cfg.samples;
  j["level"] = level;
  j["violations"] = violations;
  j["min_margin"] = min_margin;
  j["pass"] = violations == 0;
  if (wants(cfg, "json")) w.json_file("summary.json", j);
  return violations == 0 ? 0 : 1;
}

template <class T>
T take(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    throw InvalidInput("unknown subcommand '" + command + "'");
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput(std::string(what) + " must be positive");
  };
  positive(tol_ratio, "tol-ratio");
  positive(tol_identity, "tol-identity");
  positive(tol_quadrature, "tol-quadrature");
  positive(t_ratio, "t-ratio");
  positive(ratio_from, "ratio-from");
  if (t0 < 0.0 || !std::isfinite(t0)) throw InvalidInput("t0 must be positive");
  if (time < 0.0 || !std::isfinite(time)) throw InvalidInput("time must be non-negative");
  if (t_points < 2) throw InvalidInput("t-points must be at least 2");
  if (modes < 0) throw InvalidInput("modes must be positive");
  if (mode < 1) throw InvalidInput("mode index starts at 1");
  if (random_modes < 1) throw InvalidInput("random-modes must be positive");
  if (states < 1) throw InvalidInput("states must be positive");
  if (samples < 1) throw InvalidInput("samples must be positive");
  if (data != "random" && data != "stationary") throw InvalidInput("data must be 'random' or 'stationary'");
  if (!(slope_min < slope_max)) throw InvalidInput("slope-min must be below slope-max");
  if (!(order_min < order_max)) throw InvalidInput("order-min must be below order-max");
  if (n.empty()) throw InvalidInput("n needs at least one value");
  for (const auto& f : format)
    if (f != "csv" && f != "json" && f != "svg") throw InvalidInput("unknown format '" + f + "'");
}

RunConfig apply_json(RunConfig cfg, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [raw, v] : doc.items()) {
    std::string key = raw;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "command") cfg.command = take<std::string>(v, key);
    else if (key == "shape") cfg.shape = v.is_object() ? v.dump() : take<std::string>(v, key);
    else if (key == "level") cfg.level = take<int>(v, key);
    else if (key == "level-min") cfg.level_min = take<int>(v, key);
    else if (key == "modes") cfg.modes = take<int>(v, key);
    else if (key == "face") cfg.face = v.is_number_integer() ? std::to_string(v.get<int>()) : take<std::string>(v, key);
    else if (key == "data") cfg.data = take<std::string>(v, key);
    else if (key == "mode") cfg.mode = take<int>(v, key);
    else if (key == "random-modes") cfg.random_modes = take<int>(v, key);
    else if (key == "t0") cfg.t0 = take<double>(v, key);
    else if (key == "t-points") cfg.t_points = take<int>(v, key);
    else if (key == "t-ratio") cfg.t_ratio = take<double>(v, key);
    else if (key == "ratio-from") cfg.ratio_from = take<double>(v, key);
    else if (key == "seed") cfg.seed = take<std::uint64_t>(v, key);
    else if (key == "states") cfg.states = take<int>(v, key);
    else if (key == "tol-ratio") cfg.tol_ratio = take<double>(v, key);
    else if (key == "tol-identity") cfg.tol_identity = take<double>(v, key);
    else if (key == "tol-quadrature") cfg.tol_quadrature = take<double>(v, key);
    else if (key == "slope-min") cfg.slope_min = take<double>(v, key);
    else if (key == "slope-max") cfg.slope_max = take<double>(v, key);
    else if (key == "order-min") cfg.order_min = take<double>(v, key);
    else if (key == "order-max") cfg.order_max = take<double>(v, key);
    else if (key == "n") cfg.n = v.is_array() ? take<std::vector<int>>(v, key) : std::vector<int>{take<int>(v, key)};
    else if (key == "time") cfg.time = take<double>(v, key);
    else if (key == "samples") cfg.samples = take<int>(v, key);
    else if (key == "out") cfg.out = take<std::string>(v, key);
    else if (key == "format")
      cfg.format = v.is_array() ? take<std::vector<std::string>>(v, key) : std::vector<std::string>{take<std::string>(v, key)};
    else if (key == "dump-mesh") cfg.dump_mesh = take<bool>(v, key);
    else throw InvalidInput("unknown config key '" + raw + "'");
  }
  return cfg;
}

std::filesystem::path output_directory(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  return "obs-" + cfg.command + "-" + stamp;
}

int run(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.command == "counterexample") {
    Writer w(cfg, log);
    return cmd_counterexample(cfg, w);
  }
  const auto s = shapes::parse_shape(cfg.shape);
  if (cfg.command == "geom" && !cfg.dump_mesh) {
    Writer w(cfg, log);
    return cmd_geom(cfg, s, w);
  }
  if (s.dim() != 2 && s.dim() != 3) throw UnsupportedDimension("meshing supports triangles and tetrahedra only");
  check_level(default_level(cfg, s.dim()), s.dim());
  if (cfg.level_min > 0) check_level(cfg.level_min, s.dim());
  Writer w(cfg, log);
  if (cfg.command == "geom") return cmd_geom(cfg, s, w);
  if (cfg.command == "eig") return cmd_eig(cfg, s, w, log);
  if (cfg.command == "observe") return cmd_observe(cfg, s, w, log);
  if (cfg.command == "identity") return cmd_identity(cfg, s, w, log);
  return cmd_poincare(cfg, s, w);
}

int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    return run(cfg, log);
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedDimension& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const GeometryError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace obs::cli
