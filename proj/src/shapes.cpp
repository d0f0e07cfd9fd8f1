#include "obs/shapes.hpp"

#include "obs/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace obs::shapes {

using geometry::Simplex;

Simplex standard(int n) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  std::vector<Eigen::VectorXd> v(n + 1, Eigen::VectorXd::Zero(n));
  for (int j = 1; j <= n; ++j) v[j](j - 1) = 1.0;
  return Simplex(std::move(v));
}

Simplex half_square_pi() {
  const double pi = std::numbers::pi;
  return Simplex({Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(pi, 0.0), Eigen::Vector2d(pi, pi)});
}

Simplex equilateral(double side) {
  if (!(side > 0.0) || !std::isfinite(side)) throw InvalidInput("equilateral side must be positive");
  return Simplex({Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(side, 0.0),
                  Eigen::Vector2d(0.5 * side, 0.5 * std::sqrt(3.0) * side)});
}

double radius_ratio(const Simplex& s) {
  const int n = s.dim();
  double boundary = 0.0;
  for (const auto& f : geometry::faces(s)) boundary += f.volume;
  const double inradius = n * geometry::volume(s) / boundary;

  // circumcentre c (relative to p0): 2 (p_i - p0) . c = |p_i - p0|^2
  const Eigen::MatrixXd& A = s.edge_matrix();
  const Eigen::VectorXd rhs = A.colwise().squaredNorm().transpose();
  const Eigen::VectorXd centre = (2.0 * A.transpose()).fullPivLu().solve(rhs);
  return n * inradius / centre.norm();
}

Simplex random_simplex(int n, std::uint64_t seed, double min_quality) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<Eigen::VectorXd> v(n + 1, Eigen::VectorXd(n));
    for (auto& p : v)
      for (int i = 0; i < n; ++i) p(i) = unit(rng);
    try {
      Simplex s(std::move(v));
      if (radius_ratio(s) >= min_quality) return s;
    } catch (const GeometryError&) {
    }
  }
  throw InvalidInput("could not draw a random simplex of the requested quality");
}

namespace {

Simplex from_json_value(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
    throw InvalidInput("shape JSON must be an object with a \"vertices\" array");
  std::vector<Eigen::VectorXd> v;
  for (const auto& row : j["vertices"]) {
    if (!row.is_array()) throw InvalidInput("each vertex must be an array of coordinates");
    Eigen::VectorXd p(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number()) throw InvalidInput("vertex coordinates must be numbers");
      p(static_cast<Eigen::Index>(i)) = row[i].get<double>();
    }
    v.push_back(std::move(p));
  }
  try {
    return Simplex(std::move(v));
  } catch (const GeometryError& e) {
    throw InvalidInput(e.what());
  }
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InvalidInput("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  return value;
}

}  // namespace

Simplex from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed shape JSON: ") + e.what());
  }
  return from_json_value(j);
}

std::string to_json(const Simplex& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : s.vertices()) rows.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  return nlohmann::json{{"vertices", rows}}.dump();
}

Simplex parse_shape(std::string_view text) {
  if (text == "standard-2") return standard(2);
  if (text == "standard-3") return standard(3);
  if (text == "half-square-pi") return half_square_pi();
  if (text.starts_with("equilateral:"))
    return equilateral(parse_number<double>(text.substr(12), "equilateral side"));
  if (text.starts_with("random-")) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InvalidInput("random shapes are written random-<n>:<seed>");
    const int n = parse_number<int>(text.substr(7, colon - 7), "random dimension");
    if (n < 1 || n > 8) throw InvalidInput("random dimension must be in 1..8");
    return random_simplex(n, parse_number<std::uint64_t>(text.substr(colon + 1), "random seed"));
  }
  if (text.starts_with("@")) {
    std::ifstream in{std::string(text.substr(1))};
    if (!in) throw InvalidInput("cannot open shape file " + std::string(text.substr(1)));
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
  }
  if (text.starts_with("{")) return from_json(text);
  throw InvalidInput("unknown shape '" + std::string(text) + "'");
}

}  // namespace obs::shapes
