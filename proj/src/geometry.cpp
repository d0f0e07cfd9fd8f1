#include "obs/geometry.hpp"

#include "obs/errors.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

namespace obs::geometry {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double gram_volume(const Eigen::MatrixXd& spanning) {
  if (spanning.cols() == 0) return 1.0;
  const Eigen::MatrixXd gram = spanning.transpose() * spanning;
  return std::sqrt(std::max(0.0, gram.determinant()));
}

Simplex::Simplex(std::vector<Eigen::VectorXd> vertices) {
  if (vertices.size() < 2) throw GeometryError("simplex needs at least two vertices");
  const auto n = static_cast<Eigen::Index>(vertices.size() - 1);
  for (const auto& v : vertices) {
    if (v.size() != n) {
      throw GeometryError("simplex with " + std::to_string(n + 1) + " vertices must live in R^" +
                          std::to_string(n));
    }
    if (!v.allFinite()) throw GeometryError("non-finite vertex coordinate");
  }
  offset_ = vertices[0];
  edges_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) edges_.col(j) = vertices[j + 1] - offset_;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(edges_);
  det_ = lu.determinant();
  const double scale = std::pow(max_edge_length(), static_cast<double>(n));
  if (!(std::abs(det_) > 1e-12 * scale)) throw GeometryError("degenerate simplex (vertices are affinely dependent)");
  inverse_ = lu.inverse();
}

Eigen::VectorXd Simplex::vertex(int j) const {
  if (j == 0) return offset_;
  return offset_ + edges_.col(j - 1);
}

std::vector<Eigen::VectorXd> Simplex::vertices() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(vertex_count());
  for (int j = 0; j < vertex_count(); ++j) out.push_back(vertex(j));
  return out;
}

double Simplex::max_edge_length() const {
  double best = 0.0;
  for (int a = 0; a < vertex_count(); ++a)
    for (int b = a + 1; b < vertex_count(); ++b) best = std::max(best, (vertex(a) - vertex(b)).norm());
  return best;
}

double Simplex::min_edge_length() const {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < vertex_count(); ++a)
    for (int b = a + 1; b < vertex_count(); ++b) best = std::min(best, (vertex(a) - vertex(b)).norm());
  return best;
}

Eigen::VectorXd Simplex::barycentric_gradient(int j) const {
  if (j < 0 || j > dim()) throw InvalidInput("vertex index out of range");
  if (j > 0) return inverse_.row(j - 1).transpose();
  return -inverse_.colwise().sum().transpose();
}

Eigen::VectorXd Simplex::barycentric(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd y = inverse_ * (x - offset_);
  Eigen::VectorXd out(dim() + 1);
  out(0) = 1.0 - y.sum();
  out.tail(dim()) = y;
  return out;
}

Simplex Simplex::transformed(double scale, const Eigen::VectorXd& shift) const {
  std::vector<Eigen::VectorXd> v = vertices();
  for (auto& p : v) p = scale * p + shift;
  return Simplex(std::move(v));
}

double volume(const Simplex& s) { return std::abs(s.signed_det()) / factorial(s.dim()); }

FaceInfo face(const Simplex& s, int j) {
  const int n = s.dim();
  if (j < 0 || j > n) throw InvalidInput("face index " + std::to_string(j) + " out of range");
  FaceInfo f;
  f.index = j;
  for (int v = 0; v <= n; ++v)
    if (v != j) f.vertex_indices.push_back(v);

  const Eigen::VectorXd grad = s.barycentric_gradient(j);
  f.normal = -grad / grad.norm();

  const Eigen::VectorXd base = s.vertex(f.vertex_indices.front());
  Eigen::MatrixXd span(n, n - 1);
  f.centroid = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd p = s.vertex(f.vertex_indices[k]);
    f.centroid += p / n;
    if (k > 0) span.col(k - 1) = p - base;
  }
  f.volume = gram_volume(span) / factorial(n - 1);
  return f;
}

std::vector<FaceInfo> faces(const Simplex& s) {
  std::vector<FaceInfo> out;
  for (int j = 0; j <= s.dim(); ++j) out.push_back(face(s, j));
  return out;
}

double vertex_height(const Simplex& s, int j) { return 1.0 / s.barycentric_gradient(j).norm(); }

double altitude(const Simplex& s, int j) {
  if (s.dim() != 2) throw UnsupportedDimension("altitude is defined for triangles only");
  return vertex_height(s, j);
}

AffineNormalization normalize(const Simplex& s) {
  AffineNormalization out;
  out.A = s.edge_matrix();
  out.offset = s.offset();
  out.detA = s.signed_det();
  out.B = out.A.inverse();
  out.Gamma = out.B * out.B.transpose();
  out.Gamma = 0.5 * (out.Gamma + out.Gamma.transpose());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.A);
  const auto& sv = svd.singularValues();
  out.condition = sv(0) / sv(sv.size() - 1);
  out.ill_conditioned = !(out.condition <= kIllConditioned);
  if (out.ill_conditioned)
    std::cerr << "warning: affine normalization is ill-conditioned (cond(A) = " << out.condition << ")\n";
  return out;
}

double parallelepiped_face_volume(const Simplex& s, int j) {
  const FaceInfo f = face(s, j);
  const int n = s.dim();
  const Eigen::VectorXd base = s.vertex(f.vertex_indices.front());
  Eigen::MatrixXd span(n, n - 1);
  for (int k = 1; k < n; ++k) span.col(k - 1) = s.vertex(f.vertex_indices[k]) - base;
  return gram_volume(span);
}

double longest_edge(const Simplex& s) { return s.max_edge_length(); }

}  // namespace obs::geometry
