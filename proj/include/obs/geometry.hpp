#pragma once

#include <Eigen/Dense>

#include <vector>

namespace obs::geometry {

/// Non-degenerate n-simplex in R^n.
///
/// Stored translated so that vertex p0 sits at the origin: the columns of the
/// edge matrix A are p1 - p0, ..., pn - p0 and the offset is p0. Construction
/// rejects input with |det A| <= 1e-12 * (max edge length)^n.
class Simplex {
 public:
  explicit Simplex(std::vector<Eigen::VectorXd> vertices);

  int dim() const { return static_cast<int>(offset_.size()); }
  int vertex_count() const { return dim() + 1; }

  /// Vertex j in the original coordinates.
  Eigen::VectorXd vertex(int j) const;
  std::vector<Eigen::VectorXd> vertices() const;

  const Eigen::VectorXd& offset() const { return offset_; }
  const Eigen::MatrixXd& edge_matrix() const { return edges_; }
  double signed_det() const { return det_; }

  double max_edge_length() const;
  double min_edge_length() const;

  /// Gradient of the barycentric coordinate of vertex j (constant on the simplex).
  Eigen::VectorXd barycentric_gradient(int j) const;

  /// Barycentric coordinates of a point.
  Eigen::VectorXd barycentric(const Eigen::VectorXd& x) const;

  /// Apply x -> s * x + shift to every vertex.
  Simplex transformed(double scale, const Eigen::VectorXd& shift) const;

 private:
  Eigen::VectorXd offset_;
  Eigen::MatrixXd edges_;
  Eigen::MatrixXd inverse_;
  double det_ = 0.0;
};

/// Face G_j: the facet opposite vertex j.
struct FaceInfo {
  int index = 0;
  std::vector<int> vertex_indices;
  Eigen::VectorXd normal;  ///< unit, outward
  double volume = 0.0;     ///< (n-1)-volume
  Eigen::VectorXd centroid;
};

/// The map y = B (x - p0) onto the standard simplex, with Gamma = B B^T.
struct AffineNormalization {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Gamma;
  Eigen::VectorXd offset;
  double detA = 0.0;
  double condition = 1.0;  ///< 2-norm condition number of A
  bool ill_conditioned = false;

  Eigen::VectorXd to_reference(const Eigen::VectorXd& x) const { return B * (x - offset); }
  Eigen::VectorXd from_reference(const Eigen::VectorXd& y) const { return A * y + offset; }
};

double volume(const Simplex& s);

FaceInfo face(const Simplex& s, int j);
std::vector<FaceInfo> faces(const Simplex& s);

/// Distance from vertex j to the hyperplane of face j (any n).
double vertex_height(const Simplex& s, int j);

/// Triangle altitude onto side j; throws UnsupportedDimension unless n == 2.
double altitude(const Simplex& s, int j);

/// Condition numbers above this flag the normalization as ill-conditioned.
inline constexpr double kIllConditioned = 1e12;

AffineNormalization normalize(const Simplex& s);

/// (n-1)-volume of the parallelepiped spanned by the edges of face j issued
/// from its first vertex; equals (n-1)! Vol_{n-1}(G_j).
double parallelepiped_face_volume(const Simplex& s, int j = 0);

/// Longest edge, the L of the x-Poincare bound.
double longest_edge(const Simplex& s);

/// sqrt(det(V^T V)) for the columns of V.
double gram_volume(const Eigen::MatrixXd& spanning);

double factorial(int n);

}  // namespace obs::geometry
