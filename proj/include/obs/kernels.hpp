#pragma once

// Data-parallel kernels behind assembly, Neumann traces, face Gram matrices and
// modal pair sums. Every kernel has a serial reference and an OpenMP version;
// both accumulate in the same order so their results agree bit for bit.

#include "obs/mesh.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace obs::kernels {

enum class Exec { serial, parallel };

/// Barycentric gradients (columns) and unsigned volume of one cell.
struct CellGeometry {
  Eigen::MatrixXd gradients;  ///< n x (n+1)
  double volume = 0.0;
};

CellGeometry cell_geometry(const mesh::SimplicialMesh& m, int c);

/// Per-cell P1 matrices, (n+1)^2 entries each in row-major order.
struct ElementMatrices {
  int local = 0;  ///< n + 1
  std::vector<double> stiffness;
  std::vector<double> mass;
};

/// Element stiffness vol * grad(l_a)^T metric grad(l_b) and exact mass
/// vol * n! (1 + delta_ab) / (n+2)!, both multiplied by scale. An empty metric
/// means the identity.
ElementMatrices element_matrices_serial(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& metric,
                                        double scale);
ElementMatrices element_matrices_parallel(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& metric,
                                          double scale);

/// rows: the listed facets; cols: the columns of vertex_values. Entry (f, k) is
/// normal . grad of the P1 interpolant of column k on the cell adjoining facet f.
Eigen::MatrixXd facet_traces_serial(const mesh::SimplicialMesh& m, const std::vector<int>& facets,
                                    const Eigen::VectorXd& normal, const Eigen::MatrixXd& vertex_values);
Eigen::MatrixXd facet_traces_parallel(const mesh::SimplicialMesh& m, const std::vector<int>& facets,
                                      const Eigen::VectorXd& normal, const Eigen::MatrixXd& vertex_values);

/// G_kl = sum_f w_f T_fk T_fl.
Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& traces, const Eigen::VectorXd& weights);
Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& traces, const Eigen::VectorXd& weights);

/// int_0^T exp(-i delta t) dt; three-term Taylor series once |delta| T < 1e-6.
std::complex<double> time_factor(double delta, double T);

/// sum_{k,l} c_k conj(c_l) G_kl time_factor(lambda_k - lambda_l, T).
std::complex<double> pair_sum_serial(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G,
                                     const Eigen::VectorXd& lambda, double T);
std::complex<double> pair_sum_parallel(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G,
                                       const Eigen::VectorXd& lambda, double T);

/// (x_v - origin) . g_v per vertex and column, where g_v is the volume-weighted
/// average of the P1 gradients of the cells around v.
Eigen::MatrixXd radial_derivative_serial(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& vertex_values,
                                         const Eigen::VectorXd& origin);
Eigen::MatrixXd radial_derivative_parallel(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& vertex_values,
                                           const Eigen::VectorXd& origin);

// Policy-dispatching front ends.
ElementMatrices element_matrices(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& metric, double scale,
                                 Exec exec = Exec::parallel);
Eigen::MatrixXd facet_traces(const mesh::SimplicialMesh& m, const std::vector<int>& facets,
                             const Eigen::VectorXd& normal, const Eigen::MatrixXd& vertex_values,
                             Exec exec = Exec::parallel);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& traces, const Eigen::VectorXd& weights,
                              Exec exec = Exec::parallel);
std::complex<double> pair_sum(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G, const Eigen::VectorXd& lambda,
                              double T, Exec exec = Exec::parallel);
Eigen::MatrixXd radial_derivative(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& vertex_values,
                                  const Eigen::VectorXd& origin, Exec exec = Exec::parallel);

}  // namespace obs::kernels
