#pragma once

#include "obs/kernels.hpp"
#include "obs/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <functional>
#include <vector>

namespace obs::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 stiffness and mass matrices, before and after Dirichlet elimination.
struct AssembledSystem {
  mesh::MeshPtr mesh;
  SparseMatrix K;       ///< interior x interior
  SparseMatrix M;       ///< interior x interior
  SparseMatrix K_full;  ///< all vertices
  SparseMatrix M_full;  ///< all vertices
  std::vector<int> dof_of_vertex;  ///< -1 on the boundary
  std::vector<int> vertex_of_dof;

  int dofs() const { return static_cast<int>(vertex_of_dof.size()); }

  /// Scatter interior values to all vertices, zero on the boundary.
  Eigen::MatrixXd to_vertices(const Eigen::MatrixXd& dof_values) const;
  Eigen::MatrixXcd to_vertices(const Eigen::MatrixXcd& dof_values) const;
};

/// Plain Laplacian. Throws MeshError ("mesh too coarse") without interior vertices.
AssembledSystem assemble(mesh::MeshPtr m, kernels::Exec exec = kernels::Exec::parallel);

/// Operator -div(metric grad) with every element matrix scaled by `scale`.
/// Assembling on the standard simplex with metric = Gamma and scale = |det A|
/// reproduces the plain Laplacian on the affine image.
AssembledSystem assemble_with_metric(mesh::MeshPtr m, const Eigen::MatrixXd& metric, double scale,
                                     kernels::Exec exec = kernels::Exec::parallel);

enum class EigenMethod { automatic, dense, shift_invert };

/// Interior DOF count up to which `automatic` uses the dense solver.
inline constexpr int kDenseLimit = 500;

/// Lowest eigenpairs of K phi = lambda M phi, M-orthonormal, ascending.
struct EigenBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;  ///< interior DOF values, one column per mode
  Eigen::VectorXd residuals;  ///< ||K phi - lambda M phi|| / (lambda ||M phi||)
  EigenMethod method = EigenMethod::dense;

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// Default mode count: 64 in 2D, 32 in 3D, capped at a quarter of the interior DOFs.
int default_mode_count(const AssembledSystem& sys);

/// Throws InvalidInput when count exceeds the DOF count and SolverError when
/// the iteration fails to reach residual 1e-9.
EigenBasis solve_eigen(const AssembledSystem& sys, int count, EigenMethod method = EigenMethod::automatic);

/// Per-facet normal derivative on face j (facets in facets_of_face order). The
/// values are given on all vertices and must vanish on the boundary.
Eigen::VectorXd neumann_trace(const Eigen::VectorXd& vertex_values, const mesh::SimplicialMesh& m, int face,
                              kernels::Exec exec = kernels::Exec::parallel);
Eigen::MatrixXd neumann_traces(const Eigen::MatrixXd& vertex_values, const mesh::SimplicialMesh& m, int face,
                               kernels::Exec exec = kernels::Exec::parallel);

using Sampler = std::function<std::complex<double>(const Eigen::VectorXd&)>;

/// c_k = phi_k^T M u0 with u0 sampled at the interior vertices.
Eigen::VectorXcd project(const Sampler& u0, const AssembledSystem& sys, const EigenBasis& basis);
Eigen::VectorXcd project(const Eigen::VectorXcd& u0_dofs, const AssembledSystem& sys, const EigenBasis& basis);

/// sum_k lambda_k |c_k|^2
double h1_energy(const Eigen::VectorXcd& c, const EigenBasis& basis);

/// Re(u^* K u) for interior values u.
double quadratic_energy(const Eigen::VectorXcd& u, const SparseMatrix& K);

}  // namespace obs::fem
