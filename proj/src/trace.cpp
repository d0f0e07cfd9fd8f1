#include "obs/errors.hpp"
#include "obs/fem.hpp"
#include "obs/geometry.hpp"

namespace obs::fem {

Eigen::MatrixXd neumann_traces(const Eigen::MatrixXd& vertex_values, const mesh::SimplicialMesh& m, int face,
                               kernels::Exec exec) {
  if (vertex_values.rows() != m.vertex_count()) throw InvalidInput("trace input must have one row per vertex");
  const auto facets = mesh::facets_of_face(m, face);
  std::vector<int> ids;
  ids.reserve(facets.size());
  for (const auto& f : facets) ids.push_back(f.facet);
  const geometry::FaceInfo info = geometry::face(m.domain(), face);
  return kernels::facet_traces(m, ids, info.normal, vertex_values, exec);
}

Eigen::VectorXd neumann_trace(const Eigen::VectorXd& vertex_values, const mesh::SimplicialMesh& m, int face,
                              kernels::Exec exec) {
  return neumann_traces(Eigen::MatrixXd(vertex_values), m, face, exec).col(0);
}

Eigen::VectorXcd project(const Eigen::VectorXcd& u0_dofs, const AssembledSystem& sys, const EigenBasis& basis) {
  if (u0_dofs.size() != sys.dofs()) throw InvalidInput("initial data must have one value per interior vertex");
  const Eigen::VectorXcd Mu = sys.M.cast<std::complex<double>>() * u0_dofs;
  return basis.vectors.transpose().cast<std::complex<double>>() * Mu;
}

Eigen::VectorXcd project(const Sampler& u0, const AssembledSystem& sys, const EigenBasis& basis) {
  Eigen::VectorXcd values(sys.dofs());
  for (int d = 0; d < sys.dofs(); ++d) values(d) = u0(sys.mesh->vertex(sys.vertex_of_dof[d]));
  return project(values, sys, basis);
}

double h1_energy(const Eigen::VectorXcd& c, const EigenBasis& basis) {
  if (c.size() != basis.count()) throw InvalidInput("coefficient vector length does not match the basis");
  double e = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) e += basis.eigenvalues(k) * std::norm(c(k));
  return e;
}

double quadratic_energy(const Eigen::VectorXcd& u, const SparseMatrix& K) {
  const Eigen::VectorXcd Ku = K.cast<std::complex<double>>() * u;
  return u.dot(Ku).real();
}

}  // namespace obs::fem
