#include "obs/errors.hpp"
#include "obs/fem.hpp"

#include <Eigen/SparseCore>

namespace obs::fem {

namespace {

using Triplet = Eigen::Triplet<double>;

AssembledSystem assemble_impl(mesh::MeshPtr m, const Eigen::MatrixXd& metric, double scale, kernels::Exec exec) {
  if (!m) throw InvalidInput("assemble needs a mesh");
  AssembledSystem sys;
  sys.mesh = m;
  const auto boundary = mesh::boundary_vertex_mask(*m);
  sys.dof_of_vertex.assign(m->vertex_count(), -1);
  for (int v = 0; v < m->vertex_count(); ++v) {
    if (boundary[v]) continue;
    sys.dof_of_vertex[v] = static_cast<int>(sys.vertex_of_dof.size());
    sys.vertex_of_dof.push_back(v);
  }
  if (sys.vertex_of_dof.empty()) throw MeshError("mesh too coarse: no interior vertices");

  const kernels::ElementMatrices el = kernels::element_matrices(*m, metric, scale, exec);
  const int local = el.local;
  std::vector<Triplet> kf, mf, ki, mi;
  const std::size_t entries = static_cast<std::size_t>(m->cell_count()) * local * local;
  kf.reserve(entries);
  mf.reserve(entries);
  ki.reserve(entries);
  mi.reserve(entries);
  for (int c = 0; c < m->cell_count(); ++c) {
    const auto cv = m->cell(c);
    const std::size_t base = static_cast<std::size_t>(c) * local * local;
    for (int a = 0; a < local; ++a) {
      for (int b = 0; b < local; ++b) {
        const double kv = el.stiffness[base + a * local + b];
        const double mv = el.mass[base + a * local + b];
        kf.emplace_back(cv[a], cv[b], kv);
        mf.emplace_back(cv[a], cv[b], mv);
        const int da = sys.dof_of_vertex[cv[a]];
        const int db = sys.dof_of_vertex[cv[b]];
        if (da >= 0 && db >= 0) {
          ki.emplace_back(da, db, kv);
          mi.emplace_back(da, db, mv);
        }
      }
    }
  }
  const int nv = m->vertex_count();
  const int nd = sys.dofs();
  sys.K_full.resize(nv, nv);
  sys.M_full.resize(nv, nv);
  sys.K.resize(nd, nd);
  sys.M.resize(nd, nd);
  sys.K_full.setFromTriplets(kf.begin(), kf.end());
  sys.M_full.setFromTriplets(mf.begin(), mf.end());
  sys.K.setFromTriplets(ki.begin(), ki.end());
  sys.M.setFromTriplets(mi.begin(), mi.end());
  return sys;
}

}  // namespace

Eigen::MatrixXd AssembledSystem::to_vertices(const Eigen::MatrixXd& dof_values) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mesh->vertex_count(), dof_values.cols());
  for (int d = 0; d < dofs(); ++d) out.row(vertex_of_dof[d]) = dof_values.row(d);
  return out;
}

Eigen::MatrixXcd AssembledSystem::to_vertices(const Eigen::MatrixXcd& dof_values) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(mesh->vertex_count(), dof_values.cols());
  for (int d = 0; d < dofs(); ++d) out.row(vertex_of_dof[d]) = dof_values.row(d);
  return out;
}

AssembledSystem assemble(mesh::MeshPtr m, kernels::Exec exec) {
  return assemble_impl(std::move(m), Eigen::MatrixXd(), 1.0, exec);
}

AssembledSystem assemble_with_metric(mesh::MeshPtr m, const Eigen::MatrixXd& metric, double scale,
                                     kernels::Exec exec) {
  if (m && (metric.rows() != m->dim() || metric.cols() != m->dim()))
    throw InvalidInput("metric must be n x n");
  return assemble_impl(std::move(m), metric, scale, exec);
}

}  // namespace obs::fem
