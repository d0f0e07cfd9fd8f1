#include "kernels_detail.hpp"

#include "obs/errors.hpp"
#include "obs/geometry.hpp"

#include <cmath>

namespace obs::kernels {

CellGeometry cell_geometry(const mesh::SimplicialMesh& m, int c) {
  const int n = m.dim();
  const auto cv = m.cell(c);
  Eigen::MatrixXd J(n, n);
  for (int k = 0; k < n; ++k) J.col(k) = m.vertex(cv[k + 1]) - m.vertex(cv[0]);
  CellGeometry g;
  g.volume = std::abs(J.determinant()) / geometry::factorial(n);
  g.gradients.resize(n, n + 1);
  g.gradients.rightCols(n) = J.inverse().transpose();
  g.gradients.col(0) = -g.gradients.rightCols(n).rowwise().sum();
  return g;
}

namespace detail {

void element_block(const mesh::SimplicialMesh& m, int c, const Eigen::MatrixXd& metric, double scale,
                   double mass_factor, double* K, double* M) {
  const int local = m.dim() + 1;
  const CellGeometry g = cell_geometry(m, c);
  const Eigen::MatrixXd flux = metric.size() == 0 ? g.gradients : Eigen::MatrixXd(metric * g.gradients);
  for (int a = 0; a < local; ++a) {
    for (int b = a; b < local; ++b) {
      // mirrored so that a non-identity metric still yields exactly symmetric blocks
      const double k = scale * g.volume * g.gradients.col(a).dot(flux.col(b));
      const double mass = scale * g.volume * mass_factor * (a == b ? 2.0 : 1.0);
      K[a * local + b] = K[b * local + a] = k;
      M[a * local + b] = M[b * local + a] = mass;
    }
  }
}

double mass_factor(int n) { return geometry::factorial(n) / geometry::factorial(n + 2); }

Eigen::VectorXd trace_row(const mesh::SimplicialMesh& m, int facet, const Eigen::VectorXd& normal,
                          const Eigen::MatrixXd& values) {
  const int c = m.facet_cell(facet);
  if (c < 0) throw MeshError("boundary facet " + std::to_string(facet) + " has no adjoining cell");
  const CellGeometry g = cell_geometry(m, c);
  const Eigen::VectorXd w = g.gradients.transpose() * normal;
  const auto cv = m.cell(c);
  Eigen::VectorXd row = Eigen::VectorXd::Zero(values.cols());
  for (int a = 0; a <= m.dim(); ++a) row += w(a) * values.row(cv[a]).transpose();
  return row;
}

std::complex<double> pair_row(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G, const Eigen::VectorXd& lambda,
                              double T, Eigen::Index k) {
  std::complex<double> row{0.0, 0.0};
  for (Eigen::Index l = 0; l < c.size(); ++l)
    row += std::conj(c(l)) * G(k, l) * time_factor(lambda(k) - lambda(l), T);
  return c(k) * row;
}

// Vertex -> incident cells, cells listed in increasing order.
void vertex_cells(const mesh::SimplicialMesh& m, std::vector<int>& start, std::vector<int>& cells) {
  start.assign(m.vertex_count() + 1, 0);
  for (int v : m.cell_data()) ++start[v + 1];
  for (int v = 0; v < m.vertex_count(); ++v) start[v + 1] += start[v];
  cells.assign(m.cell_data().size(), 0);
  std::vector<int> fill(start.begin(), start.end() - 1);
  for (int c = 0; c < m.cell_count(); ++c)
    for (int v : m.cell(c)) cells[fill[v]++] = c;
}

Eigen::MatrixXd cell_value_gradient(const mesh::SimplicialMesh& m, int c, const Eigen::MatrixXd& values,
                                    double& volume) {
  const CellGeometry g = cell_geometry(m, c);
  volume = g.volume;
  const auto cv = m.cell(c);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(m.dim(), values.cols());
  for (int a = 0; a <= m.dim(); ++a) grad += g.gradients.col(a) * values.row(cv[a]);
  return grad;
}

}  // namespace detail

std::complex<double> time_factor(double delta, double T) {
  const double x = delta * T;
  if (std::abs(x) < 1e-6) return T * std::complex<double>(1.0 - x * x / 6.0, -0.5 * x);
  const double half = std::sin(0.5 * x);
  return {std::sin(x) / delta, -2.0 * half * half / delta};
}

ElementMatrices element_matrices_serial(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& metric,
                                        double scale) {
  ElementMatrices out;
  out.local = m.dim() + 1;
  const std::size_t block = static_cast<std::size_t>(out.local * out.local);
  out.stiffness.resize(block * m.cell_count());
  out.mass.resize(block * m.cell_count());
  const double mf = detail::mass_factor(m.dim());
  for (int c = 0; c < m.cell_count(); ++c)
    detail::element_block(m, c, metric, scale, mf, out.stiffness.data() + block * c, out.mass.data() + block * c);
  return out;
}

Eigen::MatrixXd facet_traces_serial(const mesh::SimplicialMesh& m, const std::vector<int>& facets,
                                    const Eigen::VectorXd& normal, const Eigen::MatrixXd& vertex_values) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(facets.size()), vertex_values.cols());
  for (std::size_t i = 0; i < facets.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = detail::trace_row(m, facets[i], normal, vertex_values).transpose();
  return out;
}

Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& traces, const Eigen::VectorXd& weights) {
  const Eigen::Index modes = traces.cols();
  Eigen::MatrixXd G(modes, modes);
  for (Eigen::Index k = 0; k < modes; ++k) {
    for (Eigen::Index l = k; l < modes; ++l) {
      double sum = 0.0;
      for (Eigen::Index f = 0; f < traces.rows(); ++f) sum += weights(f) * traces(f, k) * traces(f, l);
      G(k, l) = sum;
      G(l, k) = sum;
    }
  }
  return G;
}

std::complex<double> pair_sum_serial(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G,
                                     const Eigen::VectorXd& lambda, double T) {
  std::complex<double> total{0.0, 0.0};
  for (Eigen::Index k = 0; k < c.size(); ++k) total += detail::pair_row(c, G, lambda, T, k);
  return total;
}

Eigen::MatrixXd radial_derivative_serial(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& vertex_values,
                                         const Eigen::VectorXd& origin) {
  const int n = m.dim();
  const Eigen::Index cols = vertex_values.cols();
  Eigen::MatrixXd grad_sum = Eigen::MatrixXd::Zero(n * m.vertex_count(), cols);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(m.vertex_count());
  for (int c = 0; c < m.cell_count(); ++c) {
    double vol = 0.0;
    const Eigen::MatrixXd grad = detail::cell_value_gradient(m, c, vertex_values, vol);
    for (int v : m.cell(c)) {
      grad_sum.middleRows(static_cast<Eigen::Index>(n) * v, n) += vol * grad;
      weight(v) += vol;
    }
  }
  Eigen::MatrixXd out(m.vertex_count(), cols);
  for (int v = 0; v < m.vertex_count(); ++v) {
    const Eigen::VectorXd r = m.vertex(v) - origin;
    out.row(v) = (r.transpose() * grad_sum.middleRows(static_cast<Eigen::Index>(n) * v, n)) / weight(v);
  }
  return out;
}

ElementMatrices element_matrices(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& metric, double scale,
                                 Exec exec) {
  return exec == Exec::serial ? element_matrices_serial(m, metric, scale)
                              : element_matrices_parallel(m, metric, scale);
}

Eigen::MatrixXd facet_traces(const mesh::SimplicialMesh& m, const std::vector<int>& facets,
                             const Eigen::VectorXd& normal, const Eigen::MatrixXd& vertex_values, Exec exec) {
  return exec == Exec::serial ? facet_traces_serial(m, facets, normal, vertex_values)
                              : facet_traces_parallel(m, facets, normal, vertex_values);
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& traces, const Eigen::VectorXd& weights, Exec exec) {
  return exec == Exec::serial ? weighted_gram_serial(traces, weights) : weighted_gram_parallel(traces, weights);
}

std::complex<double> pair_sum(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G, const Eigen::VectorXd& lambda,
                              double T, Exec exec) {
  return exec == Exec::serial ? pair_sum_serial(c, G, lambda, T) : pair_sum_parallel(c, G, lambda, T);
}

Eigen::MatrixXd radial_derivative(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& vertex_values,
                                  const Eigen::VectorXd& origin, Exec exec) {
  return exec == Exec::serial ? radial_derivative_serial(m, vertex_values, origin)
                              : radial_derivative_parallel(m, vertex_values, origin);
}

}  // namespace obs::kernels
