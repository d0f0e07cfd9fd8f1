#include "kernels_detail.hpp"

#include "obs/errors.hpp"

#include <omp.h>

#include <exception>

namespace obs::kernels {

namespace {

// Rethrows the first exception captured inside a parallel region.
class ErrorSlot {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(obs_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

ElementMatrices element_matrices_parallel(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& metric,
                                          double scale) {
  ElementMatrices out;
  out.local = m.dim() + 1;
  const std::size_t block = static_cast<std::size_t>(out.local * out.local);
  out.stiffness.resize(block * m.cell_count());
  out.mass.resize(block * m.cell_count());
  const double mf = detail::mass_factor(m.dim());
  const int cells = m.cell_count();
#pragma omp parallel for schedule(static)
  for (int c = 0; c < cells; ++c)
    detail::element_block(m, c, metric, scale, mf, out.stiffness.data() + block * c, out.mass.data() + block * c);
  return out;
}

Eigen::MatrixXd facet_traces_parallel(const mesh::SimplicialMesh& m, const std::vector<int>& facets,
                                      const Eigen::VectorXd& normal, const Eigen::MatrixXd& vertex_values) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(facets.size()), vertex_values.cols());
  const int count = static_cast<int>(facets.size());
  ErrorSlot slot;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i)
    slot.run([&] { out.row(i) = detail::trace_row(m, facets[i], normal, vertex_values).transpose(); });
  slot.rethrow();
  return out;
}

Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& traces, const Eigen::VectorXd& weights) {
  const Eigen::Index modes = traces.cols();
  Eigen::MatrixXd G(modes, modes);
#pragma omp parallel for schedule(dynamic)
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

std::complex<double> pair_sum_parallel(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G,
                                       const Eigen::VectorXd& lambda, double T) {
  const Eigen::Index modes = c.size();
  std::vector<std::complex<double>> rows(static_cast<std::size_t>(modes));
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index k = 0; k < modes; ++k) rows[static_cast<std::size_t>(k)] = detail::pair_row(c, G, lambda, T, k);
  // ordered reduction keeps the result independent of the thread count
  std::complex<double> total{0.0, 0.0};
  for (const auto& r : rows) total += r;
  return total;
}

Eigen::MatrixXd radial_derivative_parallel(const mesh::SimplicialMesh& m, const Eigen::MatrixXd& vertex_values,
                                           const Eigen::VectorXd& origin) {
  const int n = m.dim();
  const int cells = m.cell_count();
  const Eigen::Index cols = vertex_values.cols();
  std::vector<Eigen::MatrixXd> grads(static_cast<std::size_t>(cells));
  std::vector<double> volumes(static_cast<std::size_t>(cells));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < cells; ++c) grads[c] = detail::cell_value_gradient(m, c, vertex_values, volumes[c]);

  std::vector<int> start, incident;
  detail::vertex_cells(m, start, incident);
  Eigen::MatrixXd out(m.vertex_count(), cols);
  const int verts = m.vertex_count();
#pragma omp parallel for schedule(static)
  for (int v = 0; v < verts; ++v) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, cols);
    double weight = 0.0;
    for (int i = start[v]; i < start[v + 1]; ++i) {
      sum += volumes[incident[i]] * grads[incident[i]];
      weight += volumes[incident[i]];
    }
    const Eigen::VectorXd r = m.vertex(v) - origin;
    out.row(v) = (r.transpose() * sum) / weight;
  }
  return out;
}

}  // namespace obs::kernels
