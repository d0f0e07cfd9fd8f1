#include "obs/exact.hpp"

#include "obs/errors.hpp"
#include "obs/kernels.hpp"
#include "obs/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace obs::exact {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

std::complex<double> SquareCounterexample::value(double x, double y, double t) const {
  return std::polar(1.0 / pi, -t * energy()) * (std::sin(x) * std::sin(n * y));
}

Eigen::Vector2cd SquareCounterexample::gradient(double x, double y, double t) const {
  const std::complex<double> phase = std::polar(1.0 / pi, -t * energy());
  return {phase * (std::cos(x) * std::sin(n * y)), phase * (n * std::sin(x) * std::cos(n * y))};
}

double SquareCounterexample::right_edge_observability(double T) const { return T / pi; }

SquareCounterexampleResult square_counterexample(int n, double T, bool with_quadrature) {
  if (n < 1) throw InvalidInput("counterexample mode n must be at least 1");
  if (!(T >= 0.0)) throw InvalidInput("observation time must be non-negative");
  const SquareCounterexample u{n};
  SquareCounterexampleResult r;
  r.n = n;
  r.T = T;
  r.energy = u.energy();
  r.right_edge_observability = u.right_edge_observability(T);
  r.ratio = r.right_edge_observability / r.energy;

  if (!with_quadrature) {
    r.energy_quadrature = r.observability_quadrature = r.l2_norm_quadrature =
        std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const auto zero = [](double) { return 0.0; };
  const auto side = [](double) { return 2.0 * pi; };
  r.energy_quadrature = integrate_2d([&](double x, double y) { return u.gradient(x, y, 0.0).squaredNorm(); }, 0.0,
                                     2.0 * pi, zero, side);
  r.l2_norm_quadrature =
      std::sqrt(integrate_2d([&](double x, double y) { return std::norm(u.value(x, y, 0.0)); }, 0.0, 2.0 * pi, zero,
                             side));
  // d_nu = d_x on {x = 2 pi}; integrate over y and t
  r.observability_quadrature = T == 0.0 ? 0.0
                                        : integrate_2d([&](double t, double y) { return std::norm(u.gradient(2.0 * pi, y, t)(0)); },
                                                       0.0, T, zero, side);
  return r;
}

TriangleEigenmode::TriangleEigenmode(int m, int k) : m_(m), k_(k) {
  if (k < 1 || m <= k) throw InvalidInput("triangle modes need m > k >= 1");
}

double TriangleEigenmode::value(double x, double y) const {
  return std::sin(m_ * x) * std::sin(k_ * y) - std::sin(k_ * x) * std::sin(m_ * y);
}

Eigen::Vector2d TriangleEigenmode::gradient(double x, double y) const {
  const double m = m_, k = k_;
  return {m * std::cos(m * x) * std::sin(k * y) - k * std::cos(k * x) * std::sin(m * y),
          k * std::sin(m * x) * std::cos(k * y) - m * std::sin(k * x) * std::cos(m * y)};
}

Eigen::Matrix2d TriangleEigenmode::hessian(double x, double y) const {
  const double m = m_, k = k_;
  Eigen::Matrix2d H;
  H(0, 0) = -m * m * std::sin(m * x) * std::sin(k * y) + k * k * std::sin(k * x) * std::sin(m * y);
  H(1, 1) = -k * k * std::sin(m * x) * std::sin(k * y) + m * m * std::sin(k * x) * std::sin(m * y);
  H(0, 1) = H(1, 0) = m * k * std::cos(m * x) * std::cos(k * y) - k * m * std::cos(k * x) * std::cos(m * y);
  return H;
}

TriangleEigenmode triangle_mode(int m, int k) { return TriangleEigenmode(m, k); }

std::vector<TriangleEigenmode> lowest_triangle_modes(int count) {
  std::vector<TriangleEigenmode> out;
  if (count < 1) return out;
  // every mode with m^2 + k^2 <= bound has m <= sqrt(bound)
  for (int bound_m = 2;; bound_m *= 2) {
    out.clear();
    for (int m = 2; m <= bound_m; ++m)
      for (int k = 1; k < m; ++k) out.emplace_back(m, k);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.eigenvalue() != b.eigenvalue() ? a.eigenvalue() < b.eigenvalue() : a.m() < b.m();
    });
    if (static_cast<int>(out.size()) >= count &&
        out[static_cast<std::size_t>(count - 1)].eigenvalue() <= static_cast<double>(bound_m + 1) * (bound_m + 1)) {
      out.erase(out.begin() + count, out.end());
      return out;
    }
  }
}

namespace {

template <typename Integrand>
double edge_integral(int edge, Integrand&& g) {
  static const geometry::Simplex tri = shapes::half_square_pi();
  if (edge < 0 || edge > 2) throw InvalidInput("half-square triangle has edges 0, 1, 2");
  const geometry::FaceInfo f = geometry::face(tri, edge);
  const Eigen::VectorXd p = tri.vertex(f.vertex_indices[0]);
  const Eigen::VectorXd q = tri.vertex(f.vertex_indices[1]);
  const double length = (q - p).norm();
  const Eigen::Vector2d nu = f.normal;
  return length * integrate(
                      [&](double s) {
                        const Eigen::Vector2d x = p + s * (q - p);
                        return g(x, nu);
                      },
                      0.0, 1.0);
}

}  // namespace

double edge_quadrature_oracle(const TriangleEigenmode& a, const TriangleEigenmode& b, int edge) {
  return edge_integral(edge, [&](const Eigen::Vector2d& x, const Eigen::Vector2d& nu) {
    return a.gradient(x(0), x(1)).dot(nu) * b.gradient(x(0), x(1)).dot(nu);
  });
}

std::complex<double> edge_quadrature_oracle(const TriangleEigenmode& a, const TriangleEigenmode& b, int edge,
                                            double T) {
  if (!(T >= 0.0)) throw InvalidInput("observation time must be non-negative");
  return edge_quadrature_oracle(a, b, edge) * kernels::time_factor(a.eigenvalue() - b.eigenvalue(), T);
}

double rellich_boundary_sum(const TriangleEigenmode& phi) {
  double sum = 0.0;
  for (int edge = 0; edge < 3; ++edge) {
    sum += edge_integral(edge, [&](const Eigen::Vector2d& x, const Eigen::Vector2d& nu) {
      const double dn = phi.gradient(x(0), x(1)).dot(nu);
      return x.dot(nu) * dn * dn;
    });
  }
  return sum;
}

double triangle_inner_product(const TriangleEigenmode& a, const TriangleEigenmode& b) {
  return integrate_2d([&](double x, double y) { return a.value(x, y) * b.value(x, y); }, 0.0, pi,
                      [](double) { return 0.0; }, [](double x) { return x; });
}

}  // namespace obs::exact
