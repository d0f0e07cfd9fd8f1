#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace obs::exact {

/// Composite 10-point Gauss-Legendre with the panel count doubled until two
/// successive estimates agree to tol * max(1, |I|). Throws SolverError past
/// 2^20 panels.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Iterated integral of f(x, y) over x in [a, b], y in [lo(x), hi(x)].
double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                    const std::function<double(double)>& lo, const std::function<double(double)>& hi,
                    double tol = 1e-12);

/// u(x, y, t) = (1/pi) exp(-i t (1 + n^2)) sin(x) sin(n y) on [0, 2pi]^2.
struct SquareCounterexample {
  int n = 1;

  std::complex<double> value(double x, double y, double t) const;
  Eigen::Vector2cd gradient(double x, double y, double t) const;
  /// Closed form 1 + n^2.
  double energy() const { return 1.0 + static_cast<double>(n) * n; }
  /// Closed form T / pi on the edge x = 2 pi.
  double right_edge_observability(double T) const;
};

struct SquareCounterexampleResult {
  int n = 1;
  double T = 0.0;
  double energy = 0.0;
  double right_edge_observability = 0.0;
  double ratio = 0.0;  ///< observability / energy = T / (pi (1 + n^2))
  // quadrature cross-checks (NaN when skipped)
  double energy_quadrature = 0.0;
  double observability_quadrature = 0.0;
  double l2_norm_quadrature = 0.0;
};

/// Throws InvalidInput unless n >= 1 and T >= 0.
SquareCounterexampleResult square_counterexample(int n, double T, bool with_quadrature = true);

/// sin(m x) sin(k y) - sin(k x) sin(m y) on {0 < y < x < pi}, eigenvalue m^2 + k^2.
class TriangleEigenmode {
 public:
  TriangleEigenmode(int m, int k);

  int m() const { return m_; }
  int k() const { return k_; }
  double eigenvalue() const { return static_cast<double>(m_) * m_ + static_cast<double>(k_) * k_; }

  double value(double x, double y) const;
  Eigen::Vector2d gradient(double x, double y) const;
  Eigen::Matrix2d hessian(double x, double y) const;

  double value(const Eigen::VectorXd& p) const { return value(p(0), p(1)); }

 private:
  int m_;
  int k_;
};

/// Throws InvalidInput unless m > k >= 1.
TriangleEigenmode triangle_mode(int m, int k);

/// The `count` lowest modes, ascending in eigenvalue (ties by m).
std::vector<TriangleEigenmode> lowest_triangle_modes(int count);

/// int_edge (d_nu phi_a)(d_nu phi_b) ds on edge j of the half-square triangle,
/// edges numbered as the faces of shapes::half_square_pi (edge j opposite vertex j).
double edge_quadrature_oracle(const TriangleEigenmode& a, const TriangleEigenmode& b, int edge);

/// The same integral times int_0^T exp(-i (lambda_a - lambda_b) t) dt.
std::complex<double> edge_quadrature_oracle(const TriangleEigenmode& a, const TriangleEigenmode& b, int edge,
                                            double T);

/// sum over edges of int (x . nu) (d_nu phi)^2 ds.
double rellich_boundary_sum(const TriangleEigenmode& phi);

/// int over the triangle of phi_a phi_b.
double triangle_inner_product(const TriangleEigenmode& a, const TriangleEigenmode& b);

}  // namespace obs::exact
