#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

#include "obs/errors.hpp"
#include "obs/exact.hpp"
#include "obs/fem.hpp"
#include "obs/kernels.hpp"
#include "obs/shapes.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

using namespace obs;

namespace {

mesh::MeshPtr make_mesh(const geometry::Simplex& s, int level) {
  return std::make_shared<const mesh::SimplicialMesh>(mesh::uniform_mesh(s, level));
}

geometry::Simplex triangle(double x0, double y0, double x1, double y1, double x2, double y2) {
  return geometry::Simplex({Eigen::Vector2d(x0, y0), Eigen::Vector2d(x1, y1), Eigen::Vector2d(x2, y2)});
}

// Value at x of the P1 function with the given vertex values, found by locating the cell.
double p1_value(const mesh::SimplicialMesh& m, const Eigen::VectorXd& values, const Eigen::VectorXd& x) {
  for (int c = 0; c < m.cell_count(); ++c) {
    std::vector<Eigen::VectorXd> pts;
    for (int v : m.cell(c)) pts.push_back(m.vertex(v));
    const Eigen::VectorXd lam = geometry::Simplex(pts).barycentric(x);
    if (lam.minCoeff() >= -1e-12) {
      double sum = 0.0;
      int a = 0;
      for (int v : m.cell(c)) sum += lam(a++) * values(v);
      return sum;
    }
  }
  return std::nan("");
}

}  // namespace

TEST_CASE("element mass matrices match barycentric quadrature") {
  const auto tri = triangle(0.3, -0.2, 1.7, 0.4, 0.1, 1.9);
  const auto m2 = mesh::base_mesh(tri);
  const auto e2 = kernels::element_matrices(m2, Eigen::MatrixXd(), 1.0);
  const Eigen::Matrix3d ref2 = oracle::triangle_mass_by_quadrature(geometry::volume(tri));
  const double S = geometry::volume(tri);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      CHECK(e2.mass[static_cast<std::size_t>(3 * a + b)] == doctest::Approx(ref2(a, b)).epsilon(1e-14));
      CHECK(e2.mass[static_cast<std::size_t>(3 * a + b)] == doctest::Approx(S / 12.0 * (a == b ? 2.0 : 1.0)).epsilon(1e-14));
    }

  const auto tet = shapes::random_simplex(3, 5);
  const auto m3 = mesh::base_mesh(tet);
  const auto e3 = kernels::element_matrices(m3, Eigen::MatrixXd(), 1.0);
  const Eigen::Matrix4d ref3 = oracle::tet_mass_by_quadrature(geometry::volume(tet));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(e3.mass[static_cast<std::size_t>(4 * a + b)] == doctest::Approx(ref3(a, b)).epsilon(1e-12));
}

TEST_CASE("unit right triangle stiffness") {
  const auto m = mesh::base_mesh(shapes::standard(2));
  const auto e = kernels::element_matrices(m, Eigen::MatrixXd(), 1.0);
  const double ref[9] = {1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5};
  for (int i = 0; i < 9; ++i) CHECK(std::abs(e.stiffness[static_cast<std::size_t>(i)] - ref[i]) < 1e-15);
}

TEST_CASE("stiffness gradients agree with finite differences of the barycentric map") {
  const auto m = mesh::base_mesh(shapes::random_simplex(3, 17));
  std::vector<Eigen::VectorXd> pts;
  for (int v : m.cell(0)) pts.push_back(m.vertex(v));
  const geometry::Simplex cell(pts);
  const auto g = kernels::cell_geometry(m, 0);
  CHECK(g.volume == doctest::Approx(geometry::volume(cell)).epsilon(1e-14));
  for (int a = 0; a <= 3; ++a) {
    const auto fd = oracle::fd_gradient([&](const Eigen::VectorXd& x) { return cell.barycentric(x)(a); },
                                        pts[0] + 0.25 * (pts[1] - pts[0]) + 0.25 * (pts[2] - pts[0]));
    CHECK((g.gradients.col(a) - fd).norm() < 1e-7 * fd.norm() + 1e-9);
  }
}

TEST_CASE("assembled matrices") {
  for (int n : {2, 3}) {
    const auto m = make_mesh(shapes::random_simplex(n, 3), n == 2 ? 4 : 2);
    const auto sys = fem::assemble(m);
    const Eigen::MatrixXd K = sys.K, M = sys.M, Kf = sys.K_full, Mf = sys.M_full;
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * K.cwiseAbs().maxCoeff());
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * M.cwiseAbs().maxCoeff());
    CHECK((Kf * Eigen::VectorXd::Ones(Kf.cols())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(Mf.sum() == doctest::Approx(geometry::volume(m->domain())).epsilon(1e-12));
    CHECK(Eigen::LLT<Eigen::MatrixXd>(M).info() == Eigen::Success);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(K).info() == Eigen::Success);
    CHECK(sys.dofs() == static_cast<int>(mesh::interior_vertices(*m).size()));
  }
  CHECK_THROWS_WITH_AS(fem::assemble(make_mesh(shapes::standard(2), 1)), doctest::Contains("mesh too coarse"),
                       MeshError);
}

TEST_CASE("eigenpairs on the half-square triangle approach m^2 + k^2") {
  double prev1 = 1e9, prev2 = 1e9;
  for (int level : {3, 4, 5, 6}) {
    const auto sys = fem::assemble(make_mesh(shapes::half_square_pi(), level));
    const auto b = fem::solve_eigen(sys, 6);
    const double e1 = std::abs(b.eigenvalues(0) - 5.0), e2 = std::abs(b.eigenvalues(1) - 10.0);
    CHECK(e1 < prev1);
    CHECK(e2 < prev2);
    prev1 = e1;
    prev2 = e2;
    const Eigen::MatrixXd G = b.vectors.transpose() * sys.M * b.vectors;
    CHECK((G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(b.residuals.maxCoeff() < 1e-9);
    CHECK(b.eigenvalues(0) > 0.0);
    for (int k = 1; k < 6; ++k) CHECK(b.eigenvalues(k) >= b.eigenvalues(k - 1));
  }
  CHECK(prev1 / 5.0 < 2e-3);
}

TEST_CASE("dense and shift-invert solvers agree") {
  const auto sys = fem::assemble(make_mesh(shapes::half_square_pi(), 5));
  const auto d = fem::solve_eigen(sys, 12, fem::EigenMethod::dense);
  const auto l = fem::solve_eigen(sys, 12, fem::EigenMethod::shift_invert);
  CHECK(d.method == fem::EigenMethod::dense);
  CHECK(l.method == fem::EigenMethod::shift_invert);
  for (int k = 0; k < 12; ++k) CHECK(l.eigenvalues(k) == doctest::Approx(d.eigenvalues(k)).epsilon(1e-10));
  // nondegenerate modes agree up to the canonical sign
  CHECK((d.vectors.col(0) - l.vectors.col(0)).norm() < 1e-8);

  const auto sys3 = fem::assemble(make_mesh(shapes::random_simplex(3, 2), 3));
  const auto d3 = fem::solve_eigen(sys3, 5, fem::EigenMethod::dense);
  const auto l3 = fem::solve_eigen(sys3, 5, fem::EigenMethod::shift_invert);
  for (int k = 0; k < 5; ++k) CHECK(l3.eigenvalues(k) == doctest::Approx(d3.eigenvalues(k)).epsilon(1e-10));
}

TEST_CASE("eigenvalues scale with the inverse square of the size") {
  const auto s = shapes::random_simplex(2, 4);
  const auto a = fem::solve_eigen(fem::assemble(make_mesh(s, 4)), 5);
  const auto b = fem::solve_eigen(fem::assemble(make_mesh(s.transformed(2.0, Eigen::Vector2d(1.0, -3.0)), 4)), 5);
  for (int k = 0; k < 5; ++k) CHECK(b.eigenvalues(k) == doctest::Approx(a.eigenvalues(k) / 4.0).epsilon(1e-10));
}

TEST_CASE("bad mode counts are rejected") {
  const auto sys = fem::assemble(make_mesh(shapes::standard(2), 2));
  CHECK_THROWS_AS(fem::solve_eigen(sys, 4), InvalidInput);
  CHECK_THROWS_AS(fem::solve_eigen(sys, 0), InvalidInput);
  CHECK(fem::default_mode_count(fem::assemble(make_mesh(shapes::standard(2), 3))) == 5);
  CHECK(fem::default_mode_count(fem::assemble(make_mesh(shapes::standard(2), 7))) == 64);
}

TEST_CASE("Neumann traces of the first mode converge to the analytic normal derivative") {
  const auto phi = exact::triangle_mode(2, 1);
  const double norm = std::sqrt(exact::triangle_inner_product(phi, phi));
  double prev = 1e9;
  for (int level : {3, 4, 5, 6}) {
    const auto sys = fem::assemble(make_mesh(shapes::half_square_pi(), level));
    const auto b = fem::solve_eigen(sys, 1);
    const Eigen::VectorXd v = sys.to_vertices(Eigen::MatrixXd(b.vectors)).col(0);
    // align sign with the analytic mode
    double dot = 0.0;
    for (int d = 0; d < sys.dofs(); ++d) dot += b.vectors(d, 0) * phi.value(sys.mesh->vertex(sys.vertex_of_dof[d]));
    const double sign = dot >= 0 ? 1.0 : -1.0;
    double err = 0.0, scale = 0.0;
    for (int edge = 0; edge < 3; ++edge) {
      const auto t = fem::neumann_trace(v, *sys.mesh, edge);
      const auto facets = mesh::facets_of_face(*sys.mesh, edge);
      for (std::size_t i = 0; i < facets.size(); ++i) {
        Eigen::VectorXd mid = Eigen::VectorXd::Zero(2);
        for (int p : sys.mesh->facet(facets[i].facet)) mid += sys.mesh->vertex(p) / 2.0;
        const double exact = oracle::half_square_mode_normal_derivative(2, 1, edge, mid(0), mid(1)) / norm;
        err += facets[i].area * std::pow(sign * t(static_cast<Eigen::Index>(i)) - exact, 2);
        scale += facets[i].area * exact * exact;
      }
    }
    err = std::sqrt(err / scale);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("traces of zero and of a hat function") {
  const auto m = make_mesh(shapes::standard(2), 2);
  for (int j = 0; j < 3; ++j) CHECK(fem::neumann_trace(Eigen::VectorXd::Zero(m->vertex_count()), *m, j).cwiseAbs().maxCoeff() == 0.0);

  const auto interior = mesh::interior_vertices(*m);
  for (int v : interior) {
    Eigen::VectorXd hat = Eigen::VectorXd::Zero(m->vertex_count());
    hat(v) = 1.0;
    for (int j = 0; j < 3; ++j) {
      const auto info = geometry::face(m->domain(), j);
      const auto t = fem::neumann_trace(hat, *m, j);
      const auto facets = mesh::facets_of_face(*m, j);
      for (std::size_t i = 0; i < facets.size(); ++i) {
        Eigen::VectorXd mid = Eigen::VectorXd::Zero(2);
        for (int p : m->facet(facets[i].facet)) mid += m->vertex(p) / 2.0;
        const double h = 1e-6;
        const double fd = (p1_value(*m, hat, mid) - p1_value(*m, hat, mid - h * info.normal)) / h;
        CHECK(t(static_cast<Eigen::Index>(i)) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("projection onto the eigenbasis") {
  const auto sys = fem::assemble(make_mesh(shapes::random_simplex(2, 6), 3));
  const int n = sys.dofs();
  const auto full = fem::solve_eigen(sys, n);
  using cplx = std::complex<double>;

  const Eigen::VectorXcd c3 = fem::project(Eigen::VectorXcd(full.vectors.col(2).cast<cplx>()), sys, full);
  for (int k = 0; k < n; ++k) CHECK(std::abs(c3(k) - (k == 2 ? 1.0 : 0.0)) < 1e-12);

  const Eigen::VectorXcd u = 2.0 * full.vectors.col(0).cast<cplx>() + cplx(0, 1) * full.vectors.col(1).cast<cplx>();
  const Eigen::VectorXcd c = fem::project(u, sys, full);
  CHECK(std::abs(c(0) - 2.0) < 1e-12);
  CHECK(std::abs(c(1) - cplx(0, 1)) < 1e-12);
  for (int k = 2; k < n; ++k) CHECK(std::abs(c(k)) < 1e-12);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::VectorXcd r(n);
  for (int i = 0; i < n; ++i) r(i) = cplx(g(rng), g(rng));
  const Eigen::VectorXcd cr = fem::project(r, sys, full);
  CHECK((full.vectors.cast<cplx>() * cr - r).norm() < 1e-10);

  const auto sampled = fem::project(fem::Sampler([](const Eigen::VectorXd& x) { return cplx(x(0) * x(1), 0.0); }), sys, full);
  Eigen::VectorXcd direct(n);
  for (int d = 0; d < n; ++d) {
    const Eigen::VectorXd x = sys.mesh->vertex(sys.vertex_of_dof[d]);
    direct(d) = x(0) * x(1);
  }
  CHECK((sampled - fem::project(direct, sys, full)).norm() == 0.0);

  CHECK(fem::h1_energy(cr, full) == doctest::Approx(fem::quadratic_energy(r, sys.K)).epsilon(1e-12));
  CHECK(fem::h1_energy(Eigen::VectorXcd::Zero(n), full) == 0.0);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(k) = 1.0;
    CHECK(fem::h1_energy(e, full) == full.eigenvalues(k));
  }
}

TEST_CASE("metric assembly on the standard simplex reproduces the physical operator") {
  for (int n : {2, 3}) {
    const auto s = shapes::random_simplex(n, 30 + n);
    const auto a = geometry::normalize(s);
    const int level = n == 2 ? 3 : 2;
    const auto ref = fem::assemble_with_metric(make_mesh(shapes::standard(n), level), a.Gamma, std::abs(a.detA));
    const auto phys = fem::assemble(make_mesh(s, level));
    const int count = std::min(10, phys.dofs());
    const auto lr = fem::solve_eigen(ref, count, fem::EigenMethod::dense).eigenvalues;
    const auto lp = fem::solve_eigen(phys, count, fem::EigenMethod::dense).eigenvalues;
    for (int k = 0; k < count; ++k) CHECK(lr(k) == doctest::Approx(lp(k)).epsilon(1e-9));
  }
}
