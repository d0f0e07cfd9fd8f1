#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

#include "obs/dynamics.hpp"
#include "obs/errors.hpp"
#include "obs/exact.hpp"
#include "obs/shapes.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

using namespace obs;
using cplx = std::complex<double>;

namespace {

struct Fixture {
  fem::AssembledSystem sys;
  std::shared_ptr<const fem::EigenBasis> basis;
};

Fixture make_fixture(const geometry::Simplex& s, int level, int modes) {
  Fixture f{fem::assemble(std::make_shared<const mesh::SimplicialMesh>(mesh::uniform_mesh(s, level))), nullptr};
  f.basis = std::make_shared<const fem::EigenBasis>(fem::solve_eigen(f.sys, modes));
  return f;
}

const Fixture& half_square() {
  static const Fixture f = make_fixture(shapes::half_square_pi(), 6, 12);
  return f;
}

// A basis holding only eigenvalues, for synthetic Gram matrices.
std::shared_ptr<const fem::EigenBasis> synthetic_basis(std::initializer_list<double> lambda) {
  auto b = std::make_shared<fem::EigenBasis>();
  b->eigenvalues = Eigen::VectorXd(static_cast<Eigen::Index>(lambda.size()));
  Eigen::Index i = 0;
  for (double l : lambda) b->eigenvalues(i++) = l;
  b->vectors = Eigen::MatrixXd::Identity(b->eigenvalues.size(), b->eigenvalues.size());
  b->residuals = Eigen::VectorXd::Zero(b->eigenvalues.size());
  return b;
}

}  // namespace

TEST_CASE("evolution is a group and preserves norm and energy") {
  const auto& f = half_square();
  const auto c = dynamics::random_smooth_coefficients(*f.basis, 10, 7);
  CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 10; k < f.basis->count(); ++k) CHECK(c(k) == cplx(0.0, 0.0));

  const dynamics::SpectralState s(f.basis, c);
  const auto a = dynamics::evolve(dynamics::evolve(s, 0.37), 1.91);
  const auto b = dynamics::evolve(s, 0.37 + 1.91);
  CHECK((a.coefficients() - b.coefficients()).norm() < 1e-13);
  CHECK((dynamics::evolve(s, 0.0).coefficients() - c).norm() == 0.0);
  const auto back = dynamics::evolve(dynamics::evolve(s, 5.0), -5.0);
  CHECK((back.coefficients() - c).norm() < 1e-13);

  const double E = dynamics::energy(s);
  for (double t : {0.1, 10.0, 1e4}) {
    CHECK(dynamics::evolve(s, t).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dynamics::energy(dynamics::evolve(s, t)) == doctest::Approx(E).epsilon(1e-13));
  }
  CHECK(E == doctest::Approx(fem::h1_energy(c, *f.basis)).epsilon(1e-15));

  CHECK_THROWS_AS(dynamics::random_smooth_coefficients(*f.basis, 0, 1), InvalidInput);
  CHECK_THROWS_AS(dynamics::random_smooth_coefficients(*f.basis, 13, 1), InvalidInput);
  CHECK((dynamics::random_smooth_coefficients(*f.basis, 10, 7) - c).norm() == 0.0);
  CHECK((dynamics::random_smooth_coefficients(*f.basis, 10, 8) - c).norm() > 0.1);
}

TEST_CASE("face Gram matrices") {
  const auto& f = half_square();
  const int m = f.basis->count();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < 3; ++j) {
    const Eigen::MatrixXd G = dynamics::face_gram(*f.basis, f.sys, j);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff());
    CHECK(G.cwiseEqual(dynamics::face_gram(*f.basis, f.sys, j, kernels::Exec::serial)).all());
    total += geometry::face(f.sys.mesh->domain(), j).centroid.dot(geometry::face(f.sys.mesh->domain(), j).normal) * G;
  }

  // Rellich: sum_j (x . nu_j) int (d_nu phi)^2 = 2 lambda for an L2-normalized eigenfunction
  const Eigen::MatrixXd W = dynamics::moment_gram(*f.basis, f.sys, Eigen::Vector2d::Zero());
  CHECK((W - total).cwiseAbs().maxCoeff() < 1e-10 * W.cwiseAbs().maxCoeff());
  for (int k = 0; k < 4; ++k) CHECK(W(k, k) == doctest::Approx(2.0 * f.basis->eigenvalues(k)).epsilon(0.03));

  // nondegenerate analytic modes against the edge-integral oracle
  const auto phi = exact::triangle_mode(2, 1);
  const double norm_sq = exact::triangle_inner_product(phi, phi);
  for (int j = 0; j < 3; ++j) {
    const double G00 = dynamics::face_gram(*f.basis, f.sys, j)(0, 0);
    CHECK(G00 == doctest::Approx(exact::edge_quadrature_oracle(phi, phi, j) / norm_sq).epsilon(0.03));
  }
}

TEST_CASE("observability integral") {
  const auto& f = half_square();
  const Eigen::MatrixXd G = dynamics::face_gram(*f.basis, f.sys, 0);
  const dynamics::SpectralState s(f.basis, dynamics::random_smooth_coefficients(*f.basis, 8, 3));
  CHECK(dynamics::observability_integral(s, G, 0.0) == 0.0);
  CHECK_THROWS_AS(dynamics::observability_integral(s, G, -1.0), InvalidInput);
  CHECK_THROWS_AS(dynamics::observability_integral(s, Eigen::MatrixXd::Zero(2, 2), 1.0), InvalidInput);

  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(f.basis->count());
  e(2) = cplx(0.6, 0.8);
  const dynamics::SpectralState single(f.basis, e);
  CHECK(dynamics::observability_integral(single, G, 3.0) == doctest::Approx(3.0 * G(2, 2)).epsilon(1e-14));

  for (double T : {0.5, 2.0, 7.3}) {
    const cplx ref = oracle::pair_sum_by_time_quadrature(s.coefficients(), G, f.basis->eigenvalues, T, 40000);
    const cplx got = dynamics::observability_pair_sum(s, G, T);
    CHECK(std::abs(got - ref) < 1e-8 * std::abs(ref));
    CHECK(std::abs(got.imag()) < 1e-12 * std::abs(got.real()));
  }

  double prev = 0.0;
  for (double T = 0.1; T < 50.0; T *= 1.3) {
    const double N = dynamics::observability_integral(s, G, T);
    CHECK(N >= prev);
    prev = N;
  }

  // sin(x) sin(y) / pi on the square edge x = 2 pi: G = [[1/pi]]
  const auto square = synthetic_basis({2.0});
  Eigen::VectorXcd one(1);
  one(0) = 1.0;
  Eigen::MatrixXd Gs(1, 1);
  Gs(0, 0) = 1.0 / std::numbers::pi;
  for (double T : {1.0, 10.0, 100.0})
    CHECK(dynamics::observability_integral(dynamics::SpectralState(square, one), Gs, T) ==
          doctest::Approx(T / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("predicted rates") {
  CHECK(dynamics::observability_constant(shapes::standard(2), 0) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(dynamics::observability_constant(shapes::standard(2), 1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dynamics::observability_constant(shapes::standard(3), 1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dynamics::predicted_rate(shapes::standard(2), 0, 3.0) == doctest::Approx(6.0 * std::sqrt(2.0)).epsilon(1e-14));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = shapes::random_simplex(3, seed);
    double sum = 0.0;
    for (int j = 0; j <= 3; ++j) sum += dynamics::observability_constant(s, j) * geometry::vertex_height(s, j);
    CHECK(sum == doctest::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("time grids") {
  const auto g = dynamics::geometric_grid(0.5, 4, 2.0);
  REQUIRE(g.size() == 4);
  CHECK(g[3] == 4.0);
  CHECK_THROWS_AS(dynamics::geometric_grid(0.0, 4), InvalidInput);
  CHECK_THROWS_AS(dynamics::geometric_grid(1.0, 0), InvalidInput);
  CHECK_THROWS_AS(dynamics::geometric_grid(1.0, 3, 1.0), InvalidInput);
  CHECK(dynamics::default_t0(*half_square().basis) ==
        doctest::Approx(2.0 * std::numbers::pi / half_square().basis->eigenvalues(0)));
}

TEST_CASE("remainder scans") {
  const auto s2 = shapes::standard(2);
  const double rate_per_energy = dynamics::observability_constant(s2, 0);
  const auto grid = dynamics::geometric_grid(0.3, 12, 2.0);

  SUBCASE("a stationary state has a constant remainder") {
    const auto b = synthetic_basis({5.0});
    Eigen::VectorXcd c(1);
    c(0) = 1.0;
    Eigen::MatrixXd G(1, 1);
    G(0, 0) = 1.1 * rate_per_energy * 5.0;
    const auto r = dynamics::remainder_scan(dynamics::SpectralState(b, c), s2, G, 0, grid);
    for (double R : r.remainder) CHECK(R == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.long_time_ratio == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(r.lower_bound_ratio == doctest::Approx(G(0, 0) * 0.3).epsilon(1e-12));
  }

  SUBCASE("two modes decay like 1/T") {
    const auto b = synthetic_basis({5.0, 9.0});
    Eigen::VectorXcd c(2);
    c << cplx(0.8, 0.1), cplx(-0.2, 0.55);
    const double E = 5.0 * std::norm(c(0)) + 9.0 * std::norm(c(1));
    const double rate = rate_per_energy * E;
    Eigen::MatrixXd G(2, 2);
    G << 5.0 * rate_per_energy, 0.9, 0.9, 9.0 * rate_per_energy;
    const auto r = dynamics::remainder_scan(dynamics::SpectralState(b, c), s2, G, 0, grid);
    CHECK(r.rate == doctest::Approx(rate).epsilon(1e-14));
    const double bound = 4.0 * std::abs(c(0) * std::conj(c(1)) * G(0, 1)) / (4.0 * rate);
    for (std::size_t i = 0; i < r.T.size(); ++i) {
      const cplx ref = oracle::pair_sum_by_time_quadrature(c, G, b->eigenvalues, r.T[i], 20000);
      CHECK(r.N[i] == doctest::Approx(ref.real()).epsilon(1e-9));
      CHECK(r.T[i] * std::abs(r.remainder[i]) <= bound * (1.0 + 1e-12));
      CHECK(r.P[i] == doctest::Approx(rate * r.T[i]).epsilon(1e-14));
    }
    CHECK(r.sup_T_R <= bound * (1.0 + 1e-12));
    CHECK(r.slope < -0.5);
    CHECK(r.long_time_ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.envelope.size() == grid.size());
    for (std::size_t i = 0; i < r.T.size(); ++i) CHECK(r.envelope[i] >= std::abs(r.remainder[i]));
  }

  SUBCASE("the zero solution is rejected") {
    const auto& f = half_square();
    const dynamics::SpectralState zero(f.basis, Eigen::VectorXcd::Zero(f.basis->count()));
    CHECK_THROWS_WITH_AS(dynamics::remainder_scan(zero, f.sys, 0, grid), doctest::Contains("zero solution"),
                         InvalidInput);
    CHECK_THROWS_AS(dynamics::commutator_identity_residual(zero, f.sys, 1.0), InvalidInput);
  }

  SUBCASE("mesh-based scan matches the Gram-based one") {
    const auto& f = half_square();
    const dynamics::SpectralState s(f.basis, dynamics::random_smooth_coefficients(*f.basis, 6, 11));
    const auto a = dynamics::remainder_scan(s, f.sys, 1, grid);
    const auto b = dynamics::remainder_scan(s, f.sys.mesh->domain(), dynamics::face_gram(*f.basis, f.sys, 1), 1, grid);
    CHECK(a.N == b.N);
    CHECK(a.slope == b.slope);
  }
}

TEST_CASE("flux identity") {
  const auto& f = half_square();
  const dynamics::SpectralState s(f.basis, dynamics::random_smooth_coefficients(*f.basis, 6, 2));
  const auto ops = dynamics::commutator_operators(*f.basis, f.sys);
  const auto zero = dynamics::commutator_identity(s, ops, 0.0);
  CHECK(zero.residual == 0.0);
  CHECK(std::abs(zero.boundary) == 0.0);
  CHECK(std::abs(zero.volume_term) == 0.0);

  const double E = dynamics::energy(s);
  const auto id = dynamics::commutator_identity(s, ops, 5.0);
  CHECK(id.energy_term == doctest::Approx(10.0 * E).epsilon(1e-14));
  CHECK(id.residual < 0.1);
  CHECK(id.residual == doctest::Approx(dynamics::commutator_identity_residual(s, f.sys, 5.0)).epsilon(1e-12));
  CHECK(std::abs(id.boundary.imag()) < 1e-10 * std::abs(id.boundary));

  // the time-averaged defect vanishes for large T: volume term stays bounded
  const auto late = dynamics::commutator_identity(s, ops, 5000.0);
  CHECK(std::abs(late.volume_term) / late.energy_term < 1e-3);
}

TEST_CASE("Crank-Nicolson against spectral evolution") {
  const auto& f = half_square();
  const auto c = dynamics::random_smooth_coefficients(*f.basis, 6, 4);
  const Eigen::MatrixXcd Phi = f.basis->vectors.cast<cplx>();
  const Eigen::VectorXcd u0 = Phi * c;
  const Eigen::VectorXcd exact = Phi * dynamics::evolve(dynamics::SpectralState(f.basis, c), 1.0).coefficients();
  auto error = [&](int steps) {
    const Eigen::VectorXcd u = dynamics::crank_nicolson_evolve(f.sys, u0, 1.0 / steps, steps);
    const Eigen::VectorXcd d = u - exact;
    const double mass = std::sqrt(u.dot(f.sys.M.cast<cplx>() * u).real());
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-11));
    return std::sqrt(d.dot(f.sys.M.cast<cplx>() * d).real());
  };
  const double e1 = error(200), e2 = error(400);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK_THROWS_AS(dynamics::crank_nicolson_evolve(f.sys, u0, 0.0, 3), InvalidInput);
  CHECK_THROWS_AS(dynamics::crank_nicolson_evolve(f.sys, u0.head(3), 0.1, 3), InvalidInput);
}

TEST_CASE("x1-Poincare bound") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const auto m = mesh::uniform_mesh(shapes::random_simplex(2, 2), 3);
  const auto mask = mesh::boundary_vertex_mask(m);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXcd v(m.vertex_count());
    for (int i = 0; i < m.vertex_count(); ++i) v(i) = mask[static_cast<std::size_t>(i)] ? cplx(0, 0) : cplx(g(rng), g(rng));
    const auto r = dynamics::poincare_check(m, v);
    CHECK(r.pass);
    CHECK(r.lhs > 0.0);
    const auto doubled = dynamics::poincare_check(m, 2.0 * v);
    CHECK(doubled.lhs == doctest::Approx(2.0 * r.lhs).epsilon(1e-13));
    CHECK(doubled.rhs == doctest::Approx(2.0 * r.rhs).epsilon(1e-13));
  }
  CHECK_THROWS_AS(dynamics::poincare_check(m, Eigen::VectorXcd::Zero(3)), InvalidInput);
}

TEST_CASE("observability integrals add over faces") {
  const auto& f = half_square();
  const dynamics::SpectralState s(f.basis, dynamics::random_smooth_coefficients(*f.basis, 8, 9));
  Eigen::MatrixXd Gsum = Eigen::MatrixXd::Zero(f.basis->count(), f.basis->count());
  double Nsum = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Eigen::MatrixXd G = dynamics::face_gram(*f.basis, f.sys, j);
    Gsum += G;
    Nsum += dynamics::observability_integral(s, G, 4.0);
  }
  CHECK(dynamics::observability_integral(s, Gsum, 4.0) == doctest::Approx(Nsum).epsilon(1e-12));
}
