#include "obs/dynamics.hpp"

#include "obs/errors.hpp"
#include "obs/mesh.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace obs::dynamics {

using cplx = std::complex<double>;

SpectralState::SpectralState(std::shared_ptr<const fem::EigenBasis> basis, Eigen::VectorXcd coefficients,
                             double time)
    : basis_(std::move(basis)), anchor_(std::move(coefficients)), anchor_time_(time), time_(time) {
  if (!basis_) throw InvalidInput("spectral state needs a basis");
  if (anchor_.size() != basis_->count()) throw InvalidInput("coefficient vector length does not match the basis");
}

Eigen::VectorXcd SpectralState::coefficients() const {
  const double elapsed = time_ - anchor_time_;
  if (elapsed == 0.0) return anchor_;
  Eigen::VectorXcd c(anchor_.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = anchor_(k) * std::polar(1.0, -basis_->eigenvalues(k) * elapsed);
  return c;
}

SpectralState SpectralState::advanced(double dt) const {
  SpectralState next = *this;
  next.time_ += dt;
  return next;
}

SpectralState evolve(const SpectralState& s, double t) { return s.advanced(t); }

double energy(const SpectralState& s) { return fem::h1_energy(s.coefficients(), s.basis()); }

Eigen::VectorXcd random_smooth_coefficients(const fem::EigenBasis& basis, int modes, std::uint64_t seed) {
  if (modes < 1 || modes > basis.count()) throw InvalidInput("random data mode count outside the basis");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.count());
  const double lambda1 = basis.eigenvalues(0);
  for (int k = 0; k < modes; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    c(k) = cplx(re, im) * (lambda1 / basis.eigenvalues(k));
  }
  return c / c.norm();
}

Eigen::MatrixXd face_gram(const fem::EigenBasis& basis, const fem::AssembledSystem& sys, int face,
                          kernels::Exec exec) {
  const auto& m = *sys.mesh;
  const Eigen::MatrixXd traces = fem::neumann_traces(sys.to_vertices(basis.vectors), m, face, exec);
  const auto facets = mesh::facets_of_face(m, face);
  Eigen::VectorXd area(static_cast<Eigen::Index>(facets.size()));
  for (std::size_t i = 0; i < facets.size(); ++i) area(static_cast<Eigen::Index>(i)) = facets[i].area;
  return kernels::weighted_gram(traces, area, exec);
}

Eigen::MatrixXd moment_gram(const fem::EigenBasis& basis, const fem::AssembledSystem& sys,
                            const Eigen::VectorXd& origin, kernels::Exec exec) {
  const auto& domain = sys.mesh->domain();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(basis.count(), basis.count());
  for (const auto& f : geometry::faces(domain)) {
    // (x - origin) . omega is constant on a flat face
    const double weight = (f.centroid - origin).dot(f.normal);
    if (std::abs(weight) <= 1e-14 * domain.max_edge_length()) continue;
    W += weight * face_gram(basis, sys, f.index, exec);
  }
  return W;
}

std::complex<double> observability_pair_sum(const SpectralState& s, const Eigen::MatrixXd& G, double T,
                                            kernels::Exec exec) {
  if (T < 0) throw InvalidInput("observation time must be non-negative");
  if (G.rows() != s.basis().count() || G.cols() != s.basis().count())
    throw InvalidInput("Gram matrix does not match the basis");
  return kernels::pair_sum(s.coefficients(), G, s.basis().eigenvalues, T, exec);
}

double observability_integral(const SpectralState& s, const Eigen::MatrixXd& G, double T, kernels::Exec exec) {
  const cplx N = observability_pair_sum(s, G, T, exec);
  if (std::abs(N.imag()) > 1e-10 * std::max(std::abs(N.real()), 1e-300)) {
    std::ostringstream msg;
    msg << "observability pair sum has imaginary residue " << N.imag() << " against " << N.real();
    throw Error(msg.str());
  }
  return N.real();
}

double observability_constant(const geometry::Simplex& s, int face) {
  return 2.0 * geometry::face(s, face).volume / (s.dim() * geometry::volume(s));
}

double predicted_rate(const geometry::Simplex& s, int face, double E0) { return observability_constant(s, face) * E0; }

double default_t0(const fem::EigenBasis& basis) { return 2.0 * std::numbers::pi / basis.eigenvalues(0); }

std::vector<double> geometric_grid(double t0, int points, double ratio) {
  if (!(t0 > 0.0) || points < 1 || !(ratio > 1.0)) throw InvalidInput("invalid geometric time grid");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  double t = t0;
  for (int i = 0; i < points; ++i, t *= ratio) grid.push_back(t);
  return grid;
}

ObservabilityReport remainder_scan(const SpectralState& s, const geometry::Simplex& simplex,
                                   const Eigen::MatrixXd& G, int face, const std::vector<double>& T_grid, int window,
                                   kernels::Exec exec) {
  ObservabilityReport r;
  r.face = face;
  r.energy = energy(s);
  const Eigen::VectorXcd c = s.coefficients();
  r.l2_norm_sq = c.squaredNorm();
  if (!(r.energy > 0.0)) throw InvalidInput("asymptotic undefined for zero solution");
  if (window < 1) throw InvalidInput("envelope window must be positive");
  r.rate = predicted_rate(simplex, face, r.energy);

  const Eigen::VectorXd& lambda = s.basis().eigenvalues;
  const double resonance = 1e-9 * lambda.cwiseAbs().maxCoeff();
  cplx resonant{0.0, 0.0};
  for (Eigen::Index k = 0; k < c.size(); ++k)
    for (Eigen::Index l = 0; l < c.size(); ++l)
      if (std::abs(lambda(k) - lambda(l)) <= resonance) resonant += c(k) * std::conj(c(l)) * G(k, l);
  r.long_time_ratio = resonant.real() / r.rate;

  r.lower_bound_ratio = std::numeric_limits<double>::infinity();
  for (double T : T_grid) {
    const double N = observability_integral(s, G, T, exec);
    const double P = r.rate * T;
    r.T.push_back(T);
    r.N.push_back(N);
    r.P.push_back(P);
    r.ratio.push_back(N / P);
    r.remainder.push_back(N / P - 1.0);
    r.sup_T_R = std::max(r.sup_T_R, T * std::abs(N / P - 1.0));
    r.lower_bound_ratio = std::min(r.lower_bound_ratio, N / r.l2_norm_sq);
  }

  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.T.size(); ++i) {
    const std::size_t from = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double env = 0.0;
    for (std::size_t k = from; k <= i; ++k) env = std::max(env, std::abs(r.remainder[k]));
    r.envelope.push_back(env);
    if (i + 1 >= static_cast<std::size_t>(window) && env > 0.0) {
      x.push_back(std::log(r.T[i]));
      y.push_back(std::log(env));
    }
  }
  if (x.size() >= 2) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    r.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

ObservabilityReport remainder_scan(const SpectralState& s, const fem::AssembledSystem& sys, int face,
                                   const std::vector<double>& T_grid, int window, kernels::Exec exec) {
  const Eigen::MatrixXd G = face_gram(s.basis(), sys, face, exec);
  return remainder_scan(s, sys.mesh->domain(), G, face, T_grid, window, exec);
}

CommutatorOperators commutator_operators(const fem::EigenBasis& basis, const fem::AssembledSystem& sys,
                                         kernels::Exec exec) {
  const auto& m = *sys.mesh;
  const Eigen::VectorXd origin = m.domain().vertex(0);
  CommutatorOperators ops;
  ops.boundary = moment_gram(basis, sys, origin, exec);
  const Eigen::MatrixXd phi = sys.to_vertices(basis.vectors);
  const Eigen::MatrixXd Xphi = kernels::radial_derivative(m, phi, origin, exec);
  ops.volume = Xphi.transpose() * (sys.M_full * phi);
  return ops;
}

CommutatorIdentity commutator_identity(const SpectralState& s, const CommutatorOperators& ops, double T,
                                       kernels::Exec exec) {
  const double E0 = energy(s);
  if (!(E0 > 0.0)) throw InvalidInput("flux identity undefined for zero solution");
  const cplx i{0.0, 1.0};
  auto volume_at = [&](const SpectralState& at) {
    const Eigen::VectorXcd c = at.coefficients();
    return i * (c.transpose() * ops.volume.cast<cplx>() * c.conjugate())(0, 0);
  };
  CommutatorIdentity id;
  id.boundary = observability_pair_sum(s, ops.boundary, T, exec);
  id.energy_term = 2.0 * T * E0;
  id.volume_term = volume_at(s.advanced(T)) - volume_at(s);
  id.residual = T > 0.0 ? std::abs(id.boundary - id.energy_term - id.volume_term) / id.energy_term : 0.0;
  return id;
}

double commutator_identity_residual(const SpectralState& s, const fem::AssembledSystem& sys, double T,
                                    kernels::Exec exec) {
  if (!(energy(s) > 0.0)) throw InvalidInput("flux identity undefined for zero solution");
  return commutator_identity(s, commutator_operators(s.basis(), sys, exec), T, exec).residual;
}

PoincareResult poincare_check(const mesh::SimplicialMesh& m, const Eigen::VectorXcd& v) {
  if (v.size() != m.vertex_count()) throw InvalidInput("Poincare input must have one value per vertex");
  const int n = m.dim();
  const double mf = geometry::factorial(n) / geometry::factorial(n + 2);
  double mass = 0.0;
  double dx = 0.0;
  for (int c = 0; c < m.cell_count(); ++c) {
    const auto g = kernels::cell_geometry(m, c);
    const auto cv = m.cell(c);
    cplx d1{0.0, 0.0};
    for (int a = 0; a <= n; ++a) {
      d1 += g.gradients(0, a) * v(cv[a]);
      for (int b = 0; b <= n; ++b)
        mass += g.volume * mf * (a == b ? 2.0 : 1.0) * (std::conj(v(cv[a])) * v(cv[b])).real();
    }
    dx += g.volume * std::norm(d1);
  }
  PoincareResult r;
  r.lhs = std::sqrt(std::max(0.0, mass));
  r.rhs = geometry::longest_edge(m.domain()) * std::sqrt(std::numbers::e - 1.0) * std::sqrt(dx);
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-10);
  return r;
}

}  // namespace obs::dynamics
