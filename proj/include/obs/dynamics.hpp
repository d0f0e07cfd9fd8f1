#pragma once

#include "obs/fem.hpp"
#include "obs/geometry.hpp"
#include "obs/kernels.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace obs::dynamics {

/// Solution of i u_t + Delta u = 0 in a discrete Dirichlet eigenbasis.
///
/// The state keeps the coefficients at an anchor time and the elapsed time;
/// the current coefficients are anchor_k * exp(-i lambda_k (t - t_anchor)).
/// Repeated evolution therefore never compounds phase rounding, and |c_k| is
/// reproduced to one rounding at any time.
class SpectralState {
 public:
  SpectralState(std::shared_ptr<const fem::EigenBasis> basis, Eigen::VectorXcd coefficients, double time = 0.0);

  const fem::EigenBasis& basis() const { return *basis_; }
  const std::shared_ptr<const fem::EigenBasis>& basis_ptr() const { return basis_; }
  double time() const { return time_; }
  Eigen::VectorXcd coefficients() const;
  double norm() const { return coefficients().norm(); }

  /// The same solution observed `dt` later.
  SpectralState advanced(double dt) const;

 private:
  std::shared_ptr<const fem::EigenBasis> basis_;
  Eigen::VectorXcd anchor_;
  double anchor_time_;
  double time_;
};

SpectralState evolve(const SpectralState& s, double t);

/// sum_k lambda_k |c_k|^2
double energy(const SpectralState& s);

/// Complex Gaussian coefficients on the lowest `modes` modes with variance
/// proportional to lambda_k^{-2}, scaled to unit L2 norm.
Eigen::VectorXcd random_smooth_coefficients(const fem::EigenBasis& basis, int modes, std::uint64_t seed);

/// G_kl = int_{G_j} (d_omega phi_k)(d_omega phi_l) dS from P1 traces.
Eigen::MatrixXd face_gram(const fem::EigenBasis& basis, const fem::AssembledSystem& sys, int face,
                          kernels::Exec exec = kernels::Exec::parallel);

/// sum_j ((x - origin) . omega_j) G^{(j)}: the boundary form of X = (x - origin) . grad.
Eigen::MatrixXd moment_gram(const fem::EigenBasis& basis, const fem::AssembledSystem& sys,
                            const Eigen::VectorXd& origin, kernels::Exec exec = kernels::Exec::parallel);

/// sum_{k,l} c_k conj(c_l) G_kl int_0^T exp(-i (lambda_k - lambda_l) t) dt, with c taken at the state's time.
std::complex<double> observability_pair_sum(const SpectralState& s, const Eigen::MatrixXd& G, double T,
                                            kernels::Exec exec = kernels::Exec::parallel);

/// Real part of the pair sum; throws if the imaginary residue exceeds 1e-10 |N|.
double observability_integral(const SpectralState& s, const Eigen::MatrixXd& G, double T,
                              kernels::Exec exec = kernels::Exec::parallel);

/// 2 Vol_{n-1}(G_j) / (n Vol_n); equals 2 / altitude_j for triangles.
double observability_constant(const geometry::Simplex& s, int face);

/// Leading growth rate of the Neumann mass on face j for energy E0.
double predicted_rate(const geometry::Simplex& s, int face, double E0);

/// 2 pi / lambda_1: one period of the slowest mode.
double default_t0(const fem::EigenBasis& basis);

/// t0 * ratio^i for i = 0 .. points-1.
std::vector<double> geometric_grid(double t0, int points, double ratio = 2.0);

struct ObservabilityReport {
  int face = 0;
  std::vector<double> T;
  std::vector<double> N;          ///< Neumann mass on face j over [0, T]
  std::vector<double> P;          ///< predicted rate * T
  std::vector<double> ratio;      ///< N / P
  std::vector<double> remainder;  ///< ratio - 1
  std::vector<double> envelope;   ///< trailing-window max of |remainder|
  double energy = 0.0;
  double l2_norm_sq = 0.0;
  double rate = 0.0;
  double sup_T_R = 0.0;           ///< max over the grid of T |R(T)|
  double slope = 0.0;             ///< least-squares slope of log envelope against log T
  double lower_bound_ratio = 0.0; ///< min over the grid of N / ||u0||^2
  double long_time_ratio = 0.0;   ///< lim N / P as T grows (resonant part of the pair sum)
  std::optional<double> commutator_residual;
};

inline constexpr int kEnvelopeWindow = 4;

/// Throws InvalidInput for the zero solution, for which the asymptotic is undefined.
ObservabilityReport remainder_scan(const SpectralState& s, const geometry::Simplex& simplex,
                                   const Eigen::MatrixXd& face_gram_matrix, int face, const std::vector<double>& T_grid,
                                   int window = kEnvelopeWindow, kernels::Exec exec = kernels::Exec::parallel);

ObservabilityReport remainder_scan(const SpectralState& s, const fem::AssembledSystem& sys, int face,
                                   const std::vector<double>& T_grid, int window = kEnvelopeWindow,
                                   kernels::Exec exec = kernels::Exec::parallel);

/// Both sides of the flux identity
///   int_0^T int_{dOmega} (Xu)(d_nu conj u) = 2 T E(0) + [int_Omega i (Xu) conj u]_0^T
/// for X = (x - p0) . grad.
struct CommutatorIdentity {
  std::complex<double> boundary;  ///< left side
  double energy_term = 0.0;       ///< 2 T E(0)
  std::complex<double> volume_term;
  double residual = 0.0;          ///< |left - right| / (2 T E(0))
};

/// Precomputed modal matrices for repeated identity evaluations.
struct CommutatorOperators {
  Eigen::MatrixXd boundary;  ///< moment_gram about p0
  Eigen::MatrixXd volume;    ///< V_kl = (X phi_k)^T M_full phi_l
};

CommutatorOperators commutator_operators(const fem::EigenBasis& basis, const fem::AssembledSystem& sys,
                                         kernels::Exec exec = kernels::Exec::parallel);

CommutatorIdentity commutator_identity(const SpectralState& s, const CommutatorOperators& ops, double T,
                                       kernels::Exec exec = kernels::Exec::parallel);

/// Relative residual of the flux identity; throws InvalidInput for the zero state.
double commutator_identity_residual(const SpectralState& s, const fem::AssembledSystem& sys, double T,
                                    kernels::Exec exec = kernels::Exec::parallel);

/// (M + i dt/2 K) u^{n+1} = (M - i dt/2 K) u^n on the interior DOFs.
Eigen::VectorXcd crank_nicolson_evolve(const fem::AssembledSystem& sys, const Eigen::VectorXcd& u0, double dt,
                                       int steps);

struct PoincareResult {
  double lhs = 0.0;  ///< ||v||_{L2}
  double rhs = 0.0;  ///< L sqrt(e - 1) ||d_{x1} v||_{L2}
  bool pass = true;
};

/// x_1-Poincare bound for a P1 function given on all vertices (zero on the boundary).
PoincareResult poincare_check(const mesh::SimplicialMesh& m, const Eigen::VectorXcd& vertex_values);

}  // namespace obs::dynamics
