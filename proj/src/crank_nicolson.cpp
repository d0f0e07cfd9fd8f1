#include "obs/dynamics.hpp"
#include "obs/errors.hpp"

#include <Eigen/SparseLU>

namespace obs::dynamics {

Eigen::VectorXcd crank_nicolson_evolve(const fem::AssembledSystem& sys, const Eigen::VectorXcd& u0, double dt,
                                       int steps) {
  if (!(dt > 0.0)) throw InvalidInput("Crank-Nicolson step must be positive");
  if (steps < 0) throw InvalidInput("step count must be non-negative");
  if (u0.size() != sys.dofs()) throw InvalidInput("initial vector must have one value per interior vertex");

  using CSparse = Eigen::SparseMatrix<std::complex<double>>;
  const std::complex<double> half_step{0.0, 0.5 * dt};
  const CSparse M = sys.M.cast<std::complex<double>>();
  const CSparse K = sys.K.cast<std::complex<double>>();
  CSparse implicit = M + half_step * K;
  const CSparse explicit_part = M - half_step * K;
  implicit.makeCompressed();

  Eigen::SparseLU<CSparse> lu;
  lu.compute(implicit);
  if (lu.info() != Eigen::Success) throw SolverError("Crank-Nicolson factorization failed");

  Eigen::VectorXcd u = u0;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXcd rhs = explicit_part * u;
    u = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SolverError("Crank-Nicolson solve failed");
  }
  return u;
}

}  // namespace obs::dynamics
