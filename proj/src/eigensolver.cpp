#include "obs/errors.hpp"
#include "obs/fem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace obs::fem {

namespace {

constexpr double kResidualTarget = 1e-9;
// Lanczos stops once every wanted Ritz pair is this accurate.
constexpr double kLanczosTolerance = 1e-11;

Eigen::VectorXd residual_norms(const AssembledSystem& sys, const Eigen::VectorXd& lambda, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd KX = sys.K * X;
  const Eigen::MatrixXd MX = sys.M * X;
  Eigen::VectorXd r(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    r(k) = (KX.col(k) - lambda(k) * MX.col(k)).norm() / (std::abs(lambda(k)) * MX.col(k).norm());
  return r;
}

// Fix the sign of each mode so that its largest-magnitude entry is positive.
void canonical_signs(Eigen::MatrixXd& X) {
  for (Eigen::Index k = 0; k < X.cols(); ++k) {
    Eigen::Index at = 0;
    X.col(k).cwiseAbs().maxCoeff(&at);
    if (X(at, k) < 0) X.col(k) *= -1.0;
  }
}

EigenBasis solve_dense(const AssembledSystem& sys, int count) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(sys.K), Eigen::MatrixXd(sys.M));
  if (eig.info() != Eigen::Success) throw SolverError("dense generalized eigensolve failed");
  EigenBasis out;
  out.method = EigenMethod::dense;
  out.eigenvalues = eig.eigenvalues().head(count);
  out.vectors = eig.eigenvectors().leftCols(count);
  return out;
}

// M-orthonormalize the columns of W against `basis` (first `used` columns) and
// among themselves; columns that vanish are replaced by random directions.
void m_orthonormalize(const SparseMatrix& M, const Eigen::MatrixXd& basis, Eigen::Index used, Eigen::MatrixXd& W,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double start = std::sqrt(std::max(0.0, W.col(j).dot(M * W.col(j))));
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) {
          const Eigen::VectorXd MW = M * W.col(j);
          W.col(j) -= basis.leftCols(used) * (basis.leftCols(used).transpose() * MW);
        }
        for (Eigen::Index i = 0; i < j; ++i) W.col(j) -= W.col(i) * W.col(i).dot(M * W.col(j));
      }
      const double norm = std::sqrt(std::max(0.0, W.col(j).dot(M * W.col(j))));
      if (norm > 1e-10 * start && norm > 0.0) {
        W.col(j) /= norm;
        break;
      }
      for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, j) = gauss(rng);
    }
  }
}

// Block Lanczos on K^{-1} M (shift sigma = 0) with full reorthogonalization in
// the M-inner product; Ritz pairs come from Rayleigh-Ritz with K.
EigenBasis solve_shift_invert(const AssembledSystem& sys, int count) {
  const Eigen::Index n = sys.dofs();
  Eigen::SimplicialLLT<SparseMatrix> factor(sys.K);
  if (factor.info() != Eigen::Success) throw SolverError("sparse Cholesky factorization of K failed");

  const Eigen::Index block = std::min<Eigen::Index>(4, n);
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(12 * count + 64, 200));
  std::mt19937_64 rng(0x5eed'0b5e'77a7'10dcULL);
  std::normal_distribution<double> gauss;

  Eigen::MatrixXd Q(n, cap);
  Eigen::MatrixXd KQ(n, cap);
  Eigen::Index used = 0;

  Eigen::MatrixXd W(n, block);
  for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = gauss(rng);

  Eigen::VectorXd lambda;
  Eigen::MatrixXd X;
  Eigen::VectorXd res;
  Eigen::Index next_check = std::min<Eigen::Index>(cap, count + 2 * block + 8);
  while (true) {
    const Eigen::Index take = std::min<Eigen::Index>(W.cols(), cap - used);
    Eigen::MatrixXd blockW = W.leftCols(take);
    m_orthonormalize(sys.M, Q, used, blockW, rng);
    Q.middleCols(used, take) = blockW;
    KQ.middleCols(used, take) = sys.K * blockW;
    used += take;

    if (used >= next_check || used == cap) {
      Eigen::MatrixXd H = Q.leftCols(used).transpose() * KQ.leftCols(used);
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
      if (eig.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz eigensolve failed");
      const Eigen::Index want = std::min<Eigen::Index>(count, used);
      lambda = eig.eigenvalues().head(want);
      X = Q.leftCols(used) * eig.eigenvectors().leftCols(want);
      res = residual_norms(sys, lambda, X);
      if (want == count && res.maxCoeff() < kLanczosTolerance) break;
      if (used == cap) {
        if (want == count && res.maxCoeff() < kResidualTarget) break;
        std::ostringstream msg;
        msg << "shift-invert Lanczos did not converge: worst residual " << res.maxCoeff() << " after " << used
            << " vectors";
        throw SolverError(msg.str());
      }
      next_check = std::min<Eigen::Index>(cap, used + std::max<Eigen::Index>(4 * block, used / 4));
    }
    Eigen::MatrixXd MW = sys.M * Q.middleCols(used - take, take);
    W = factor.solve(MW);
    if (factor.info() != Eigen::Success) throw SolverError("triangular solve with the Cholesky factor failed");
  }
  EigenBasis out;
  out.method = EigenMethod::shift_invert;
  out.eigenvalues = lambda;
  out.vectors = X;
  return out;
}

}  // namespace

int default_mode_count(const AssembledSystem& sys) {
  const int preferred = sys.mesh->dim() == 2 ? 64 : 32;
  return std::max(1, std::min(preferred, sys.dofs() / 4));
}

EigenBasis solve_eigen(const AssembledSystem& sys, int count, EigenMethod method) {
  if (count < 1) throw InvalidInput("mode count must be positive");
  if (count > sys.dofs()) {
    throw InvalidInput("requested " + std::to_string(count) + " modes but only " + std::to_string(sys.dofs()) +
                       " interior degrees of freedom exist");
  }
  if (method == EigenMethod::automatic)
    method = sys.dofs() <= kDenseLimit ? EigenMethod::dense : EigenMethod::shift_invert;

  EigenBasis out = method == EigenMethod::dense ? solve_dense(sys, count) : solve_shift_invert(sys, count);
  canonical_signs(out.vectors);
  out.residuals = residual_norms(sys, out.eigenvalues, out.vectors);
  if (out.residuals.maxCoeff() > kResidualTarget) {
    std::ostringstream msg;
    msg << "eigenpairs not converged: worst relative residual " << out.residuals.maxCoeff();
    throw SolverError(msg.str());
  }
  if (!(out.eigenvalues(0) > 0.0)) throw SolverError("lowest Dirichlet eigenvalue is not positive");
  return out;
}

}  // namespace obs::fem
