#include "rosyn/abstraction/lyapunov.hpp"

#include <algorithm>

#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"

namespace rosyn::abstraction {

double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S, const Eigen::MatrixXd& X) {
  const double scale = std::max(S.norm(), 1e-300);
  return (A * X * A.transpose() - X + S).norm() / scale;
}

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S) {
  if (A.rows() != A.cols() || S.rows() != S.cols() || A.rows() != S.rows()) {
    throw DimensionError("solve_discrete_lyapunov: A and S must be square and of equal size");
  }
  const double rho = spectral_radius(A);
  if (rho >= 1.0) {
    throw NumericError("solve_discrete_lyapunov: A is not Schur stable (spectral radius " + std::to_string(rho) +
                       ")");
  }
  Eigen::MatrixXd X = 0.5 * (S + S.transpose());
  Eigen::MatrixXd Ak = A;
  bool converged = false;
  for (int k = 0; k < 200; ++k) {
    const Eigen::MatrixXd increment = Ak * X * Ak.transpose();
    X += increment;
    Ak = Ak * Ak;
    if (increment.norm() <= 1e-17 * std::max(X.norm(), 1e-300) || Ak.norm() == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("solve_discrete_lyapunov: no convergence within 200 doublings");
  X = 0.5 * (X + X.transpose());
  if (S.norm() > 0.0 && lyapunov_residual(A, S, X) > 1e-10) {
    throw NumericError("solve_discrete_lyapunov: residual above 1e-10 (ill-conditioned problem)");
  }
  return X;
}

}  // namespace rosyn::abstraction
