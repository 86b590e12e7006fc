#pragma once

#include <Eigen/Dense>

namespace rosyn::abstraction {

/// Solves A X A^T - X + S = 0 for a Schur-stable A by squared Smith
/// doubling. Throws NumericError when rho(A) >= 1, when 200 doublings do not
/// converge, or when the relative residual exceeds 1e-10.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S);

/// ||A X A^T - X + S||_F / max(||S||_F, tiny).
double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S, const Eigen::MatrixXd& X);

}  // namespace rosyn::abstraction
