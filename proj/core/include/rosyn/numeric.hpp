#pragma once

#include <Eigen/Dense>

namespace rosyn {

/// Standard normal cumulative distribution function.
double normal_cdf(double x);

/// Regularized lower incomplete gamma function P(a, x) for a > 0, x >= 0.
/// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi_square_cdf(int dof, double x);

/// Largest absolute eigenvalue of a square matrix.
double spectral_radius(const Eigen::MatrixXd& a);

/// Symmetric square root of a symmetric positive semidefinite matrix.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);

/// Inverse of the symmetric square root; throws NumericError when singular.
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m);

/// Moore-Penrose pseudoinverse via complete orthogonal decomposition.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a);

/// Induced 2-norm (largest singular value).
double operator_norm(const Eigen::MatrixXd& a);

struct WilsonInterval {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double half_width = 0.0;
};

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963984540054);

}  // namespace rosyn
