#pragma once

#include <Eigen/Dense>

namespace rosyn::model {

/// Concrete linear-Gaussian model
///   x(t+1) = A x(t) + B u(t) + Bw w(t),  y(t) = C x(t),  w(t) ~ N(0, I_d),
/// started from the deterministic state x0.
struct LinearGaussianModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Bw;
  Eigen::MatrixXd C;
  /// Abstract inputs are admissible when ||u1||^2 <= input_bound.
  double input_bound = 0.0;
  Eigen::VectorXd x0;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index noise_dim() const { return Bw.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }

  /// Throws DimensionError on inconsistent shapes, Error on d == 0 or c_u < 0.
  void validate() const;

  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;
};

/// y = C x; throws DimensionError on mismatch.
Eigen::VectorXd output(const LinearGaussianModel& model, const Eigen::VectorXd& x);

/// Euclidean output metric.
double output_distance(const Eigen::VectorXd& y1, const Eigen::VectorXd& y2);

}  // namespace rosyn::model
