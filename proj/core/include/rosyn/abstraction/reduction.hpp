#pragma once

#include <Eigen/Dense>

#include "rosyn/model/linear_model.hpp"

namespace rosyn::abstraction {

/// Reduced-order model x1(t+1) = A1 x1 + B1 u1 + Bw1 w, y1 = C1 x1, together
/// with the map P from reduced to full coordinates.
struct ReducedModel {
  Eigen::MatrixXd A1;
  Eigen::MatrixXd B1;
  Eigen::MatrixXd Bw1;
  Eigen::MatrixXd C1;
  Eigen::MatrixXd P;
  /// Hankel singular values of the full closed loop, descending.
  Eigen::VectorXd hankel_singular_values;

  Eigen::Index order() const { return A1.rows(); }
};

/// Square-root balanced truncation of the closed loop (A + B K, [B Bw], C).
///
/// The controllability Gramian uses the stacked input [B Bw]. The reduced
/// matrices act on the closed-loop system, so A1 is the reduced closed-loop
/// matrix. Throws NumericError for an unstable closed loop or a singular
/// retained Gramian factor, and Error when order >= n (order == n is allowed
/// and yields an exact similarity transform).
ReducedModel balanced_truncation(const model::LinearGaussianModel& model, const Eigen::MatrixXd& K_fb,
                                 Eigen::Index order);

/// Changes reduced coordinates by x1 -> C1 x1 so that C1 becomes the identity.
/// Requires C1 square and invertible.
ReducedModel to_output_coordinates(const ReducedModel& red);

}  // namespace rosyn::abstraction
