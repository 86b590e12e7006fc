#include "rosyn/abstraction/reduction.hpp"

#include "rosyn/abstraction/lyapunov.hpp"
#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"

namespace rosyn::abstraction {

namespace {

// Factor L with L L^T = W for symmetric PSD W.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

ReducedModel balanced_truncation(const model::LinearGaussianModel& model, const Eigen::MatrixXd& K_fb,
                                 Eigen::Index order) {
  model.validate();
  const Eigen::Index n = model.state_dim();
  if (K_fb.rows() != model.input_dim() || K_fb.cols() != n) {
    throw DimensionError("balanced_truncation: feedback gain must be m x n");
  }
  if (order < 1 || order > n) throw Error("balanced_truncation: order must lie in [1, n]");

  const Eigen::MatrixXd Acl = model.A + model.B * K_fb;
  if (spectral_radius(Acl) >= 1.0) throw NumericError("balanced_truncation: closed loop A + B K is not stable");

  Eigen::MatrixXd Bstack(n, model.input_dim() + model.noise_dim());
  Bstack << model.B, model.Bw;
  const Eigen::MatrixXd Wc = solve_discrete_lyapunov(Acl, Bstack * Bstack.transpose());
  const Eigen::MatrixXd Wo = solve_discrete_lyapunov(Acl.transpose(), model.C.transpose() * model.C);

  const Eigen::MatrixXd Lc = psd_factor(Wc);
  const Eigen::MatrixXd Lo = psd_factor(Wo);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lo.transpose() * Lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double tol = std::max(sigma(0), 1e-300) * 1e-12;
  for (Eigen::Index i = 0; i < order; ++i) {
    if (sigma(i) <= tol) {
      throw NumericError("balanced_truncation: retained Hankel singular value is numerically zero");
    }
  }

  const Eigen::VectorXd s_inv_half = sigma.head(order).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd T = Lc * svd.matrixV().leftCols(order) * s_inv_half.asDiagonal();
  const Eigen::MatrixXd Ti = s_inv_half.asDiagonal() * svd.matrixU().leftCols(order).transpose() * Lo.transpose();

  ReducedModel red;
  red.A1 = Ti * Acl * T;
  red.B1 = Ti * model.B;
  red.Bw1 = Ti * model.Bw;
  red.C1 = model.C * T;
  red.P = T;
  red.hankel_singular_values = sigma;
  return red;
}

ReducedModel to_output_coordinates(const ReducedModel& red) {
  if (red.C1.rows() != red.C1.cols()) throw DimensionError("to_output_coordinates: C1 must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(red.C1);
  if (!lu.isInvertible()) throw NumericError("to_output_coordinates: C1 is singular");
  const Eigen::MatrixXd S = red.C1;
  const Eigen::MatrixXd Si = lu.inverse();
  ReducedModel out = red;
  out.A1 = S * red.A1 * Si;
  out.B1 = S * red.B1;
  out.Bw1 = S * red.Bw1;
  out.C1 = Eigen::MatrixXd::Identity(S.rows(), S.cols());
  out.P = red.P * Si;
  return out;
}

}  // namespace rosyn::abstraction
