#include "rosyn/model/linear_model.hpp"

#include "rosyn/error.hpp"

namespace rosyn::model {

void LinearGaussianModel::validate() const {
  const auto n = A.rows();
  if (n == 0 || A.cols() != n) throw DimensionError("model: A must be square and non-empty");
  if (B.rows() != n) throw DimensionError("model: B must have as many rows as A");
  if (Bw.rows() != n) throw DimensionError("model: Bw must have as many rows as A");
  if (C.cols() != n) throw DimensionError("model: C must have as many columns as A has rows");
  if (x0.size() != n) throw DimensionError("model: initial state has wrong dimension");
  if (Bw.cols() < 1) throw Error("model: noise dimension must be at least 1");
  if (input_bound < 0.0) throw Error("model: input bound must be non-negative");
}

Eigen::VectorXd LinearGaussianModel::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& w) const {
  if (x.size() != A.rows() || u.size() != B.cols() || w.size() != Bw.cols()) {
    throw DimensionError("model: step argument dimension mismatch");
  }
  return A * x + B * u + Bw * w;
}

Eigen::VectorXd output(const LinearGaussianModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.C.cols()) throw DimensionError("output: state dimension mismatch");
  return model.C * x;
}

double output_distance(const Eigen::VectorXd& y1, const Eigen::VectorXd& y2) {
  if (y1.size() != y2.size()) throw DimensionError("output_distance: dimension mismatch");
  return (y1 - y2).norm();
}

}  // namespace rosyn::model
