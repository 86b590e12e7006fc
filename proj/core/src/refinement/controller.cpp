#include <cmath>
#include <limits>

#include "rosyn/error.hpp"
#include "rosyn/refinement/refinement.hpp"

namespace rosyn::refinement {

Letter concrete_letter(const ClosedLoop& loop, const Eigen::VectorXd& x2) {
  return loop.labels.label_of(model::output(loop.concrete, x2));
}

RefinedController::RefinedController(const ClosedLoop& loop, const Eigen::VectorXd& x20, bool require_relation)
    : loop_(&loop) {
  const auto& Bw2 = loop.concrete.Bw;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Bw2);
  if (lu.rank() < Bw2.cols()) {
    throw Error("refinement: Bw2 does not have full column rank; noise cannot be reconstructed");
  }
  Bw2_pinv_ = pseudo_inverse(Bw2);
  const auto init = relation::initial_abstract_state(loop.certificate, loop.abstraction.grid, x20);
  if (require_relation && !init.feasible) {
    throw Error("refinement: initial state is not related to its abstract image (residual " +
                std::to_string(init.residual) + " > eps^2)");
  }
  cell_ = *init.cell;
  q_ = loop.dfa.step(loop.dfa.initial(), concrete_letter(loop, x20));
}

Eigen::VectorXd RefinedController::control(const Eigen::VectorXd& x2) {
  const auto& c = loop_->certificate;
  if (in_sink()) {
    fail_safe_ = true;
    return c.K * x2;
  }
  u1_ = loop_->policy.input(cell_, q_, k_);
  const Eigen::VectorXd& u1 = loop_->abstraction.inputs.at(u1_);
  const Eigen::VectorXd z = loop_->abstraction.representative(cell_);
  return c.R * u1 + c.Q * z + c.K * (x2 - c.P * z);
}

Eigen::VectorXd RefinedController::reconstruct_noise(const Eigen::VectorXd& x2_prev, const Eigen::VectorXd& u2,
                                                     const Eigen::VectorXd& x2_next) const {
  const auto& m = loop_->concrete;
  return Bw2_pinv_ * (x2_next - m.A * x2_prev - m.B * u2);
}

void RefinedController::observe(const Eigen::VectorXd& x2_prev, const Eigen::VectorXd& u2,
                                const Eigen::VectorXd& x2_next) {
  const auto& m = loop_->concrete;
  const Eigen::VectorXd drift = m.A * x2_prev + m.B * u2;
  const Eigen::VectorXd w = Bw2_pinv_ * (x2_next - drift);
  const double residual = (x2_next - drift - m.Bw * w).norm() / std::max(1.0, x2_next.norm());
  if (residual > 1e-8) {
    throw NumericError("refinement: noise reconstruction residual " + std::to_string(residual) +
                       " exceeds 1e-8 (model mismatch)");
  }
  if (!in_sink()) {
    const auto& red = loop_->abstraction.reduced;
    const Eigen::VectorXd z = loop_->abstraction.representative(cell_);
    const Eigen::VectorXd& u1 = loop_->abstraction.inputs.at(u1_);
    const Eigen::VectorXd x1 = red.A1 * z + red.B1 * u1 + red.Bw1 * w;
    cell_ = loop_->abstraction.grid.locate(x1).value_or(loop_->abstraction.sink());
  }
  q_ = loop_->dfa.step(q_, concrete_letter(*loop_, x2_next));
  ++k_;
}

double RefinedController::relation_value(const Eigen::VectorXd& x2) const {
  if (in_sink()) return std::numeric_limits<double>::infinity();
  const auto& c = loop_->certificate;
  const Eigen::VectorXd e = x2 - c.P * loop_->abstraction.representative(cell_);
  return e.dot(c.M * e);
}

}  // namespace rosyn::refinement
