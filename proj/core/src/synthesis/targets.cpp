#include <algorithm>

#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/synthesis/synthesis.hpp"

namespace rosyn::synthesis {

Horizon Horizon::finite(int steps) {
  if (steps < 0) throw Error("horizon must be non-negative");
  Horizon h;
  h.steps_ = steps;
  return h;
}

int Horizon::steps() const {
  if (!steps_) throw Error("unbounded horizon has no step count");
  return *steps_;
}

std::uint32_t RobustPolicy::input(std::size_t state, std::size_t location, std::size_t k) const {
  if (state >= num_states || location >= num_locations) throw Error("policy: state or location out of range");
  if (tables.empty()) return 0;
  const auto& t = tables[std::min(k, tables.size() - 1)];
  return t[state * num_locations + location];
}

std::size_t TargetSet::count() const { return static_cast<std::size_t>(std::count(member.begin(), member.end(), true)); }

std::optional<model::Box> erode_box(const model::Box& K, double eps) {
  if (eps < 0.0) throw Error("erode_box: eps must be non-negative");
  model::Box out{K.lo.array() + eps, K.hi.array() - eps};
  if ((out.hi.array() < out.lo.array()).any()) return std::nullopt;
  return out;
}

model::Box dilate_box(const model::Box& K, double eps) {
  if (eps < 0.0) throw Error("dilate_box: eps must be non-negative");
  return model::Box{K.lo.array() - eps, K.hi.array() + eps};
}

double cell_output_radius(const abstraction::FiniteAbstraction& abs) {
  return operator_norm(abs.reduced.C1) * abs.grid.diameter().norm() / 2.0;
}

TargetSet eroded_target(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps) {
  if (K.dim() != abs.reduced.C1.rows()) throw DimensionError("eroded_target: target dimension");
  TargetSet t;
  t.member.assign(abs.num_states(), false);
  const auto eroded = erode_box(K, eps);
  if (!eroded) return t;
  const double r = cell_output_radius(abs);
  for (std::size_t i = 0; i < abs.num_cells(); ++i) t.member[i] = eroded->contains_ball(abs.output(i), r);
  return t;
}

TargetSet dilated_target(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps) {
  if (K.dim() != abs.reduced.C1.rows()) throw DimensionError("dilated_target: target dimension");
  if (eps < 0.0) throw Error("dilated_target: eps must be non-negative");
  TargetSet t;
  t.member.assign(abs.num_states(), false);
  const double r = cell_output_radius(abs);
  for (std::size_t i = 0; i < abs.num_cells(); ++i) t.member[i] = K.distance(abs.output(i)) <= eps + r;
  return t;
}

}  // namespace rosyn::synthesis
