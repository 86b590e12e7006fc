#include <algorithm>
#include <cmath>

#include "rosyn/error.hpp"
#include "rosyn/parallel.hpp"
#include "rosyn/synthesis/synthesis.hpp"

namespace rosyn::synthesis {

namespace {

void check_target(const abstraction::Kernel& kernel, const TargetSet& target) {
  if (!kernel.complete()) throw Error("reach: kernel is incomplete");
  if (target.member.size() != kernel.num_states()) throw DimensionError("reach: target size differs from state count");
}

double max_change(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Shared driver for the standard, robust and upper operators.
ReachResult iterate(const abstraction::Kernel& kernel, const TargetSet& target, double shift, Horizon horizon,
                    Mode mode, std::optional<std::size_t> initial, const RobustPolicy* fixed) {
  check_target(kernel, target);
  const std::size_t n = kernel.num_states();
  if (fixed && (fixed->num_states != n || fixed->num_locations != 1)) {
    throw DimensionError("reach: fixed policy shape differs from the kernel");
  }
  ReachResult res;
  res.values.num_states = n;
  res.values.horizon = horizon;
  res.values.mode = mode;
  res.values.values.assign(n, 0.0);
  res.policy.num_states = n;
  res.policy.num_inputs = kernel.num_inputs();
  res.policy.horizon = horizon;
  std::vector<double> next(n, 0.0);
  std::vector<std::uint32_t> choice(n, 0);

  if (horizon.is_finite()) {
    const int N = horizon.steps();
    res.policy.tables.assign(static_cast<std::size_t>(N), {});
    for (int k = N - 1; k >= 0; --k) {
      const std::vector<std::uint32_t>* table = nullptr;
      if (fixed && !fixed->tables.empty()) {
        table = &fixed->tables[std::min<std::size_t>(static_cast<std::size_t>(k), fixed->tables.size() - 1)];
      }
      reach_backup(kernel, target, shift, res.values.values, next, &choice, table);
      res.values.values.swap(next);
      res.policy.tables[static_cast<std::size_t>(k)] = choice;
      ++res.values.iterations;
    }
  } else {
    const std::vector<std::uint32_t>* table = (fixed && !fixed->tables.empty()) ? &fixed->tables.front() : nullptr;
    res.values.converged = false;
    while (res.values.iterations < kMaxIterations) {
      reach_backup(kernel, target, shift, res.values.values, next, &choice, table);
      ++res.values.iterations;
      const double change = max_change(next, res.values.values);
      res.values.values.swap(next);
      if (change < kFixedPointTolerance) {
        res.values.converged = true;
        break;
      }
    }
    res.policy.tables.assign(1, choice);
  }
  if (initial) {
    if (*initial >= n) throw Error("reach: initial state out of range");
    res.policy.bound = reach_bound_at(res.values, target, *initial, shift);
  }
  return res;
}

}  // namespace

void reach_backup(const abstraction::Kernel& kernel, const TargetSet& target, double shift, std::span<const double> V,
                  std::span<double> out, std::vector<std::uint32_t>* argmax, const std::vector<std::uint32_t>* fixed) {
  const std::size_t n = kernel.num_states();
  const std::size_t m = kernel.num_inputs();
  if (V.size() != n || out.size() != n || target.member.size() != n) throw DimensionError("reach_backup: sizes");
  if (fixed && fixed->size() != n) throw DimensionError("reach_backup: fixed policy size");
  if (fixed && std::any_of(fixed->begin(), fixed->end(), [m](std::uint32_t j) { return j >= m; })) {
    throw Error("reach_backup: fixed input out of range");
  }
  if (argmax) argmax->resize(n);
  auto row_value = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (const auto& e : kernel.row(i, j)) s += e.probability * (target.member[e.target] ? 1.0 : V[e.target]);
    return truncate(s + shift);
  };
  parallel_for(n, [&](std::size_t i) {
    if (fixed) {
      const std::uint32_t j = (*fixed)[i];
      out[i] = row_value(i, j);
      if (argmax) (*argmax)[i] = j;
      return;
    }
    double best = -1.0;
    std::uint32_t best_j = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = row_value(i, j);
      if (v > best) {
        best = v;
        best_j = static_cast<std::uint32_t>(j);
      }
    }
    out[i] = m == 0 ? 0.0 : best;
    if (argmax) (*argmax)[i] = best_j;
  });
}

double reach_bound_at(const ValueTable& values, const TargetSet& target, std::size_t state, double shift) {
  if (state >= values.num_states || state >= target.member.size()) throw Error("reach_bound_at: state out of range");
  return truncate((target.member[state] ? 1.0 : values.at(state)) + shift);
}

ReachResult standard_reach(const abstraction::Kernel& kernel, const TargetSet& target, Horizon horizon,
                           std::optional<std::size_t> initial, const RobustPolicy* fixed_policy) {
  return iterate(kernel, target, 0.0, horizon, Mode::Standard, initial, fixed_policy);
}

ReachResult robust_reach(const abstraction::Kernel& kernel, const TargetSet& target, double delta, Horizon horizon,
                         std::optional<std::size_t> initial) {
  if (!(delta >= 0.0)) throw Error("robust_reach: delta must be non-negative");
  auto res = iterate(kernel, target, -delta, horizon, Mode::LowerBound, initial, nullptr);
  res.policy.delta = delta;
  return res;
}

double upper_bound_reach(const abstraction::Kernel& kernel, const TargetSet& target, double delta, int horizon,
                         std::size_t initial) {
  if (!(delta >= 0.0)) throw Error("upper_bound_reach: delta must be non-negative");
  auto res = iterate(kernel, target, delta, Horizon::finite(horizon), Mode::UpperBound, initial, nullptr);
  return res.policy.bound;
}

ReachResult robust_reach(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps, double delta,
                         Horizon horizon, std::optional<std::size_t> initial) {
  auto res = robust_reach(abs.kernel, eroded_target(abs, K, eps), delta, horizon, initial);
  res.policy.epsilon = eps;
  return res;
}

double upper_bound_reach(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps, double delta,
                         int horizon, std::size_t initial) {
  return upper_bound_reach(abs.kernel, dilated_target(abs, K, eps), delta, horizon, initial);
}

}  // namespace rosyn::synthesis
