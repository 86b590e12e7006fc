#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rosyn/abstraction/abstraction.hpp"
#include "rosyn/abstraction/kernel.hpp"
#include "rosyn/logic/dfa.hpp"
#include "rosyn/model/labelling.hpp"

namespace rosyn::synthesis {

/// min(1, max(0, v)).
constexpr double truncate(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

/// Finite horizon N >= 0 or the fixed point.
class Horizon {
 public:
  static Horizon finite(int steps);
  static Horizon unbounded() { return Horizon{}; }

  bool is_finite() const noexcept { return steps_.has_value(); }
  int steps() const;  // throws on unbounded

  bool operator==(const Horizon&) const = default;

 private:
  std::optional<int> steps_;
};

enum class Mode { Standard, LowerBound, UpperBound };

/// V over (state, location); reachability problems use one location.
struct ValueTable {
  std::size_t num_states = 0;
  std::size_t num_locations = 1;
  std::vector<double> values;  // values[state * num_locations + location]
  Horizon horizon;
  Mode mode = Mode::Standard;
  std::size_t iterations = 0;
  bool converged = true;  // false when the unbounded iteration hit its cap

  double at(std::size_t state, std::size_t location = 0) const { return values[state * num_locations + location]; }
};

/// Input choice per (state, location), one table per time step for finite
/// horizons and a single stationary table otherwise.
struct RobustPolicy {
  std::size_t num_states = 0;
  std::size_t num_locations = 1;
  std::size_t num_inputs = 0;
  std::vector<std::vector<std::uint32_t>> tables;
  Horizon horizon;
  double epsilon = 0.0;
  double delta = 0.0;
  double bound = 0.0;  // r at the initial state, 0 when none was given

  /// Input at time k; times past a finite horizon reuse the last table.
  std::uint32_t input(std::size_t state, std::size_t location = 0, std::size_t k = 0) const;
};

/// Abstract-state subset (the sink is never a member).
struct TargetSet {
  std::vector<bool> member;
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool operator==(const TargetSet&) const = default;
};

/// Rectangle shrunk by eps per face; nullopt when it becomes empty.
std::optional<model::Box> erode_box(const model::Box& K, double eps);
/// Rectangle grown by eps per face (bounding box of the 2-norm dilation).
model::Box dilate_box(const model::Box& K, double eps);

/// Radius of a cell's output image around its representative:
/// ||C1||_2 ||diameter||_2 / 2.
double cell_output_radius(const abstraction::FiniteAbstraction& abs);

/// Cells whose whole output image lies in the eps-erosion of K.
TargetSet eroded_target(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps);
/// Cells whose output image meets the eps-dilation {y : dist(y, K) <= eps}.
TargetSet dilated_target(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps);

struct ReachResult {
  ValueTable values;
  RobustPolicy policy;
};

/// One application of the reachability operator:
/// out(i) = max_j L(sum_k T[i][j][k] (1_K(k) + 1_{not K}(k) V(k)) + shift), with
/// the maximizing input (lowest index on ties) written to argmax when given.
/// shift = 0 is the standard operator, -delta the robust one, +delta the upper one.
/// With `fixed` the input is taken from the table instead of maximized.
void reach_backup(const abstraction::Kernel& kernel, const TargetSet& target, double shift, std::span<const double> V,
                  std::span<double> out, std::vector<std::uint32_t>* argmax = nullptr,
                  const std::vector<std::uint32_t>* fixed = nullptr);

/// L(1_K(s) + 1_{not K}(s) V(s) + shift).
double reach_bound_at(const ValueTable& values, const TargetSet& target, std::size_t state, double shift);

/// Standard recursion from V_N = 0 (or the monotone fixed point). A fixed
/// policy, when given, is evaluated instead of optimized.
ReachResult standard_reach(const abstraction::Kernel& kernel, const TargetSet& target, Horizon horizon,
                           std::optional<std::size_t> initial = std::nullopt,
                           const RobustPolicy* fixed_policy = nullptr);

/// Robust recursion with -delta inside every truncation on an (already
/// eroded) target. Throws Error unless 0 <= delta.
ReachResult robust_reach(const abstraction::Kernel& kernel, const TargetSet& target, double delta, Horizon horizon,
                         std::optional<std::size_t> initial = std::nullopt);

/// Upper bound with +delta per step on an (already dilated) target; finite
/// horizons only. Returns L(W(initial) + delta).
double upper_bound_reach(const abstraction::Kernel& kernel, const TargetSet& target, double delta, int horizon,
                         std::size_t initial);

/// Reachability of an output rectangle on an abstraction with the eps-eroded
/// (lower) or eps-dilated (upper) target.
ReachResult robust_reach(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps, double delta,
                         Horizon horizon, std::optional<std::size_t> initial = std::nullopt);
double upper_bound_reach(const abstraction::FiniteAbstraction& abs, const model::Box& K, double eps, double delta,
                         int horizon, std::size_t initial);

/// Letter sets per abstract state: relaxed labels of the representative with
/// radius eps + cell_output_radius; the sink gets {default letter}.
std::vector<std::vector<Letter>> letter_sets(const abstraction::FiniteAbstraction& abs,
                                             const model::LabellingMap& labels, double eps);

struct ScltlProblem {
  const abstraction::Kernel* kernel = nullptr;
  const logic::Dfa* dfa = nullptr;
  /// Possible letters of each state; letters[state] non-empty.
  std::vector<std::vector<Letter>> letters;
  /// States whose successors contribute nothing (the sink).
  std::vector<bool> absorbing;
  double delta = 0.0;
};

/// One application of the product operator:
/// out(i, q) = max_j L(sum_k T[i][j][k] min_{a in letters(k)} g(t(q, a), k) - delta)
/// for q outside F, where g(q', k) = 1 on F and V(k, q') otherwise.
/// Accepting locations stay 0.
void scltl_backup(const ScltlProblem& problem, std::span<const double> V, std::span<double> out,
                  std::vector<std::uint32_t>* argmax = nullptr);

/// L(min_{a in letters(state)} g(t(q0, a), state) - delta); 0 at absorbing states.
double scltl_bound_at(const ScltlProblem& problem, const ValueTable& values, std::size_t state);

/// Robust product value iteration; the product is never built.
ReachResult robust_scltl(const ScltlProblem& problem, Horizon horizon, std::optional<std::size_t> initial = std::nullopt);

/// Convenience wrapper on an abstraction: letter sets from `labels` at radius
/// eps, the sink absorbing. Throws Error on alphabet mismatch and
/// ResourceError when |X| |Q| exceeds max_entries.
ReachResult robust_scltl(const abstraction::FiniteAbstraction& abs, const logic::Dfa& dfa,
                         const model::LabellingMap& labels, double eps, double delta, Horizon horizon,
                         std::optional<std::size_t> initial = std::nullopt, std::size_t max_entries = 100'000'000);

/// The problem robust_scltl(abs, ...) solves, for bound_at queries.
ScltlProblem make_scltl_problem(const abstraction::FiniteAbstraction& abs, const logic::Dfa& dfa,
                                const model::LabellingMap& labels, double eps, double delta);

inline constexpr double kFixedPointTolerance = 1e-9;
inline constexpr std::size_t kMaxIterations = 100'000;

}  // namespace rosyn::synthesis
