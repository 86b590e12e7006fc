#include <cmath>

#include "rosyn/error.hpp"
#include "rosyn/refinement/refinement.hpp"

namespace rosyn::refinement {

double exact_eval_finite(const abstraction::Kernel& kernel, const synthesis::RobustPolicy& policy,
                         const logic::Dfa& dfa, const std::vector<Letter>& labels, std::size_t initial,
                         synthesis::Horizon horizon, std::size_t max_steps, std::size_t max_product) {
  const std::size_t n = kernel.num_states();
  const std::size_t nq = dfa.num_locations();
  if (n > max_product / std::max<std::size_t>(1, nq)) throw ResourceError("exact_eval_finite: product too large");
  if (labels.size() != n) throw DimensionError("exact_eval_finite: one letter per state required");
  if (initial >= n) throw Error("exact_eval_finite: initial state out of range");
  if (policy.num_states != n) throw DimensionError("exact_eval_finite: policy state count");
  if (policy.num_locations != 1 && policy.num_locations != nq) {
    throw DimensionError("exact_eval_finite: policy location count");
  }
  auto input = [&](std::size_t s, std::size_t q, std::size_t k) {
    return policy.input(s, policy.num_locations == 1 ? 0 : q, k);
  };

  const logic::Location q0 = dfa.step(dfa.initial(), labels[initial]);
  if (dfa.is_accepting(q0)) return 1.0;
  std::vector<double> mass(n * nq, 0.0);
  std::vector<double> next(n * nq, 0.0);
  mass[initial * nq + q0] = 1.0;
  double accepted = 0.0;
  const std::size_t steps = horizon.is_finite() ? static_cast<std::size_t>(horizon.steps()) : max_steps;
  for (std::size_t k = 0; k < steps; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    double gained = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t q = 0; q < nq; ++q) {
        const double p = mass[s * nq + q];
        if (p == 0.0) continue;
        const std::uint32_t j = input(s, q, k);
        if (j >= kernel.num_inputs()) throw Error("exact_eval_finite: policy input out of range");
        for (const auto& e : kernel.row(s, j)) {
          const logic::Location q2 = dfa.step_unchecked(static_cast<logic::Location>(q), labels[e.target]);
          if (dfa.is_accepting(q2)) {
            gained += p * e.probability;
          } else {
            next[e.target * nq + q2] += p * e.probability;
          }
        }
      }
    }
    accepted += gained;
    mass.swap(next);
    if (!horizon.is_finite() && gained < 1e-14 && k > 0) {
      // Stop once no further mass is being decided.
      double moved = 0.0;
      for (std::size_t i = 0; i < mass.size(); ++i) moved += std::abs(mass[i] - next[i]);
      if (moved < 1e-14) break;
    }
  }
  return accepted;
}

}  // namespace rosyn::refinement
