#include <algorithm>
#include <cmath>

#include "rosyn/error.hpp"
#include "rosyn/parallel.hpp"
#include "rosyn/synthesis/synthesis.hpp"

namespace rosyn::synthesis {

namespace {

void check_problem(const ScltlProblem& p) {
  if (!p.kernel || !p.dfa) throw Error("scltl: problem without kernel or automaton");
  if (!p.kernel->complete()) throw Error("scltl: kernel is incomplete");
  const std::size_t n = p.kernel->num_states();
  if (p.letters.size() != n || p.absorbing.size() != n) throw DimensionError("scltl: letter sets do not match states");
  for (const auto& ls : p.letters) {
    if (ls.empty()) throw Error("scltl: empty letter set");
    for (Letter a : ls) {
      if (a >= p.dfa->num_letters()) throw Error("scltl: letter outside the automaton alphabet");
    }
  }
  if (!(p.delta >= 0.0)) throw Error("scltl: delta must be non-negative");
}

// min over letters of g(t(q, a), k): 1 on F, V(k, q') otherwise.
double worst_successor(const ScltlProblem& p, std::span<const double> V, std::size_t k, logic::Location q) {
  if (p.absorbing[k]) return 0.0;
  const std::size_t nq = p.dfa->num_locations();
  double worst = 1.0;
  for (Letter a : p.letters[k]) {
    const logic::Location q2 = p.dfa->step_unchecked(q, a);
    const double g = p.dfa->is_accepting(q2) ? 1.0 : V[k * nq + q2];
    worst = std::min(worst, g);
  }
  return worst;
}

}  // namespace

void scltl_backup(const ScltlProblem& p, std::span<const double> V, std::span<double> out,
                  std::vector<std::uint32_t>* argmax) {
  const std::size_t n = p.kernel->num_states();
  const std::size_t m = p.kernel->num_inputs();
  const std::size_t nq = p.dfa->num_locations();
  if (V.size() != n * nq || out.size() != n * nq) throw DimensionError("scltl_backup: value table size");
  if (argmax) argmax->assign(n * nq, 0);
  parallel_for(
      n,
      [&](std::size_t i) {
        for (std::size_t q = 0; q < nq; ++q) {
          const std::size_t slot = i * nq + q;
          if (p.dfa->is_accepting(static_cast<logic::Location>(q))) {
            out[slot] = 0.0;
            continue;
          }
          double best = -1.0;
          std::uint32_t best_j = 0;
          for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (const auto& e : p.kernel->row(i, j)) {
              s += e.probability * worst_successor(p, V, e.target, static_cast<logic::Location>(q));
            }
            const double v = truncate(s - p.delta);
            if (v > best) {
              best = v;
              best_j = static_cast<std::uint32_t>(j);
            }
          }
          out[slot] = m == 0 ? 0.0 : best;
          if (argmax) (*argmax)[slot] = best_j;
        }
      },
      8);
}

double scltl_bound_at(const ScltlProblem& p, const ValueTable& values, std::size_t state) {
  if (state >= values.num_states) throw Error("scltl_bound_at: state out of range");
  if (p.absorbing[state]) return 0.0;
  return truncate(worst_successor(p, values.values, state, p.dfa->initial()) - p.delta);
}

ReachResult robust_scltl(const ScltlProblem& p, Horizon horizon, std::optional<std::size_t> initial) {
  check_problem(p);
  const std::size_t n = p.kernel->num_states();
  const std::size_t nq = p.dfa->num_locations();
  ReachResult res;
  auto& vt = res.values;
  vt.num_states = n;
  vt.num_locations = nq;
  vt.horizon = horizon;
  vt.mode = Mode::LowerBound;
  vt.values.assign(n * nq, 0.0);
  res.policy.num_states = n;
  res.policy.num_locations = nq;
  res.policy.num_inputs = p.kernel->num_inputs();
  res.policy.horizon = horizon;
  res.policy.delta = p.delta;
  std::vector<double> next(n * nq, 0.0);
  std::vector<std::uint32_t> choice;

  if (horizon.is_finite()) {
    const int N = horizon.steps();
    res.policy.tables.assign(static_cast<std::size_t>(N), {});
    for (int k = N - 1; k >= 0; --k) {
      scltl_backup(p, vt.values, next, &choice);
      vt.values.swap(next);
      res.policy.tables[static_cast<std::size_t>(k)] = choice;
      ++vt.iterations;
    }
  } else {
    vt.converged = false;
    while (vt.iterations < kMaxIterations) {
      scltl_backup(p, vt.values, next, &choice);
      ++vt.iterations;
      double change = 0.0;
      for (std::size_t s = 0; s < next.size(); ++s) change = std::max(change, std::abs(next[s] - vt.values[s]));
      vt.values.swap(next);
      if (change < kFixedPointTolerance) {
        vt.converged = true;
        break;
      }
    }
    res.policy.tables.assign(1, choice);
  }
  if (initial) {
    if (*initial >= n) throw Error("scltl: initial state out of range");
    res.policy.bound = scltl_bound_at(p, vt, *initial);
  }
  return res;
}

std::vector<std::vector<Letter>> letter_sets(const abstraction::FiniteAbstraction& abs,
                                             const model::LabellingMap& labels, double eps) {
  if (eps < 0.0) throw Error("letter_sets: eps must be non-negative");
  if (labels.output_dim() != abs.reduced.C1.rows()) throw DimensionError("letter_sets: output dimension");
  const double radius = eps + cell_output_radius(abs);
  std::vector<std::vector<Letter>> out(abs.num_states());
  for (std::size_t i = 0; i < abs.num_cells(); ++i) out[i] = labels.relaxed_labels(abs.output(i), radius);
  out[abs.sink()] = {labels.default_letter()};
  return out;
}

ScltlProblem make_scltl_problem(const abstraction::FiniteAbstraction& abs, const logic::Dfa& dfa,
                                const model::LabellingMap& labels, double eps, double delta) {
  if (!(dfa.alphabet() == labels.alphabet())) throw Error("scltl: automaton and labelling use different alphabets");
  ScltlProblem p;
  p.kernel = &abs.kernel;
  p.dfa = &dfa;
  p.letters = letter_sets(abs, labels, eps);
  p.absorbing.assign(abs.num_states(), false);
  p.absorbing[abs.sink()] = true;
  p.delta = delta;
  return p;
}

ReachResult robust_scltl(const abstraction::FiniteAbstraction& abs, const logic::Dfa& dfa,
                         const model::LabellingMap& labels, double eps, double delta, Horizon horizon,
                         std::optional<std::size_t> initial, std::size_t max_entries) {
  if (abs.num_states() > max_entries / std::max<std::size_t>(1, dfa.num_locations())) {
    throw ResourceError("scltl: |X| |Q| exceeds the value table cap");
  }
  const ScltlProblem p = make_scltl_problem(abs, dfa, labels, eps, delta);
  auto res = robust_scltl(p, horizon, initial);
  res.policy.epsilon = eps;
  return res;
}

}  // namespace rosyn::synthesis
