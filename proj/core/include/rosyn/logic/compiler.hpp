#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rosyn/logic/dfa.hpp"
#include "rosyn/logic/formula.hpp"

namespace rosyn::logic {

struct CompileOptions {
  /// Cap on subset-construction states; exceeding it raises ResourceError.
  std::size_t max_states = 1'000'000;
};

/// Nondeterministic automaton of informative prefixes. Each state is a set of
/// pending obligations; a state with no obligations accepts. Transitions are
/// kept symbolically as (required atoms, forbidden atoms, successor) guards.
struct Nfa {
  struct Edge {
    Letter required = 0;
    Letter forbidden = 0;
    std::uint32_t target = 0;
    bool matches(Letter l) const noexcept { return (l & required) == required && (l & forbidden) == 0; }
  };

  Alphabet alphabet;
  std::vector<std::uint32_t> initial;
  std::vector<std::vector<Edge>> edges;
  std::vector<bool> accepting;

  std::size_t num_states() const noexcept { return edges.size(); }
  bool accepts(std::span<const Letter> word) const;
};

/// Obligation-set tableau for a core (bounded-free) formula.
Nfa build_nfa(const Formula& f, const Alphabet& alphabet, const CompileOptions& options = {});

/// Subset construction followed by the good-prefix closure: every location
/// from which all infinite continuations reach F becomes accepting. The
/// result is deterministic and total but not minimal.
Dfa determinize(const Nfa& nfa, const CompileOptions& options = {});

/// Hopcroft partition refinement; unreachable locations are dropped and
/// locations are renumbered in breadth-first order from the initial one.
Dfa minimize(const Dfa& dfa);

/// Full pipeline: tableau NFA, determinization, good-prefix closure and
/// minimization. Bounded operators are expanded first.
Dfa compile_dfa(const Formula& f, const Alphabet& alphabet, const CompileOptions& options = {});

}  // namespace rosyn::logic
