#include "rosyn/logic/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "rosyn/error.hpp"

namespace rosyn::logic {

namespace {

// Hash-consed subformula table so obligations can be stored as sorted ids.
struct NodeTable {
  struct Node {
    Op op;
    int atom;
    int lhs;
    int rhs;
    auto key() const { return std::tie(op, atom, lhs, rhs); }
    bool operator<(const Node& o) const { return key() < o.key(); }
  };
  std::vector<Node> nodes;
  std::map<Node, int> index;

  int intern(const Formula& f) {
    Node n{f.op, f.atom, -1, -1};
    if (!f.args.empty()) n.lhs = intern(f.args[0]);
    if (f.args.size() > 1) n.rhs = intern(f.args[1]);
    auto [it, inserted] = index.emplace(n, static_cast<int>(nodes.size()));
    if (inserted) nodes.push_back(n);
    return it->second;
  }
};

using Obligations = std::vector<int>;  // sorted, unique

struct Alternative {
  Letter required = 0;
  Letter forbidden = 0;
  Obligations next;
  auto key() const { return std::tie(required, forbidden, next); }
  bool operator<(const Alternative& o) const { return key() < o.key(); }
};

class Expander {
 public:
  explicit Expander(const NodeTable& table) : table_(table) {}

  std::set<Alternative> expand(const Obligations& now) {
    out_.clear();
    std::vector<int> pending(now.begin(), now.end());
    Alternative alt;
    rec(pending, alt);
    return out_;
  }

 private:
  void rec(std::vector<int> pending, Alternative alt) {
    while (!pending.empty()) {
      const int id = pending.back();
      pending.pop_back();
      const auto& n = table_.nodes[id];
      switch (n.op) {
        case Op::True:
          break;
        case Op::Atom:
          alt.required |= Letter{1} << n.atom;
          if (alt.required & alt.forbidden) return;
          break;
        case Op::NegatedAtom:
          alt.forbidden |= Letter{1} << n.atom;
          if (alt.required & alt.forbidden) return;
          break;
        case Op::And:
          pending.push_back(n.lhs);
          pending.push_back(n.rhs);
          break;
        case Op::Next:
          alt.next.push_back(n.lhs);
          break;
        case Op::Or: {
          auto left = pending;
          left.push_back(n.lhs);
          rec(std::move(left), alt);
          pending.push_back(n.rhs);
          break;
        }
        case Op::Until: {
          // a U b  ==  b | (a & X(a U b))
          auto now = pending;
          now.push_back(n.rhs);
          rec(std::move(now), alt);
          pending.push_back(n.lhs);
          alt.next.push_back(id);
          break;
        }
        case Op::Eventually: {
          // F a  ==  a | X F a
          auto now = pending;
          now.push_back(n.lhs);
          rec(std::move(now), alt);
          alt.next.push_back(id);
          break;
        }
        case Op::BoundedAlways:
        case Op::BoundedEventually:
          throw Error("compile_dfa: bounded operators must be expanded first");
      }
    }
    std::sort(alt.next.begin(), alt.next.end());
    alt.next.erase(std::unique(alt.next.begin(), alt.next.end()), alt.next.end());
    out_.insert(std::move(alt));
  }

  const NodeTable& table_;
  std::set<Alternative> out_;
};

}  // namespace

bool Nfa::accepts(std::span<const Letter> word) const {
  std::set<std::uint32_t> current(initial.begin(), initial.end());
  auto any_accepting = [&] {
    return std::any_of(current.begin(), current.end(), [&](std::uint32_t s) { return accepting[s]; });
  };
  if (any_accepting()) return true;
  for (Letter l : word) {
    std::set<std::uint32_t> next;
    for (auto s : current) {
      for (const auto& e : edges[s]) {
        if (e.matches(l)) next.insert(e.target);
      }
    }
    current = std::move(next);
    if (any_accepting()) return true;
  }
  return false;
}

Nfa build_nfa(const Formula& f, const Alphabet& alphabet, const CompileOptions& options) {
  if (f.has_bounded()) throw Error("compile_dfa: bounded operators must be expanded first");
  NodeTable table;
  const int root = table.intern(f);
  for (const auto& n : table.nodes) {
    if ((n.op == Op::Atom || n.op == Op::NegatedAtom) &&
        (n.atom < 0 || static_cast<std::size_t>(n.atom) >= alphabet.num_atoms())) {
      throw Error("compile_dfa: formula references an atom outside the alphabet");
    }
  }

  Nfa nfa;
  nfa.alphabet = alphabet;
  std::map<Obligations, std::uint32_t> ids;
  std::vector<Obligations> states;
  auto state_of = [&](const Obligations& o) {
    auto [it, inserted] = ids.emplace(o, static_cast<std::uint32_t>(states.size()));
    if (inserted) {
      if (states.size() >= options.max_states) throw ResourceError("compile_dfa: NFA state cap exceeded");
      states.push_back(o);
    }
    return it->second;
  };

  nfa.initial.push_back(state_of(Obligations{root}));
  Expander expander(table);
  for (std::size_t s = 0; s < states.size(); ++s) {
    const Obligations now = states[s];
    std::vector<Nfa::Edge> edges;
    if (now.empty()) {
      edges.push_back({0, 0, static_cast<std::uint32_t>(s)});
    } else {
      for (const auto& alt : expander.expand(now)) {
        edges.push_back({alt.required, alt.forbidden, state_of(alt.next)});
      }
    }
    nfa.edges.push_back(std::move(edges));
  }
  nfa.accepting.resize(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) nfa.accepting[s] = states[s].empty();
  return nfa;
}

namespace {

// Locations from which every infinite continuation visits an accepting one:
// complement of the greatest set of non-accepting locations closed under
// "some successor stays in the set".
std::vector<bool> good_prefix_closure(std::size_t n, std::size_t sigma, const std::vector<bool>& accepting,
                                      const std::vector<Location>& table) {
  std::vector<bool> avoid(n);
  for (std::size_t q = 0; q < n; ++q) avoid[q] = !accepting[q];
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t q = 0; q < n; ++q) {
      if (!avoid[q]) continue;
      bool stays = false;
      for (std::size_t a = 0; a < sigma && !stays; ++a) stays = avoid[table[q * sigma + a]];
      if (!stays) {
        avoid[q] = false;
        changed = true;
      }
    }
  }
  std::vector<bool> good(n);
  for (std::size_t q = 0; q < n; ++q) good[q] = !avoid[q];
  return good;
}

}  // namespace

Dfa determinize(const Nfa& nfa, const CompileOptions& options) {
  const std::size_t sigma = nfa.alphabet.num_letters();
  std::map<std::vector<std::uint32_t>, Location> ids;
  std::vector<std::vector<std::uint32_t>> subsets;
  std::vector<Location> table;
  auto location_of = [&](std::vector<std::uint32_t> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    auto [it, inserted] = ids.emplace(s, static_cast<Location>(subsets.size()));
    if (inserted) {
      if (subsets.size() >= options.max_states) {
        throw ResourceError("compile_dfa: determinized state cap (" + std::to_string(options.max_states) +
                            ") exceeded");
      }
      subsets.push_back(std::move(s));
    }
    return it->second;
  };

  const Location init = location_of(nfa.initial);
  for (std::size_t d = 0; d < subsets.size(); ++d) {
    table.resize((d + 1) * sigma);
    for (std::size_t a = 0; a < sigma; ++a) {
      std::vector<std::uint32_t> next;
      for (auto s : subsets[d]) {
        for (const auto& e : nfa.edges[s]) {
          if (e.matches(static_cast<Letter>(a))) next.push_back(e.target);
        }
      }
      const Location t = location_of(std::move(next));
      table[d * sigma + a] = t;
    }
  }

  const std::size_t n = subsets.size();
  std::vector<bool> accepting(n);
  for (std::size_t d = 0; d < n; ++d) {
    accepting[d] = std::any_of(subsets[d].begin(), subsets[d].end(),
                               [&](std::uint32_t s) { return nfa.accepting[s]; });
  }
  // Absorb before the closure so F is closed under every letter.
  for (std::size_t d = 0; d < n; ++d) {
    if (accepting[d]) {
      for (std::size_t a = 0; a < sigma; ++a) table[d * sigma + a] = static_cast<Location>(d);
    }
  }
  accepting = good_prefix_closure(n, sigma, accepting, table);
  return Dfa(nfa.alphabet, n, init, std::move(accepting), std::move(table));
}

Dfa minimize(const Dfa& dfa) {
  const std::size_t sigma = dfa.num_letters();

  // Reachable part.
  std::vector<int> reach_id(dfa.num_locations(), -1);
  std::vector<Location> order{dfa.initial()};
  reach_id[dfa.initial()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t a = 0; a < sigma; ++a) {
      const Location t = dfa.step_unchecked(order[i], static_cast<Letter>(a));
      if (reach_id[t] < 0) {
        reach_id[t] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  }
  const std::size_t n = order.size();
  std::vector<std::uint32_t> delta(n * sigma);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < sigma; ++a) {
      delta[i * sigma + a] = static_cast<std::uint32_t>(reach_id[dfa.step_unchecked(order[i], static_cast<Letter>(a))]);
    }
  }

  // Inverse transitions, grouped by letter then target (CSR).
  std::vector<std::size_t> inv_start(sigma * n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < sigma; ++a) ++inv_start[a * n + delta[i * sigma + a] + 1];
  }
  for (std::size_t k = 1; k < inv_start.size(); ++k) inv_start[k] += inv_start[k - 1];
  std::vector<std::uint32_t> inv(n * sigma);
  {
    auto fill = inv_start;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < sigma; ++a) inv[fill[a * n + delta[i * sigma + a]]++] = static_cast<std::uint32_t>(i);
    }
  }

  // Refinable partition.
  std::vector<std::vector<std::uint32_t>> blocks;
  std::vector<std::uint32_t> block_of(n);
  {
    std::vector<std::uint32_t> acc, rej;
    for (std::size_t i = 0; i < n; ++i) (dfa.is_accepting(order[i]) ? acc : rej).push_back(static_cast<std::uint32_t>(i));
    for (auto* b : {&acc, &rej}) {
      if (b->empty()) continue;
      for (auto s : *b) block_of[s] = static_cast<std::uint32_t>(blocks.size());
      blocks.push_back(std::move(*b));
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> work;
  std::vector<std::vector<char>> in_work;
  auto push = [&](std::uint32_t b, std::uint32_t a) {
    if (!in_work[b][a]) {
      in_work[b][a] = 1;
      work.emplace_back(b, a);
    }
  };
  in_work.assign(blocks.size(), std::vector<char>(sigma, 0));
  if (blocks.size() == 2) {
    const std::uint32_t smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
    for (std::uint32_t a = 0; a < sigma; ++a) push(smaller, a);
  }

  std::vector<std::uint32_t> mark_count;
  std::vector<char> marked(n, 0);
  std::vector<std::uint32_t> touched;
  while (!work.empty()) {
    const auto [splitter, a] = work.back();
    work.pop_back();
    in_work[splitter][a] = 0;

    // Preimage of the splitter under letter a.
    std::vector<std::uint32_t> pre;
    for (auto t : blocks[splitter]) {
      for (std::size_t k = inv_start[a * n + t]; k < inv_start[a * n + t + 1]; ++k) pre.push_back(inv[k]);
    }
    mark_count.assign(blocks.size(), 0);
    touched.clear();
    for (auto s : pre) {
      if (marked[s]) continue;
      marked[s] = 1;
      const auto b = block_of[s];
      if (mark_count[b]++ == 0) touched.push_back(b);
    }
    for (auto b : touched) {
      if (mark_count[b] == blocks[b].size()) continue;
      std::vector<std::uint32_t> in, out;
      for (auto s : blocks[b]) (marked[s] ? in : out).push_back(s);
      const auto nb = static_cast<std::uint32_t>(blocks.size());
      blocks[b] = std::move(in);
      blocks.push_back(std::move(out));
      for (auto s : blocks[nb]) block_of[s] = nb;
      in_work.emplace_back(sigma, 0);
      for (std::uint32_t c = 0; c < sigma; ++c) {
        if (in_work[b][c]) {
          push(nb, c);
        } else {
          push(blocks[b].size() <= blocks[nb].size() ? b : nb, c);
        }
      }
    }
    for (auto s : pre) marked[s] = 0;
  }

  // Renumber blocks breadth-first from the initial block.
  std::vector<int> new_id(blocks.size(), -1);
  std::vector<std::uint32_t> queue{block_of[0]};
  new_id[block_of[0]] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto rep = blocks[queue[i]].front();
    for (std::size_t c = 0; c < sigma; ++c) {
      const auto tb = block_of[delta[rep * sigma + c]];
      if (new_id[tb] < 0) {
        new_id[tb] = static_cast<int>(queue.size());
        queue.push_back(tb);
      }
    }
  }
  const std::size_t m = queue.size();
  std::vector<Location> table(m * sigma);
  std::vector<bool> accepting(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto rep = blocks[queue[i]].front();
    accepting[i] = dfa.is_accepting(order[rep]);
    for (std::size_t c = 0; c < sigma; ++c) {
      table[i * sigma + c] = static_cast<Location>(new_id[block_of[delta[rep * sigma + c]]]);
    }
  }
  return Dfa(dfa.alphabet(), m, 0, std::move(accepting), std::move(table));
}

Dfa compile_dfa(const Formula& f, const Alphabet& alphabet, const CompileOptions& options) {
  const Formula core = f.has_bounded() ? expand_bounded(f) : f;
  return minimize(determinize(build_nfa(core, alphabet, options), options));
}

}  // namespace rosyn::logic
