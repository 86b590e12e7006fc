#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rosyn/alphabet.hpp"

namespace rosyn::logic {

enum class Op {
  True,
  Atom,
  NegatedAtom,
  And,
  Or,
  Next,
  Until,
  Eventually,
  BoundedEventually,  // F<=n
  BoundedAlways,      // G<=n
};

/// Co-safe LTL syntax tree. Negation only occurs on atoms; `atom` indexes the
/// alphabet the formula was parsed against.
struct Formula {
  Op op = Op::True;
  int atom = -1;
  int bound = 0;
  std::vector<Formula> args;

  static Formula truth() { return {}; }
  static Formula prop(int atom) { return {Op::Atom, atom, 0, {}}; }
  static Formula negated(int atom) { return {Op::NegatedAtom, atom, 0, {}}; }
  static Formula conj(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
  static Formula until(Formula a, Formula b) { return binary(Op::Until, std::move(a), std::move(b)); }
  static Formula next(Formula a) { return unary(Op::Next, std::move(a)); }
  static Formula eventually(Formula a) { return unary(Op::Eventually, std::move(a)); }
  static Formula eventually_within(int n, Formula a) {
    Formula f = unary(Op::BoundedEventually, std::move(a));
    f.bound = n;
    return f;
  }
  static Formula always_within(int n, Formula a) {
    Formula f = unary(Op::BoundedAlways, std::move(a));
    f.bound = n;
    return f;
  }

  /// Number of AST nodes.
  std::size_t size() const;
  bool has_bounded() const;
  std::string to_string(const Alphabet& alphabet) const;

  bool operator==(const Formula&) const = default;

 private:
  static Formula unary(Op op, Formula a) {
    Formula f{op, -1, 0, {}};
    f.args.push_back(std::move(a));
    return f;
  }
  static Formula binary(Op op, Formula a, Formula b) {
    Formula f{op, -1, 0, {}};
    f.args.push_back(std::move(a));
    f.args.push_back(std::move(b));
    return f;
  }
};

/// Parses a co-safe LTL formula over the given atoms.
///
/// Grammar (tightest binding first): unary operators `!` (atoms only), `X`,
/// `F`, `F<=n`, `G<=n`; then right-associative `U`; then `&`; then `|`.
/// `true`, identifiers and parentheses are primaries. Throws ParseError on
/// syntax errors, negated non-atoms and unknown atoms.
Formula parse_scltl(std::string_view text, const Alphabet& atoms);

/// Rewrites bounded operators into the core syntax:
/// G<=n f -> f & X f & ... & X^n f, F<=n f -> f | X f | ... | X^n f.
/// Throws rosyn::Error when a bound is negative.
Formula expand_bounded(const Formula& f);

}  // namespace rosyn::logic
