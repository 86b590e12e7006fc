#include "rosyn/logic/formula.hpp"

#include "rosyn/error.hpp"

namespace rosyn::logic {

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& a : args) n += a.size();
  return n;
}

bool Formula::has_bounded() const {
  if (op == Op::BoundedAlways || op == Op::BoundedEventually) return true;
  for (const auto& a : args) {
    if (a.has_bounded()) return true;
  }
  return false;
}

std::string Formula::to_string(const Alphabet& alphabet) const {
  auto atom_name = [&](int i) {
    return i >= 0 && static_cast<std::size_t>(i) < alphabet.num_atoms() ? alphabet.atoms()[i]
                                                                        : "p" + std::to_string(i);
  };
  switch (op) {
    case Op::True:
      return "true";
    case Op::Atom:
      return atom_name(atom);
    case Op::NegatedAtom:
      return "!" + atom_name(atom);
    case Op::And:
      return "(" + args[0].to_string(alphabet) + " & " + args[1].to_string(alphabet) + ")";
    case Op::Or:
      return "(" + args[0].to_string(alphabet) + " | " + args[1].to_string(alphabet) + ")";
    case Op::Until:
      return "(" + args[0].to_string(alphabet) + " U " + args[1].to_string(alphabet) + ")";
    case Op::Next:
      return "X " + args[0].to_string(alphabet);
    case Op::Eventually:
      return "F " + args[0].to_string(alphabet);
    case Op::BoundedEventually:
      return "F<=" + std::to_string(bound) + " " + args[0].to_string(alphabet);
    case Op::BoundedAlways:
      return "G<=" + std::to_string(bound) + " " + args[0].to_string(alphabet);
  }
  return "?";
}

namespace {

Formula shifted(const Formula& f, int k) {
  Formula g = f;
  for (int i = 0; i < k; ++i) g = Formula::next(std::move(g));
  return g;
}

Formula unroll(Op join, const Formula& body, int n) {
  // Right-nested: f op (X f op (... op X^n f)).
  Formula acc = shifted(body, n);
  for (int k = n - 1; k >= 0; --k) {
    acc = join == Op::And ? Formula::conj(shifted(body, k), std::move(acc))
                          : Formula::disj(shifted(body, k), std::move(acc));
  }
  return acc;
}

}  // namespace

Formula expand_bounded(const Formula& f) {
  Formula out = f;
  for (auto& a : out.args) a = expand_bounded(a);
  if (out.op == Op::BoundedAlways || out.op == Op::BoundedEventually) {
    if (out.bound < 0) throw Error("expand_bounded: negative bound " + std::to_string(out.bound));
    const Op join = out.op == Op::BoundedAlways ? Op::And : Op::Or;
    return unroll(join, out.args[0], out.bound);
  }
  return out;
}

}  // namespace rosyn::logic
