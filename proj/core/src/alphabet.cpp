#include "rosyn/alphabet.hpp"

#include <algorithm>
#include <set>

#include "rosyn/error.hpp"

namespace rosyn {

Alphabet::Alphabet(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() > kMaxAtoms) {
    throw ResourceError("alphabet: at most 16 atomic propositions are supported");
  }
  std::set<std::string> seen;
  for (const auto& a : atoms_) {
    if (a.empty()) throw Error("alphabet: empty atom name");
    if (!seen.insert(a).second) throw Error("alphabet: duplicate atom '" + a + "'");
  }
}

int Alphabet::index_of(const std::string& name) const {
  const auto it = std::find(atoms_.begin(), atoms_.end(), name);
  return it == atoms_.end() ? -1 : static_cast<int>(it - atoms_.begin());
}

Letter Alphabet::letter(const std::vector<std::string>& names) const {
  Letter l = 0;
  for (const auto& n : names) {
    const int i = index_of(n);
    if (i < 0) throw Error("alphabet: unknown atom '" + n + "'");
    l |= Letter{1} << i;
  }
  return l;
}

std::vector<std::string> Alphabet::names(Letter letter) const {
  if (!contains(letter)) throw Error("alphabet: letter outside 2^AP");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (letter & (Letter{1} << i)) out.push_back(atoms_[i]);
  }
  return out;
}

std::string Alphabet::to_string(Letter letter) const {
  std::string s = "{";
  bool first = true;
  for (const auto& n : names(letter)) {
    if (!first) s += ",";
    s += n;
    first = false;
  }
  return s + "}";
}

}  // namespace rosyn
