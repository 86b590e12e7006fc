#include "rosyn/logic/dfa.hpp"

#include <string>

#include "rosyn/error.hpp"

namespace rosyn::logic {

Dfa::Dfa(Alphabet alphabet, std::size_t num_locations, Location initial, std::vector<bool> accepting,
         std::vector<Location> table)
    : alphabet_(std::move(alphabet)),
      num_locations_(num_locations),
      initial_(initial),
      accepting_(std::move(accepting)),
      table_(std::move(table)) {
  const std::size_t sigma = alphabet_.num_letters();
  if (num_locations_ == 0) throw Error("dfa: at least one location is required");
  if (initial_ >= num_locations_) throw Error("dfa: initial location out of range");
  if (accepting_.size() != num_locations_) throw Error("dfa: accepting flags size mismatch");
  if (table_.size() != num_locations_ * sigma) {
    throw Error("dfa: transition table must be total (" + std::to_string(num_locations_ * sigma) +
                " entries expected, got " + std::to_string(table_.size()) + ")");
  }
  for (Location t : table_) {
    if (t >= num_locations_) throw Error("dfa: transition target out of range");
  }
  for (std::size_t q = 0; q < num_locations_; ++q) {
    if (!accepting_[q]) continue;
    for (std::size_t a = 0; a < sigma; ++a) table_[q * sigma + a] = static_cast<Location>(q);
  }
}

Location Dfa::step(Location q, Letter letter) const {
  if (q >= num_locations_) throw Error("dfa: location out of range");
  if (!alphabet_.contains(letter)) throw Error("dfa: letter outside the alphabet");
  return step_unchecked(q, letter);
}

bool Dfa::accepts(std::span<const Letter> word) const {
  Location q = initial_;
  if (accepting_[q]) return true;
  for (Letter l : word) {
    q = step(q, l);
    if (accepting_[q]) return true;
  }
  return false;
}

bool Dfa::can_accept() const {
  std::vector<bool> seen(num_locations_, false);
  std::vector<Location> stack{initial_};
  seen[initial_] = true;
  while (!stack.empty()) {
    const Location q = stack.back();
    stack.pop_back();
    if (accepting_[q]) return true;
    for (std::size_t a = 0; a < num_letters(); ++a) {
      const Location t = step_unchecked(q, static_cast<Letter>(a));
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
    }
  }
  return false;
}

}  // namespace rosyn::logic
