#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rosyn/alphabet.hpp"

namespace rosyn::logic {

using Location = std::uint32_t;

/// Deterministic finite automaton over Σ = 2^AP with a total transition table.
///
/// Accepting locations are absorbing: the constructor rewires every outgoing
/// edge of an accepting location to a self-loop, so reaching F once decides
/// acceptance for all extensions.
class Dfa {
 public:
  Dfa() = default;
  /// `table[q * |Σ| + letter]` is the successor of q on `letter`.
  Dfa(Alphabet alphabet, std::size_t num_locations, Location initial, std::vector<bool> accepting,
      std::vector<Location> table);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t num_locations() const noexcept { return num_locations_; }
  std::size_t num_letters() const noexcept { return alphabet_.num_letters(); }
  Location initial() const noexcept { return initial_; }
  bool is_accepting(Location q) const { return accepting_.at(q); }
  const std::vector<bool>& accepting() const noexcept { return accepting_; }

  /// t(q, letter); throws when the letter is outside Σ or q is invalid.
  Location step(Location q, Letter letter) const;
  Location step_unchecked(Location q, Letter letter) const noexcept {
    return table_[static_cast<std::size_t>(q) * num_letters() + letter];
  }

  /// True iff the run from the initial location visits an accepting location.
  bool accepts(std::span<const Letter> word) const;

  /// True iff some accepting location is reachable from the initial one.
  bool can_accept() const;

  const std::vector<Location>& table() const noexcept { return table_; }

  bool operator==(const Dfa&) const = default;

 private:
  Alphabet alphabet_;
  std::size_t num_locations_ = 0;
  Location initial_ = 0;
  std::vector<bool> accepting_;
  std::vector<Location> table_;
};

}  // namespace rosyn::logic
