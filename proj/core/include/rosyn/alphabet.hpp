#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rosyn {

/// A letter of Σ = 2^AP, encoded as a bitmask over atom indices.
using Letter = std::uint32_t;

/// Ordered atomic propositions. Letters are subsets of these atoms.
class Alphabet {
 public:
  static constexpr std::size_t kMaxAtoms = 16;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> atoms);

  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  std::size_t num_letters() const noexcept { return std::size_t{1} << atoms_.size(); }
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }

  /// Index of the named atom, or -1.
  int index_of(const std::string& name) const;
  bool contains(Letter letter) const noexcept { return letter < num_letters(); }

  /// Letter containing exactly the named atoms; throws on unknown names.
  Letter letter(const std::vector<std::string>& names) const;
  /// Atom names of a letter in alphabet order.
  std::vector<std::string> names(Letter letter) const;
  /// "{a,b}" style rendering.
  std::string to_string(Letter letter) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> atoms_;
};

}  // namespace rosyn
