#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rosyn::abstraction {

/// Finite controlled transition kernel in compressed-row form. Row (i, j)
/// lists the successor distribution of state i under input j.
class Kernel {
 public:
  struct Entry {
    std::uint32_t target;
    double probability;
    bool operator==(const Entry&) const = default;
  };

  Kernel() = default;
  Kernel(std::size_t num_states, std::size_t num_inputs);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_inputs() const noexcept { return num_inputs_; }

  /// Rows must be appended in (state, input) order.
  void append_row(std::span<const Entry> entries);
  bool complete() const noexcept { return row_start_.size() == num_states_ * num_inputs_ + 1; }

  std::span<const Entry> row(std::size_t state, std::size_t input) const {
    const std::size_t r = state * num_inputs_ + input;
    return {entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }

  /// Dense table T[i][j][k] (testing and small instances).
  static Kernel from_dense(const std::vector<std::vector<std::vector<double>>>& t);

  /// Max over rows of |sum - 1|, and whether every entry lies in [0, 1].
  double max_row_defect() const;
  bool entries_in_unit_interval() const;

  std::size_t num_entries() const noexcept { return entries_.size(); }

  bool operator==(const Kernel&) const = default;

 private:
  std::size_t num_states_ = 0;
  std::size_t num_inputs_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<Entry> entries_;
};

}  // namespace rosyn::abstraction
