#include "rosyn/abstraction/kernel.hpp"

#include <cmath>

#include "rosyn/error.hpp"

namespace rosyn::abstraction {

Kernel::Kernel(std::size_t num_states, std::size_t num_inputs) : num_states_(num_states), num_inputs_(num_inputs) {
  if (num_states == 0 || num_inputs == 0) throw Error("kernel: need at least one state and one input");
  row_start_.reserve(num_states * num_inputs + 1);
}

void Kernel::append_row(std::span<const Entry> entries) {
  if (complete()) throw Error("kernel: all rows already present");
  for (const auto& e : entries) {
    if (e.target >= num_states_) throw Error("kernel: successor index out of range");
    entries_.push_back(e);
  }
  row_start_.push_back(entries_.size());
}

Kernel Kernel::from_dense(const std::vector<std::vector<std::vector<double>>>& t) {
  if (t.empty() || t[0].empty()) throw Error("kernel: empty dense table");
  Kernel k(t.size(), t[0].size());
  std::vector<Entry> row;
  for (const auto& per_state : t) {
    if (per_state.size() != k.num_inputs_) throw Error("kernel: ragged dense table");
    for (const auto& dist : per_state) {
      if (dist.size() != k.num_states_) throw Error("kernel: dense row has wrong length");
      row.clear();
      for (std::size_t s = 0; s < dist.size(); ++s) {
        if (dist[s] != 0.0) row.push_back({static_cast<std::uint32_t>(s), dist[s]});
      }
      k.append_row(row);
    }
  }
  return k;
}

double Kernel::max_row_defect() const {
  double worst = 0.0;
  for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) {
    double sum = 0.0;
    for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e) sum += entries_[e].probability;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

bool Kernel::entries_in_unit_interval() const {
  for (const auto& e : entries_) {
    if (!(e.probability >= 0.0 && e.probability <= 1.0)) return false;
  }
  return true;
}

}  // namespace rosyn::abstraction
