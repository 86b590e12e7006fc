#include "rosyn/abstraction/grid.hpp"

#include <algorithm>
#include <cmath>

#include "rosyn/error.hpp"

namespace rosyn::abstraction {

GridPartition::GridPartition(model::Box box, std::vector<std::size_t> counts)
    : box_(std::move(box)), counts_(std::move(counts)) {
  if (box_.lo.size() == 0 || box_.lo.size() != box_.hi.size()) throw Error("grid: box must be non-empty");
  if (counts_.size() != static_cast<std::size_t>(box_.dim())) throw DimensionError("grid: one count per axis");
  if ((box_.hi.array() <= box_.lo.array()).any()) throw Error("grid: box has an empty side");
  widths_.resize(box_.dim());
  num_cells_ = 1;
  for (Eigen::Index a = 0; a < box_.dim(); ++a) {
    if (counts_[a] == 0) throw Error("grid: counts must be >= 1");
    widths_(a) = (box_.hi(a) - box_.lo(a)) / static_cast<double>(counts_[a]);
    num_cells_ *= counts_[a];
  }
}

std::vector<std::size_t> GridPartition::multi_index(std::size_t cell) const {
  std::vector<std::size_t> m(counts_.size());
  for (std::size_t a = counts_.size(); a-- > 0;) {
    m[a] = cell % counts_[a];
    cell /= counts_[a];
  }
  return m;
}

std::size_t GridPartition::flat_index(const std::vector<std::size_t>& multi) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < counts_.size(); ++a) idx = idx * counts_[a] + multi[a];
  return idx;
}

Eigen::VectorXd GridPartition::center(std::size_t cell) const {
  const auto m = multi_index(cell);
  Eigen::VectorXd c(dim());
  for (Eigen::Index a = 0; a < dim(); ++a) c(a) = box_.lo(a) + (static_cast<double>(m[a]) + 0.5) * widths_(a);
  return c;
}

model::Box GridPartition::cell_box(std::size_t cell) const {
  const auto m = multi_index(cell);
  model::Box b{Eigen::VectorXd(dim()), Eigen::VectorXd(dim())};
  for (Eigen::Index a = 0; a < dim(); ++a) {
    b.lo(a) = box_.lo(a) + static_cast<double>(m[a]) * widths_(a);
    b.hi(a) = m[a] + 1 == counts_[a] ? box_.hi(a) : box_.lo(a) + static_cast<double>(m[a] + 1) * widths_(a);
  }
  return b;
}

long GridPartition::axis_index(Eigen::Index axis, double v) const {
  if (!(v >= box_.lo(axis) && v <= box_.hi(axis))) return -1;
  long i = static_cast<long>(std::floor((v - box_.lo(axis)) / widths_(axis)));
  return std::clamp(i, 0L, static_cast<long>(counts_[axis]) - 1);
}

std::optional<std::size_t> GridPartition::locate(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DimensionError("grid: point dimension mismatch");
  std::size_t idx = 0;
  for (Eigen::Index a = 0; a < dim(); ++a) {
    const long i = axis_index(a, x(a));
    if (i < 0) return std::nullopt;
    idx = idx * counts_[a] + static_cast<std::size_t>(i);
  }
  return idx;
}

std::optional<Eigen::VectorXd> GridPartition::snap(const Eigen::VectorXd& x) const {
  const auto cell = locate(x);
  if (!cell) return std::nullopt;
  return center(*cell);
}

}  // namespace rosyn::abstraction
