#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "rosyn/model/labelling.hpp"

namespace rosyn::abstraction {

/// Uniform rectangular partition of a box in R^{n_s}. Cell indices are
/// row-major with the last dimension varying fastest; representatives are
/// cell centers.
class GridPartition {
 public:
  GridPartition() = default;
  /// Throws Error on empty/inverted boxes or a zero count.
  GridPartition(model::Box box, std::vector<std::size_t> counts);

  const model::Box& box() const noexcept { return box_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  Eigen::Index dim() const noexcept { return box_.dim(); }
  std::size_t num_cells() const noexcept { return num_cells_; }
  /// Per-dimension cell widths, i.e. the partition diameter vector.
  const Eigen::VectorXd& diameter() const noexcept { return widths_; }

  std::vector<std::size_t> multi_index(std::size_t cell) const;
  std::size_t flat_index(const std::vector<std::size_t>& multi) const;

  Eigen::VectorXd center(std::size_t cell) const;
  model::Box cell_box(std::size_t cell) const;

  /// Cell containing x, or nullopt outside the box. Upper faces belong to
  /// the lower cell except at the outer boundary.
  std::optional<std::size_t> locate(const Eigen::VectorXd& x) const;
  /// Snapping operator: center of the containing cell.
  std::optional<Eigen::VectorXd> snap(const Eigen::VectorXd& x) const;

  /// Index along one axis for coordinate v, or -1 when outside.
  long axis_index(Eigen::Index axis, double v) const;

  bool operator==(const GridPartition& o) const { return box_ == o.box_ && counts_ == o.counts_; }

 private:
  model::Box box_;
  std::vector<std::size_t> counts_;
  Eigen::VectorXd widths_;
  std::size_t num_cells_ = 0;
};

}  // namespace rosyn::abstraction
