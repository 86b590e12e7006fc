#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "rosyn/alphabet.hpp"

namespace rosyn::model {

/// Closed axis-aligned box [lo, hi] in R^p.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::Index dim() const { return lo.size(); }
  bool contains(const Eigen::VectorXd& y) const;
  /// Euclidean distance from y to the box (0 inside).
  double distance(const Eigen::VectorXd& y) const;
  /// True when the closed ball B(y, r) lies inside the box.
  bool contains_ball(const Eigen::VectorXd& y, double r) const;
  Eigen::VectorXd widths() const { return hi - lo; }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }

  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

struct LabelledRegion {
  Box box;
  Letter letter = 0;
};

/// Output labelling L : Y -> 2^AP by disjoint closed rectangles.
///
/// Rectangles may touch; a shared boundary point belongs to the region with
/// the lower index. Points outside every rectangle get `default_letter`.
class LabellingMap {
 public:
  LabellingMap() = default;
  /// Throws on dimension mismatch, letters outside 2^AP, inverted boxes or
  /// overlapping interiors (tolerance 1e-12).
  LabellingMap(Alphabet alphabet, Eigen::Index output_dim, std::vector<LabelledRegion> regions,
               Letter default_letter = 0);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  Eigen::Index output_dim() const noexcept { return output_dim_; }
  const std::vector<LabelledRegion>& regions() const noexcept { return regions_; }
  Letter default_letter() const noexcept { return default_letter_; }

  Letter label_of(const Eigen::VectorXd& y) const;

  /// Letters of all points within distance eps of y, sorted ascending.
  /// The default letter is included unless the ball fits inside one region.
  std::vector<Letter> relaxed_labels(const Eigen::VectorXd& y, double eps) const;

  bool operator==(const LabellingMap& o) const {
    return alphabet_ == o.alphabet_ && output_dim_ == o.output_dim_ && default_letter_ == o.default_letter_ &&
           regions_.size() == o.regions_.size() &&
           std::equal(regions_.begin(), regions_.end(), o.regions_.begin(),
                      [](const auto& a, const auto& b) { return a.box == b.box && a.letter == b.letter; });
  }

 private:
  Alphabet alphabet_;
  Eigen::Index output_dim_ = 0;
  std::vector<LabelledRegion> regions_;
  Letter default_letter_ = 0;
};

}  // namespace rosyn::model
