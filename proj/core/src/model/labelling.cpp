#include "rosyn/model/labelling.hpp"

#include <algorithm>

#include "rosyn/error.hpp"

namespace rosyn::model {

bool Box::contains(const Eigen::VectorXd& y) const {
  return (y.array() >= lo.array()).all() && (y.array() <= hi.array()).all();
}

double Box::distance(const Eigen::VectorXd& y) const {
  const Eigen::ArrayXd below = (lo - y).array().max(0.0);
  const Eigen::ArrayXd above = (y - hi).array().max(0.0);
  return (below + above).matrix().norm();
}

bool Box::contains_ball(const Eigen::VectorXd& y, double r) const {
  return ((y - lo).array() >= r).all() && ((hi - y).array() >= r).all();
}

LabellingMap::LabellingMap(Alphabet alphabet, Eigen::Index output_dim, std::vector<LabelledRegion> regions,
                           Letter default_letter)
    : alphabet_(std::move(alphabet)),
      output_dim_(output_dim),
      regions_(std::move(regions)),
      default_letter_(default_letter) {
  constexpr double tol = 1e-12;
  if (!alphabet_.contains(default_letter_)) throw Error("labelling: default letter outside 2^AP");
  for (const auto& r : regions_) {
    if (r.box.lo.size() != output_dim_ || r.box.hi.size() != output_dim_) {
      throw DimensionError("labelling: region dimension differs from output dimension");
    }
    if ((r.box.hi.array() < r.box.lo.array()).any()) throw Error("labelling: region with hi < lo");
    if (!alphabet_.contains(r.letter)) throw Error("labelling: region letter outside 2^AP");
  }
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    for (std::size_t j = i + 1; j < regions_.size(); ++j) {
      const auto& a = regions_[i].box;
      const auto& b = regions_[j].box;
      const Eigen::ArrayXd overlap = a.hi.array().min(b.hi.array()) - a.lo.array().max(b.lo.array());
      if ((overlap > tol).all()) {
        throw Error("labelling: regions " + std::to_string(i) + " and " + std::to_string(j) +
                    " have overlapping interiors");
      }
    }
  }
}

Letter LabellingMap::label_of(const Eigen::VectorXd& y) const {
  if (y.size() != output_dim_) throw DimensionError("label_of: output dimension mismatch");
  for (const auto& r : regions_) {
    if (r.box.contains(y)) return r.letter;
  }
  return default_letter_;
}

std::vector<Letter> LabellingMap::relaxed_labels(const Eigen::VectorXd& y, double eps) const {
  if (eps < 0.0) throw Error("relaxed_labels: eps must be non-negative");
  if (y.size() != output_dim_) throw DimensionError("relaxed_labels: output dimension mismatch");
  if (eps == 0.0) return {label_of(y)};
  std::vector<Letter> out;
  bool inside_one = false;
  for (const auto& r : regions_) {
    if (r.box.distance(y) <= eps) out.push_back(r.letter);
    if (r.box.contains_ball(y, eps)) inside_one = true;
  }
  if (!inside_one) out.push_back(default_letter_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace rosyn::model
