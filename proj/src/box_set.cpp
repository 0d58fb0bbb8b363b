#include "socialopt/box_set.hpp"

#include <cmath>

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

BoxSet::BoxSet(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw DimensionError(
        fmt::format("box bounds have sizes {} and {}", lower_.size(), upper_.size()));
  }
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] <= upper_[j])) {
      throw ConfigError(fmt::format("empty box: lower[{}] = {} > upper[{}] = {}", j, lower_[j], j,
                                    upper_[j]));
    }
  }
}

BoxSet BoxSet::uniform(Eigen::Index dim, double lo, double hi) {
  return BoxSet(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool BoxSet::contains(const Vector& point, double tol) const {
  if (point.size() != dim()) return false;
  return ((point.array() >= lower_.array() - tol) && (point.array() <= upper_.array() + tol)).all();
}

BoxSet BoxSet::inflated(double radius) const {
  return BoxSet(lower_.array() - radius, upper_.array() + radius);
}

double BoxSet::max_norm() const {
  return std::sqrt(lower_.array().square().max(upper_.array().square()).sum());
}

Vector project_box(const Vector& point, const BoxSet& set) {
  if (point.size() != set.dim()) {
    throw DimensionError(
        fmt::format("projection of a {}-vector onto a {}-dim box", point.size(), set.dim()));
  }
  return point.cwiseMax(set.lower()).cwiseMin(set.upper());
}

double distance_to_box(const Vector& point, const BoxSet& set) {
  return (point - project_box(point, set)).norm();
}

BoxSet product(const std::vector<BoxSet>& boxes) {
  Eigen::Index total = 0;
  for (const auto& b : boxes) total += b.dim();
  Vector lo(total), hi(total);
  Eigen::Index offset = 0;
  for (const auto& b : boxes) {
    lo.segment(offset, b.dim()) = b.lower();
    hi.segment(offset, b.dim()) = b.upper();
    offset += b.dim();
  }
  return BoxSet(std::move(lo), std::move(hi));
}

}  // namespace socialopt
