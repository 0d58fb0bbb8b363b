#pragma once

#include <vector>

#include <Eigen/Dense>

namespace socialopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box {z : lower <= z <= upper}. Nonempty by construction.
class BoxSet {
 public:
  BoxSet() = default;
  BoxSet(Vector lower, Vector upper);

  /// Same interval [lo, hi] in every one of `dim` coordinates.
  static BoxSet uniform(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Vector midpoint() const { return 0.5 * (lower_ + upper_); }
  bool contains(const Vector& point, double tol = 0.0) const;

  /// Box grown by `radius` in every coordinate. Contains the Minkowski sum
  /// of the box with a Euclidean ball of that radius.
  BoxSet inflated(double radius) const;

  /// Largest Euclidean norm over the box (attained at a corner).
  double max_norm() const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Euclidean projection onto the box (per-coordinate clamp).
Vector project_box(const Vector& point, const BoxSet& set);

/// Distance from `point` to the box.
double distance_to_box(const Vector& point, const BoxSet& set);

/// Cartesian product of boxes, stacked in order.
BoxSet product(const std::vector<BoxSet>& boxes);

}  // namespace socialopt
