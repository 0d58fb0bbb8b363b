#pragma once

#include <random>

#include "socialopt/box_set.hpp"

namespace testing {

inline socialopt::Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  socialopt::Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(gen);
  return v;
}

inline socialopt::Vector random_in(std::mt19937_64& gen, const socialopt::BoxSet& box) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  socialopt::Vector v(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    v[i] = box.lower()[i] + d(gen) * (box.upper()[i] - box.lower()[i]);
  }
  return v;
}

inline socialopt::Vector vec(std::initializer_list<double> xs) {
  socialopt::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace testing
