#pragma once

#include <cstdint>

#include "socialopt/box_set.hpp"

namespace socialopt {

/// Doubly stochastic, strongly connected communication graph with positive
/// self-weights. Construction validates all of that and caches the second
/// largest singular value of the adjacency matrix.
class CommGraph {
 public:
  explicit CommGraph(Matrix adjacency, double tol = 1e-12);

  int n_nodes() const { return static_cast<int>(adjacency_.rows()); }
  const Matrix& adjacency() const { return adjacency_; }
  double sigma_bar() const { return sigma_bar_; }

 private:
  Matrix adjacency_;
  double sigma_bar_ = 0.0;
};

/// Second largest singular value (0 for a 1x1 matrix).
double second_singular_value(const Matrix& a);

/// True when every node reaches every other node along positive entries,
/// checked by breadth-first reachability from each node.
bool strongly_connected(const Matrix& a);

/// Metropolis weights a_ij = 1 / (1 + max(deg_i, deg_j)) on an undirected edge set.
Matrix metropolis_weights(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& edges);

/// Erdos-Renyi edge set with probability `edge_probability`, resampled until
/// connected (at most `max_retries` draws), weighted by the Metropolis rule.
CommGraph metropolis_graph(int n_players, double edge_probability, std::uint64_t seed,
                           int max_retries = 1000);

/// Complete graph with Metropolis weights (every entry 1/N).
CommGraph complete_graph(int n_players);

}  // namespace socialopt
