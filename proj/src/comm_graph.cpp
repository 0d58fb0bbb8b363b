#include "socialopt/comm_graph.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "socialopt/errors.hpp"
#include "socialopt/rng.hpp"

namespace socialopt {

CommGraph::CommGraph(Matrix adjacency, double tol) : adjacency_(std::move(adjacency)) {
  const auto n = adjacency_.rows();
  if (n < 1 || adjacency_.cols() != n) {
    throw DimensionError(
        fmt::format("adjacency must be square, got {}x{}", adjacency_.rows(), adjacency_.cols()));
  }
  if ((adjacency_.array() < 0.0).any()) throw ConfigError("adjacency has negative entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(adjacency_(i, i) > 0.0)) {
      throw ConfigError(fmt::format("self-weight a_{0}{0} must be positive", i + 1));
    }
    const double row = adjacency_.row(i).sum();
    const double col = adjacency_.col(i).sum();
    if (std::abs(row - 1.0) > tol || std::abs(col - 1.0) > tol) {
      throw ConfigError(fmt::format(
          "adjacency is not doubly stochastic: row {0} sums to {1:.17g}, column {0} to {2:.17g}",
          i + 1, row, col));
    }
  }
  if (!strongly_connected(adjacency_)) throw ConfigError("communication graph is not strongly connected");
  sigma_bar_ = second_singular_value(adjacency_);
  if (!(sigma_bar_ < 1.0)) {
    throw ConfigError(fmt::format("second singular value {} is not below 1", sigma_bar_));
  }
}

double second_singular_value(const Matrix& a) {
  if (a.rows() < 2) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  // singular values come sorted in decreasing order
  return svd.singularValues()[1];
}

bool strongly_connected(const Matrix& a) {
  const auto n = a.rows();
  for (Eigen::Index src = 0; src < n; ++src) {
    std::vector<bool> seen(n, false);
    std::deque<Eigen::Index> frontier{src};
    seen[src] = true;
    Eigen::Index count = 1;
    while (!frontier.empty()) {
      const auto v = frontier.front();
      frontier.pop_front();
      // a_ij > 0 means j sends to i
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!seen[i] && a(i, v) > 0.0) {
          seen[i] = true;
          ++count;
          frontier.push_back(i);
        }
      }
    }
    if (count != n) return false;
  }
  return true;
}

Matrix metropolis_weights(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& edges) {
  const auto n = edges.rows();
  Eigen::VectorXi degree = Eigen::VectorXi::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && edges(i, j)) ++degree[i];

  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && edges(i, j)) {
        a(i, j) = 1.0 / (1.0 + std::max(degree[i], degree[j]));
        off += a(i, j);
      }
    }
    a(i, i) = 1.0 - off;
  }
  return a;
}

CommGraph metropolis_graph(int n_players, double edge_probability, std::uint64_t seed,
                           int max_retries) {
  if (n_players < 1) throw ConfigError("graph needs at least one node");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw ConfigError(fmt::format("edge probability {} outside (0, 1]", edge_probability));
  }
  CounterRng rng(seed);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> edges(n_players, n_players);
    edges.setConstant(false);
    for (int i = 0; i < n_players; ++i) {
      for (int j = i + 1; j < n_players; ++j) {
        const bool link = rng.uniform() < edge_probability;
        edges(i, j) = link;
        edges(j, i) = link;
      }
    }
    Matrix a = metropolis_weights(edges);
    if (strongly_connected(a)) return CommGraph(std::move(a));
  }
  throw ConfigError(fmt::format("no strongly connected graph after {} draws (N = {}, p = {})",
                                max_retries, n_players, edge_probability));
}

CommGraph complete_graph(int n_players) {
  if (n_players < 1) throw ConfigError("graph needs at least one node");
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> edges(n_players, n_players);
  edges.setConstant(true);
  return CommGraph(metropolis_weights(edges));
}

}  // namespace socialopt
