#include "socialopt/oracles.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "socialopt/consensus_ne.hpp"
#include "socialopt/errors.hpp"

namespace socialopt {

namespace {

constexpr double kLow = 2.0 / 3.0;

GameSpec example1_spec() {
  std::vector<CostFn> costs;
  std::vector<PartialGradFn> grads;
  for (int i = 0; i < 2; ++i) {
    const int other = 1 - i;
    costs.emplace_back([i, other](const Vector& x, const Vector& th) {
      return x[i] * x[i] - 2.0 * x[other] - 2.0 * x[i] * th[0];
    });
    grads.emplace_back([i](const Vector& x, const Vector& th) {
      Vector g(1);
      g[0] = 2.0 * x[i] - 2.0 * th[0];
      return g;
    });
  }
  std::vector<BoxSet> sets(2, BoxSet::uniform(1, kLow, 1.0));
  return GameSpec(std::move(costs), std::move(grads), std::move(sets), BoxSet::uniform(1, 0.0, 1.0));
}

QuadraticGame example1_quadratic() {
  std::vector<QuadraticCost> costs;
  for (int i = 0; i < 2; ++i) {
    QuadraticCost f;
    f.P = Matrix::Zero(2, 2);
    f.P(i, i) = 2.0;
    f.S = Matrix::Zero(2, 1);
    f.S(i, 0) = -2.0;
    f.q = Vector::Zero(2);
    f.q[1 - i] = -2.0;
    f.w = Vector::Zero(1);
    costs.push_back(f);
  }
  std::vector<BoxSet> sets(2, BoxSet::uniform(1, kLow, 1.0));
  return QuadraticGame(std::move(costs), std::move(sets), BoxSet::uniform(1, 0.0, 1.0));
}

}  // namespace

Example1Game make_example1() { return {example1_spec(), example1_quadratic()}; }

Vector example1_ne(double theta) { return Vector::Constant(2, std::clamp(theta, kLow, 1.0)); }

double example1_social(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw ConfigError(fmt::format("closed-form social cost defined on [0, 1], got {}", theta));
  }
  if (theta <= kLow) return -(8.0 / 3.0) * theta - 16.0 / 9.0;
  return -2.0 * theta * theta - 4.0 * theta;
}

GridSearchResult grid_search_theta(const GameSpec& game, const BoxSet& theta_set,
                                   long grid_points_per_dim, double ne_step, double ne_tol,
                                   long ne_max_iter) {
  const Eigen::Index n = theta_set.dim();
  if (n < 1 || n > 2) {
    throw ConfigError(fmt::format("grid search supports theta dimension 1 or 2, got {}", n));
  }
  if (grid_points_per_dim < 2) throw ConfigError("grid needs at least 2 points per dimension");
  const auto coord = [&](Eigen::Index j, long idx) {
    const double t = static_cast<double>(idx) / static_cast<double>(grid_points_per_dim - 1);
    return theta_set.lower()[j] + t * (theta_set.upper()[j] - theta_set.lower()[j]);
  };

  GridSearchResult best;
  best.F_star = std::numeric_limits<double>::infinity();
  const long outer = grid_points_per_dim;
  const long inner = n == 2 ? grid_points_per_dim : 1;
  // Lexicographic order: first coordinate outermost, strict improvement only.
  for (long a = 0; a < outer; ++a) {
    for (long b = 0; b < inner; ++b) {
      Vector theta(n);
      theta[0] = coord(0, a);
      if (n == 2) theta[1] = coord(1, b);
      Vector x;
      try {
        x = centralized_ne(game, theta, ne_step, ne_tol, ne_max_iter);
      } catch (const DivergenceError& e) {
        throw DivergenceError(fmt::format("grid search failed at theta[0] = {}: {}", theta[0], e.what()),
                              e.iteration());
      }
      const double F = social_cost(game, x, theta);
      ++best.evaluations;
      if (F < best.F_star) {
        best.F_star = F;
        best.theta_star = theta;
      }
    }
  }
  return best;
}

SmoothedGradientEstimate fd_smoothed_gradient(const ScalarFn& F, const Vector& theta, double xi,
                                              double h, long samples, SphereSampler& sampler) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (samples < 1) throw ConfigError("need at least one Monte-Carlo sample");
  const Eigen::Index n = theta.size();
  VectorAccumulator acc(n);
  Vector diff(n);
  for (long m = 0; m < samples; ++m) {
    const Vector shifted = theta + xi * sampler.sample_unit_ball();
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector plus = shifted;
      Vector minus = shifted;
      plus[j] += h;
      minus[j] -= h;
      diff[j] = (F(plus) - F(minus)) / (2.0 * h);
    }
    acc.add(diff);
  }
  return acc.result();
}

}  // namespace socialopt
