#include "socialopt/game.hpp"

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

GameSpec::GameSpec(std::vector<CostFn> costs, std::vector<PartialGradFn> partial_grads,
                   std::vector<BoxSet> strategy_sets, BoxSet theta_set)
    : costs_(std::move(costs)),
      partial_grads_(std::move(partial_grads)),
      strategy_sets_(std::move(strategy_sets)),
      theta_set_(std::move(theta_set)) {
  if (costs_.empty()) throw ConfigError("game needs at least one player");
  if (partial_grads_.size() != costs_.size() || strategy_sets_.size() != costs_.size()) {
    throw ConfigError(fmt::format("game has {} costs, {} gradients and {} strategy sets",
                                  costs_.size(), partial_grads_.size(), strategy_sets_.size()));
  }
  if (theta_set_.dim() < 1) throw ConfigError("regulator decision must have dimension >= 1");
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    if (!costs_[i] || !partial_grads_[i]) {
      throw ConfigError(fmt::format("player {} has an empty cost or gradient callable", i + 1));
    }
    if (strategy_sets_[i].dim() < 1) {
      throw ConfigError(fmt::format("player {} has an empty strategy dimension", i + 1));
    }
    offsets_.push_back(total_dim_);
    total_dim_ += strategy_sets_[i].dim();
  }
  joint_set_ = product(strategy_sets_);
}

void GameSpec::check_args(const Vector& x, const Vector& theta) const {
  if (x.size() != total_dim_ || theta.size() != theta_dim()) {
    throw DimensionError(fmt::format("game expects x in R^{} and theta in R^{}, got {} and {}",
                                     total_dim_, theta_dim(), x.size(), theta.size()));
  }
}

double GameSpec::cost(int player, const Vector& x, const Vector& theta) const {
  check_args(x, theta);
  return costs_[player](x, theta);
}

Vector GameSpec::partial_gradient(int player, const Vector& x, const Vector& theta) const {
  check_args(x, theta);
  Vector g = partial_grads_[player](x, theta);
  if (g.size() != dim(player)) {
    throw DimensionError(fmt::format("player {} gradient has size {}, expected {}", player + 1,
                                     g.size(), dim(player)));
  }
  return g;
}

Vector pseudo_gradient(const GameSpec& game, const Vector& x, const Vector& theta) {
  Vector g(game.total_dim());
  for (int i = 0; i < game.n_players(); ++i) {
    g.segment(game.offset(i), game.dim(i)) = game.partial_gradient(i, x, theta);
  }
  return g;
}

double social_cost(const GameSpec& game, const Vector& x, const Vector& theta) {
  return player_costs(game, x, theta).sum();
}

Vector player_costs(const GameSpec& game, const Vector& x, const Vector& theta) {
  Vector out(game.n_players());
  for (int i = 0; i < game.n_players(); ++i) out[i] = game.cost(i, x, theta);
  return out;
}

double QuadraticCost::value(const Vector& x, const Vector& theta) const {
  return 0.5 * x.dot(P * x) + x.dot(S * theta) + q.dot(x) + w.dot(theta) + c;
}

Vector QuadraticCost::grad_x(const Vector& x, const Vector& theta) const {
  return P * x + S * theta + q;
}

Vector QuadraticCost::grad_theta(const Vector& x, const Vector& /*theta*/) const {
  return S.transpose() * x + w;
}

QuadraticGame::QuadraticGame(std::vector<QuadraticCost> costs, std::vector<BoxSet> strategy_sets,
                             BoxSet theta_set)
    : costs_(std::move(costs)),
      strategy_sets_(std::move(strategy_sets)),
      theta_set_(std::move(theta_set)) {
  if (costs_.empty() || costs_.size() != strategy_sets_.size()) {
    throw ConfigError("quadratic game needs one cost per strategy set");
  }
  Eigen::Index d = 0;
  for (const auto& s : strategy_sets_) d += s.dim();
  const Eigen::Index n = theta_set_.dim();
  M_.resize(d, d);
  T_.resize(d, n);
  r_.resize(d);
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    const auto& f = costs_[i];
    if (f.P.rows() != d || f.P.cols() != d || f.S.rows() != d || f.S.cols() != n ||
        f.q.size() != d || f.w.size() != n) {
      throw DimensionError(fmt::format("player {} quadratic cost has inconsistent shapes", i + 1));
    }
    if (!f.P.isApprox(f.P.transpose(), 1e-12)) {
      throw ConfigError(fmt::format("player {} quadratic form is not symmetric", i + 1));
    }
    const Eigen::Index di = strategy_sets_[i].dim();
    M_.middleRows(offset, di) = f.P.middleRows(offset, di);
    T_.middleRows(offset, di) = f.S.middleRows(offset, di);
    r_.segment(offset, di) = f.q.segment(offset, di);
    offset += di;
  }
}

GameSpec QuadraticGame::to_game_spec() const {
  std::vector<CostFn> costs;
  std::vector<PartialGradFn> grads;
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    const QuadraticCost f = costs_[i];
    const Eigen::Index di = strategy_sets_[i].dim();
    costs.emplace_back([f](const Vector& x, const Vector& th) { return f.value(x, th); });
    grads.emplace_back([f, offset, di](const Vector& x, const Vector& th) -> Vector {
      return f.P.middleRows(offset, di) * x + f.S.middleRows(offset, di) * th +
             f.q.segment(offset, di);
    });
    offset += di;
  }
  return GameSpec(std::move(costs), std::move(grads), strategy_sets_, theta_set_);
}

}  // namespace socialopt
