#pragma once

#include <functional>
#include <vector>

#include "socialopt/box_set.hpp"

namespace socialopt {

/// f_i(x, theta) for the joint strategy x and regulator decision theta.
using CostFn = std::function<double(const Vector& x, const Vector& theta)>;
/// Gradient of f_i with respect to player i's own block x_i.
using PartialGradFn = std::function<Vector(const Vector& x, const Vector& theta)>;

/// N-player game parametrized by the regulator decision theta.
///
/// Player i owns the block of the joint strategy starting at offset(i) with
/// length dim(i). Immutable after construction.
class GameSpec {
 public:
  GameSpec(std::vector<CostFn> costs, std::vector<PartialGradFn> partial_grads,
           std::vector<BoxSet> strategy_sets, BoxSet theta_set);

  int n_players() const { return static_cast<int>(costs_.size()); }
  Eigen::Index dim(int player) const { return strategy_sets_[player].dim(); }
  Eigen::Index offset(int player) const { return offsets_[player]; }
  Eigen::Index total_dim() const { return total_dim_; }
  Eigen::Index theta_dim() const { return theta_set_.dim(); }

  const std::vector<BoxSet>& strategy_sets() const { return strategy_sets_; }
  const BoxSet& joint_strategy_set() const { return joint_set_; }
  const BoxSet& theta_set() const { return theta_set_; }

  double cost(int player, const Vector& x, const Vector& theta) const;
  Vector partial_gradient(int player, const Vector& x, const Vector& theta) const;

  /// Player i's own block of a joint vector.
  auto block(const Vector& x, int player) const { return x.segment(offsets_[player], dim(player)); }

 private:
  void check_args(const Vector& x, const Vector& theta) const;

  std::vector<CostFn> costs_;
  std::vector<PartialGradFn> partial_grads_;
  std::vector<BoxSet> strategy_sets_;
  BoxSet theta_set_;
  BoxSet joint_set_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_dim_ = 0;
};

/// Stacked partial gradients col{grad_i f_i(x, theta)}.
Vector pseudo_gradient(const GameSpec& game, const Vector& x, const Vector& theta);

/// Sum over players of f_i(x, theta).
double social_cost(const GameSpec& game, const Vector& x, const Vector& theta);

/// Per-player costs f_1..f_N at (x, theta).
Vector player_costs(const GameSpec& game, const Vector& x, const Vector& theta);

/// f(x, theta) = 1/2 x'Px + x'S theta + q'x + w'theta + c over the joint strategy x.
struct QuadraticCost {
  Matrix P;  // d x d, symmetric
  Matrix S;  // d x n
  Vector q;  // d
  Vector w;  // n
  double c = 0.0;

  double value(const Vector& x, const Vector& theta) const;
  /// Gradient with respect to the whole joint strategy.
  Vector grad_x(const Vector& x, const Vector& theta) const;
  Vector grad_theta(const Vector& x, const Vector& theta) const;
};

/// Game whose costs are quadratic, so that the pseudo-gradient is the affine
/// map G(x, theta) = M x + T theta + r.
class QuadraticGame {
 public:
  QuadraticGame(std::vector<QuadraticCost> costs, std::vector<BoxSet> strategy_sets,
                BoxSet theta_set);

  int n_players() const { return static_cast<int>(costs_.size()); }
  Eigen::Index total_dim() const { return M_.rows(); }
  Eigen::Index theta_dim() const { return T_.cols(); }

  const Matrix& M() const { return M_; }
  const Matrix& T() const { return T_; }
  const Vector& r() const { return r_; }
  const std::vector<QuadraticCost>& costs() const { return costs_; }
  const std::vector<BoxSet>& strategy_sets() const { return strategy_sets_; }
  const BoxSet& theta_set() const { return theta_set_; }

  Vector pseudo_gradient(const Vector& x, const Vector& theta) const {
    return M_ * x + T_ * theta + r_;
  }

  /// GameSpec whose callables evaluate the per-player quadratic forms.
  GameSpec to_game_spec() const;

 private:
  std::vector<QuadraticCost> costs_;
  std::vector<BoxSet> strategy_sets_;
  BoxSet theta_set_;
  Matrix M_;
  Matrix T_;
  Vector r_;
};

}  // namespace socialopt
