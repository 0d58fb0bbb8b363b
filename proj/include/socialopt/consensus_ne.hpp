#pragma once

#include <functional>
#include <optional>

#include "socialopt/comm_graph.hpp"
#include "socialopt/constants.hpp"
#include "socialopt/game.hpp"

namespace socialopt {

/// Per-player estimates of the joint strategy. Row i is player i's estimate
/// of the whole vector; its own block is player i's actual strategy.
struct EstimateState {
  Matrix estimates;  // N x d
  long iteration = 0;

  /// Row concatenation, the stacked vector in R^{Nd}.
  Vector stacked() const;
};

/// Cold start: every row equals the midpoint of the joint strategy box.
EstimateState default_init(const GameSpec& game);

/// Contraction factor and strategy bound used to certify the inner accuracy.
struct InnerCertificate {
  double q = 1.0;
  double B_X = 0.0;
};

struct NEResult {
  Vector x;                      // own blocks, col{x_i}
  double residual = 0.0;         // natural-map residual of x
  long iterations = 0;
  double epsilon_bound = 0.0;    // +inf when no certificate applies
  double consensus_gap = 0.0;    // max_{i,j} ||x_i - x_j|| over estimate rows
  EstimateState final_state;
};

/// Largest admissible inner step for the linear-rate certificate:
/// min{1, sigma/(3l), 2mu/l^2, 2mu(1-sigma^2)/a}. For sigma_bar < 1e-12 the
/// consensus terms are dropped and the result is min{1, 2mu/l^2}. The
/// certificate needs gamma strictly below this value.
double gamma_bound(const GameConstants& constants, double sigma_bar);

/// Spectral norm of the symmetric 2x2 contraction matrix Q_gamma. May be >= 1
/// when gamma is too large; callers decide.
double q_factor(double gamma, const GameConstants& constants, int n_players, double sigma_bar);

/// 2 (||x_0||^2 + N B_X^2) q^t. Throws ConfigError if q >= 1.
double epsilon_bound(double init_norm_sq, int n_players, double B_X, double q, long t);

/// ||x - Pi_X(x - probe * G(x, theta))||, zero exactly at the equilibrium.
double ne_residual(const GameSpec& game, const Vector& x, const Vector& theta,
                   double gamma_probe = 1.0);

/// Called after every round with the round index t (1-based) and estimates.
using RoundObserver = std::function<void(long t, const Matrix& estimates)>;

/// Synchronous distributed NE seeking under partial-decision information:
/// consensus on the estimates, then a projected partial-gradient step on the
/// own block. Runs exactly `t_max` rounds from `init`.
NEResult ne_seek(const GameSpec& game, const CommGraph& graph, const Vector& theta, double gamma,
                 long t_max, const EstimateState& init,
                 const std::optional<InnerCertificate>& certificate = std::nullopt,
                 const RoundObserver& observer = {});

/// Full-information projected pseudo-gradient iteration x <- Pi_X(x - step G(x, theta)),
/// stopped when the residual (probe = step) drops to `tol`.
Vector centralized_ne(const GameSpec& game, const Vector& theta, double step, double tol,
                      long max_iter, const std::optional<Vector>& start = std::nullopt);

/// Step min(1, mu / l^2).
double centralized_step(const GameConstants& constants);

}  // namespace socialopt
