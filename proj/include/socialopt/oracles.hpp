#pragma once

#include "socialopt/constants.hpp"
#include "socialopt/smoothing.hpp"

namespace socialopt {

/// Two players, f_i = x_i^2 - 2 x_{-i} - 2 x_i theta, X_i = [2/3, 1], Theta = [0, 1].
/// `spec` uses hand-written callables; `quadratic` holds the same game as
/// quadratic forms, so the two are independent evaluation routes.
struct Example1Game {
  GameSpec spec;
  QuadraticGame quadratic;
};

Example1Game make_example1();

/// Closed-form equilibrium: both players play clamp(theta, 2/3, 1).
Vector example1_ne(double theta);

/// Closed-form social cost at the equilibrium on [0, 1]:
/// -(8/3) theta - 16/9 on [0, 2/3], -2 theta^2 - 4 theta on [2/3, 1].
double example1_social(double theta);

struct GridSearchResult {
  Vector theta_star;
  double F_star = 0.0;
  long evaluations = 0;
};

/// Brute-force minimization of theta -> social_cost(x(theta), theta) over a
/// uniform grid of theta_set, with x(theta) from centralized_ne. Ties go to the
/// lexicographically smallest grid point. Only theta dimensions 1 and 2.
GridSearchResult grid_search_theta(const GameSpec& game, const BoxSet& theta_set,
                                   long grid_points_per_dim, double ne_step, double ne_tol,
                                   long ne_max_iter = 1'000'000);

/// Central differences of the ball-smoothed value with common random numbers:
/// each ball draw nu is shared by the +h and -h evaluations of every coordinate.
SmoothedGradientEstimate fd_smoothed_gradient(const ScalarFn& F, const Vector& theta, double xi,
                                              double h, long samples, SphereSampler& sampler);

}  // namespace socialopt
