#pragma once

#include "socialopt/game.hpp"

namespace socialopt {

/// Charging game with N vehicles. Player i (1-based) pays
///   c_i ||x_i - d_i 1||^2 + a_i 1'x_i + lambda ||x_i - xbar||^2 + r theta 1'x_i
/// with xbar the coordinate-wise average of all x_j, c_i = c_base + i,
/// d_i = target_base + target_step * i and a_i = a_base + i.
struct EVChargingParams {
  int N = 10;
  int dim = 1;  // per-player strategy dimension
  double c_base = 4.0;
  double target_base = 7.0;
  double target_step = 2.0;
  double a_base = 10.0;
  double lambda = 0.1;
  double r = 1.0;
  double x_lower = 0.0;
  double x_upper = 25.0;
  double theta_lower = 1.0;
  double theta_upper = 3.0;

  double c(int i) const { return c_base + i; }
  double target(int i) const { return target_base + target_step * i; }
  double a(int i) const { return a_base + i; }
};

/// Direct callables and the quadratic form of the same game.
struct EVGame {
  GameSpec spec;
  QuadraticGame quadratic;
};

EVGame build_ev_game(const EVChargingParams& params);

}  // namespace socialopt
