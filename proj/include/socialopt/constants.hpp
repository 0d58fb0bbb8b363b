#pragma once

#include "socialopt/game.hpp"

namespace socialopt {

/// Monotonicity and Lipschitz constants of a game, plus the composite
/// Lipschitz constant of the equilibrium cost map theta -> f_i(x(theta), theta).
struct GameConstants {
  double mu = 0.0;        // strong monotonicity of the pseudo-gradient
  double l = 0.0;         // Lipschitz constant of the pseudo-gradient in x
  double l_prime = 0.0;   // Lipschitz constant of the extended pseudo-gradient
  double l_theta = 0.0;   // Lipschitz constant of the pseudo-gradient in theta
  double L_x = 0.0;       // Lipschitz constant of each cost in x over X
  double L_theta = 0.0;   // Lipschitz constant of each cost in theta
  double B_X = 0.0;       // bound on ||x|| over X
  double L_F = 0.0;       // L_x * l_theta / mu + L_theta
};

/// L_F = L_x * l_theta / mu + L_theta.
double composite_lipschitz(double L_x, double l_theta, double mu, double L_theta);

/// Corner dimension up to which affine gradient norms are maximized by exact
/// enumeration of the box corners.
inline constexpr Eigen::Index kExactCornerLimit = 20;

/// max over z in box of ||A z + b||. Exact corner enumeration when the box
/// dimension is at most kExactCornerLimit, otherwise the coordinate-wise upper
/// bound sqrt(sum_k max_z |a_k'z + b_k|^2).
double max_affine_norm(const Matrix& A, const Vector& b, const BoxSet& box);

/// Constants of a quadratic game. Cost Lipschitz constants are certified over
/// X and over theta_set inflated by `theta_probe_radius`.
GameConstants estimate_constants(const QuadraticGame& game, double theta_probe_radius);

}  // namespace socialopt
