#pragma once

#include <functional>

#include "socialopt/game.hpp"
#include "socialopt/rng.hpp"

namespace socialopt {

/// Draws directions uniformly on the unit sphere S^{n-1} and points uniformly
/// in the unit ball of R^n. Single-owner mutable state.
class SphereSampler {
 public:
  SphereSampler(Eigen::Index dim, std::uint64_t seed);

  Eigen::Index dim() const { return dim_; }
  const CounterRng& rng() const { return rng_; }

  Vector sample_unit_sphere();
  Vector sample_unit_ball();

 private:
  Eigen::Index dim_;
  CounterRng rng_;
};

/// Monte-Carlo mean with per-coordinate standard errors.
struct SmoothedGradientEstimate {
  Vector mean;
  Vector std_err;
  long samples = 0;
};

struct ScalarEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  long samples = 0;
};

/// Running mean / variance accumulator (Welford) for vector samples.
class VectorAccumulator {
 public:
  explicit VectorAccumulator(Eigen::Index dim) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}
  void add(const Vector& sample);
  SmoothedGradientEstimate result() const;

 private:
  long count_ = 0;
  Vector mean_;
  Vector m2_;
};

/// (n / xi) (g_pert - g_base) u with n = dim(u).
Vector two_point_estimate(double g_pert, double g_base, const Vector& u, double xi);

/// Gradient of the Moreau envelope of the indicator of theta_set:
/// (theta - Pi(theta)) / xi.
Vector moreau_gradient(const Vector& theta, const BoxSet& theta_set, double xi);

using ScalarFn = std::function<double(const Vector& theta)>;
/// Exact equilibrium map theta -> x(theta).
using NEOracle = std::function<Vector(const Vector& theta)>;

/// Ball-smoothed value E[F(theta + xi nu)] estimated with `samples` draws.
ScalarEstimate mc_smoothed_value(const ScalarFn& F, const Vector& theta, double xi, long samples,
                                 SphereSampler& sampler);

/// Monte-Carlo estimate of the gradient of the smoothed penalized objective,
/// sum_i E_u[(n/xi)(F_i(theta + xi u) - F_i(theta)) u] + moreau_gradient,
/// with F_i evaluated at the exact equilibrium from `ne_oracle`.
SmoothedGradientEstimate mc_stationarity(const GameSpec& game, const Vector& theta, double xi,
                                         long samples, const NEOracle& ne_oracle,
                                         SphereSampler& sampler);

}  // namespace socialopt
