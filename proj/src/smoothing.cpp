#include "socialopt/smoothing.hpp"

#include <cmath>

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

SphereSampler::SphereSampler(Eigen::Index dim, std::uint64_t seed) : dim_(dim), rng_(seed) {
  if (dim < 1) throw ConfigError("sampler dimension must be >= 1");
}

Vector SphereSampler::sample_unit_sphere() {
  Vector g(dim_);
  double norm = 0.0;
  do {
    for (Eigen::Index j = 0; j < dim_; ++j) g[j] = rng_.normal();
    norm = g.norm();
  } while (norm == 0.0);
  return g / norm;
}

Vector SphereSampler::sample_unit_ball() {
  Vector u = sample_unit_sphere();
  const double radius = std::pow(rng_.uniform(), 1.0 / static_cast<double>(dim_));
  return radius * u;
}

void VectorAccumulator::add(const Vector& sample) {
  ++count_;
  const Vector delta = sample - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(sample - mean_);
}

SmoothedGradientEstimate VectorAccumulator::result() const {
  SmoothedGradientEstimate out;
  out.mean = mean_;
  out.samples = count_;
  if (count_ > 1) {
    const double n = static_cast<double>(count_);
    out.std_err = (m2_ / (n - 1.0) / n).cwiseSqrt();
  } else {
    out.std_err = Vector::Zero(mean_.size());
  }
  return out;
}

Vector two_point_estimate(double g_pert, double g_base, const Vector& u, double xi) {
  if (!(xi > 0.0)) throw ConfigError(fmt::format("smoothing parameter xi = {} must be positive", xi));
  const double n = static_cast<double>(u.size());
  return (n / xi) * (g_pert - g_base) * u;
}

Vector moreau_gradient(const Vector& theta, const BoxSet& theta_set, double xi) {
  if (!(xi > 0.0)) throw ConfigError(fmt::format("smoothing parameter xi = {} must be positive", xi));
  return (theta - project_box(theta, theta_set)) / xi;
}

ScalarEstimate mc_smoothed_value(const ScalarFn& F, const Vector& theta, double xi, long samples,
                                 SphereSampler& sampler) {
  if (samples < 1) throw ConfigError("need at least one Monte-Carlo sample");
  if (sampler.dim() != theta.size()) throw DimensionError("sampler and theta dimensions differ");
  VectorAccumulator acc(1);
  Vector one(1);
  for (long m = 0; m < samples; ++m) {
    one[0] = F(theta + xi * sampler.sample_unit_ball());
    acc.add(one);
  }
  const auto r = acc.result();
  return {r.mean[0], r.std_err[0], r.samples};
}

SmoothedGradientEstimate mc_stationarity(const GameSpec& game, const Vector& theta, double xi,
                                         long samples, const NEOracle& ne_oracle,
                                         SphereSampler& sampler) {
  if (samples < 1) throw ConfigError("need at least one Monte-Carlo sample");
  if (sampler.dim() != theta.size()) throw DimensionError("sampler and theta dimensions differ");
  const Vector base = player_costs(game, ne_oracle(theta), theta);
  const Vector penalty = moreau_gradient(theta, game.theta_set(), xi);
  VectorAccumulator acc(theta.size());
  for (long m = 0; m < samples; ++m) {
    const Vector u = sampler.sample_unit_sphere();
    const Vector probe = theta + xi * u;
    const Vector pert = player_costs(game, ne_oracle(probe), probe);
    Vector est = penalty;
    for (int i = 0; i < game.n_players(); ++i) est += two_point_estimate(pert[i], base[i], u, xi);
    acc.add(est);
  }
  return acc.result();
}

}  // namespace socialopt
