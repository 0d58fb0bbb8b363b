#include "socialopt/ev_charging.hpp"

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

namespace {

void validate(const EVChargingParams& p) {
  if (p.N < 1) throw ConfigError(fmt::format("EV game needs N >= 1, got {}", p.N));
  if (p.dim < 1) throw ConfigError(fmt::format("EV strategy dimension must be >= 1, got {}", p.dim));
  if (p.lambda < 0.0) throw ConfigError("EV lambda must be nonnegative");
  for (int i = 1; i <= p.N; ++i) {
    if (!(p.c(i) > 0.0)) throw ConfigError(fmt::format("EV c_{} must be positive", i));
  }
  if (!(p.x_lower <= p.x_upper)) throw ConfigError("EV strategy bounds are inverted");
  if (!(p.theta_lower <= p.theta_upper)) throw ConfigError("EV theta bounds are inverted");
}

Vector average(const Vector& x, int N, int dim) {
  Vector avg = Vector::Zero(dim);
  for (int j = 0; j < N; ++j) avg += x.segment(static_cast<Eigen::Index>(j) * dim, dim);
  return avg / static_cast<double>(N);
}

GameSpec direct_spec(const EVChargingParams& p) {
  std::vector<CostFn> costs;
  std::vector<PartialGradFn> grads;
  const int N = p.N;
  const int d = p.dim;
  for (int idx = 0; idx < N; ++idx) {
    const int i = idx + 1;
    const double c = p.c(i), target = p.target(i), a = p.a(i), lambda = p.lambda, r = p.r;
    const Eigen::Index off = static_cast<Eigen::Index>(idx) * d;
    costs.emplace_back([=](const Vector& x, const Vector& th) {
      const Vector xi = x.segment(off, d);
      const Vector xbar = average(x, N, d);
      return c * (xi.array() - target).matrix().squaredNorm() + a * xi.sum() +
             lambda * (xi - xbar).squaredNorm() + r * th[0] * xi.sum();
    });
    grads.emplace_back([=](const Vector& x, const Vector& th) {
      const Vector xi = x.segment(off, d);
      const Vector xbar = average(x, N, d);
      const double shrink = 1.0 - 1.0 / static_cast<double>(N);
      Vector g = 2.0 * c * (xi.array() - target).matrix() + 2.0 * lambda * shrink * (xi - xbar);
      g.array() += a + r * th[0];
      return g;
    });
  }
  std::vector<BoxSet> sets(N, BoxSet::uniform(d, p.x_lower, p.x_upper));
  return GameSpec(std::move(costs), std::move(grads), std::move(sets),
                  BoxSet::uniform(1, p.theta_lower, p.theta_upper));
}

QuadraticGame quadratic_form(const EVChargingParams& p) {
  const int N = p.N;
  const int d = p.dim;
  const Eigen::Index total = static_cast<Eigen::Index>(N) * d;
  Matrix mean_sel = Matrix::Zero(d, total);
  for (int j = 0; j < N; ++j) mean_sel.middleCols(static_cast<Eigen::Index>(j) * d, d).setIdentity();
  mean_sel /= static_cast<double>(N);

  std::vector<QuadraticCost> costs;
  for (int idx = 0; idx < N; ++idx) {
    const int i = idx + 1;
    Matrix E = Matrix::Zero(d, total);
    E.middleCols(static_cast<Eigen::Index>(idx) * d, d).setIdentity();
    const Matrix D = E - mean_sel;
    const Vector ones = Vector::Ones(d);
    QuadraticCost f;
    f.P = 2.0 * p.c(i) * E.transpose() * E + 2.0 * p.lambda * D.transpose() * D;
    f.S = p.r * E.transpose() * ones;
    f.q = (p.a(i) - 2.0 * p.c(i) * p.target(i)) * E.transpose() * ones;
    f.w = Vector::Zero(1);
    f.c = p.c(i) * p.target(i) * p.target(i) * d;
    costs.push_back(std::move(f));
  }
  std::vector<BoxSet> sets(N, BoxSet::uniform(d, p.x_lower, p.x_upper));
  return QuadraticGame(std::move(costs), std::move(sets),
                       BoxSet::uniform(1, p.theta_lower, p.theta_upper));
}

}  // namespace

EVGame build_ev_game(const EVChargingParams& params) {
  validate(params);
  return {direct_spec(params), quadratic_form(params)};
}

}  // namespace socialopt
