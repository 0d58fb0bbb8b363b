#include <doctest.h>

#include "helpers.hpp"
#include "socialopt/errors.hpp"
#include "socialopt/oracles.hpp"

using namespace socialopt;
using testing::vec;

TEST_CASE("sphere draws are unit vectors with the right moments") {
  const int n = 3;
  const long m = 100000;
  SphereSampler s(n, 1);
  Vector mean = Vector::Zero(n);
  Matrix second = Matrix::Zero(n, n);
  for (long k = 0; k < m; ++k) {
    const Vector u = s.sample_unit_sphere();
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    mean += u;
    second += u * u.transpose();
  }
  mean /= static_cast<double>(m);
  second /= static_cast<double>(m);
  CHECK(mean.cwiseAbs().maxCoeff() <= 4.0 / std::sqrt(static_cast<double>(m)));
  // Var(u_i^2) = E u_i^4 - 1/n^2 = 3/(n(n+2)) - 1/n^2; off-diagonal Var = 1/(n(n+2)).
  const double se_diag = std::sqrt((3.0 / (n * (n + 2.0)) - 1.0 / (n * n)) / m);
  const double se_off = std::sqrt(1.0 / (n * (n + 2.0)) / m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double expected = i == j ? 1.0 / n : 0.0;
      CHECK(std::abs(second(i, j) - expected) <= 5.0 * (i == j ? se_diag : se_off));
    }
  }
}

TEST_CASE("ball draws") {
  SphereSampler s(1, 2);
  double abs_mean = 0.0;
  const long m = 100000;
  for (long k = 0; k < m; ++k) {
    const Vector v = s.sample_unit_ball();
    CHECK(v.norm() <= 1.0);
    abs_mean += std::abs(v[0]);
  }
  abs_mean /= static_cast<double>(m);
  // |nu| is uniform on [0, 1]: mean 1/2, standard deviation sqrt(1/12).
  CHECK(std::abs(abs_mean - 0.5) <= 5.0 * std::sqrt(1.0 / 12.0 / m));
  SphereSampler s3(3, 2);
  for (int k = 0; k < 1000; ++k) CHECK(s3.sample_unit_ball().norm() <= 1.0);
}

TEST_CASE("same seed gives the same stream") {
  SphereSampler a(4, 99), b(4, 99);
  for (int k = 0; k < 100; ++k) CHECK(a.sample_unit_sphere() == b.sample_unit_sphere());
}

TEST_CASE("two-point estimate") {
  CHECK(two_point_estimate(1.5, 1.5, vec({0.6, 0.8}), 0.1).norm() == 0.0);
  CHECK_THROWS_AS(two_point_estimate(1.0, 0.0, vec({1.0}), 0.0), ConfigError);

  // Linear g(z) = c'z: the estimate averages to c.
  const Vector c = vec({1.0, -2.0, 0.5});
  const double xi = 0.01;
  SphereSampler s(3, 5);
  VectorAccumulator acc(3);
  const Vector z = vec({0.3, 0.1, -0.2});
  for (int k = 0; k < 100000; ++k) {
    const Vector u = s.sample_unit_sphere();
    acc.add(two_point_estimate(c.dot(z + xi * u), c.dot(z), u, xi));
  }
  const auto est = acc.result();
  for (int j = 0; j < 3; ++j) CHECK(std::abs(est.mean[j] - c[j]) <= 4.0 * est.std_err[j]);
}

TEST_CASE("Moreau gradient of the box indicator") {
  const BoxSet box = BoxSet::uniform(1, 1.0, 3.0);
  CHECK(moreau_gradient(vec({2.0}), box, 0.5).norm() == 0.0);
  CHECK(moreau_gradient(vec({4.0}), box, 0.5)[0] == 2.0);
  std::mt19937_64 gen(3);
  const BoxSet b2 = BoxSet::uniform(2, 0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vector a = testing::random_vector(gen, 2, -3.0, 4.0);
    const Vector b = testing::random_vector(gen, 2, -3.0, 4.0);
    const double xi = 0.2;
    CHECK((moreau_gradient(a, b2, xi) - moreau_gradient(b, b2, xi)).norm() <= (a - b).norm() / xi + 1e-12);
  }
}

TEST_CASE("smoothed value") {
  SphereSampler s(2, 4);
  const auto c = mc_smoothed_value([](const Vector&) { return 3.25; }, vec({0.0, 0.0}), 0.1, 100, s);
  CHECK(c.mean == 3.25);
  const Vector a = vec({2.0, -1.0});
  const auto lin = mc_smoothed_value([&](const Vector& t) { return a.dot(t) + 1.0; }, vec({0.5, 0.5}), 0.3,
                                     20000, s);
  CHECK(std::abs(lin.mean - (a.dot(vec({0.5, 0.5})) + 1.0)) <= 3.0 * lin.std_err);
}

TEST_CASE("stationarity estimate of a theta-free game is zero") {
  std::vector<CostFn> costs(2, [](const Vector&, const Vector&) { return 1.0; });
  std::vector<PartialGradFn> grads(2, [](const Vector&, const Vector&) { return Vector::Zero(1); });
  const double inf = 1e300;
  const GameSpec game(costs, grads, std::vector<BoxSet>(2, BoxSet::uniform(1, 0.0, 1.0)),
                      BoxSet::uniform(2, -inf, inf));
  SphereSampler s(2, 6);
  const auto est = mc_stationarity(game, vec({0.3, 0.2}), 0.01, 500,
                                   [](const Vector&) { return Vector::Constant(2, 0.5); }, s);
  CHECK(est.mean.norm() == 0.0);
}
