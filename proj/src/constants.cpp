#include "socialopt/constants.hpp"

#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

double composite_lipschitz(double L_x, double l_theta, double mu, double L_theta) {
  return L_x * l_theta / mu + L_theta;
}

namespace {

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()[0];
}

// Walks the corners in Gray-code order so each step flips one coordinate.
double corner_max(const Matrix& A, const Vector& b, const BoxSet& box) {
  const Eigen::Index m = box.dim();
  Vector v = A * box.lower() + b;
  double best = v.squaredNorm();
  std::vector<bool> at_upper(m, false);
  const std::uint64_t corners = std::uint64_t{1} << m;
  for (std::uint64_t k = 1; k < corners; ++k) {
    const auto j = static_cast<Eigen::Index>(std::countr_zero(k));
    const double step = box.upper()[j] - box.lower()[j];
    if (at_upper[j]) {
      v -= step * A.col(j);
    } else {
      v += step * A.col(j);
    }
    at_upper[j] = !at_upper[j];
    best = std::max(best, v.squaredNorm());
  }
  return std::sqrt(best);
}

double coordinatewise_bound(const Matrix& A, const Vector& b, const BoxSet& box) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    double hi = b[k];
    double lo = b[k];
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const double a = A(k, j) * box.lower()[j];
      const double c = A(k, j) * box.upper()[j];
      hi += std::max(a, c);
      lo += std::min(a, c);
    }
    const double m = std::max(std::abs(hi), std::abs(lo));
    total += m * m;
  }
  return std::sqrt(total);
}

}  // namespace

double max_affine_norm(const Matrix& A, const Vector& b, const BoxSet& box) {
  if (A.cols() != box.dim() || A.rows() != b.size()) {
    throw DimensionError("affine map and box have inconsistent shapes");
  }
  if (box.dim() <= kExactCornerLimit) return corner_max(A, b, box);
  return coordinatewise_bound(A, b, box);
}

GameConstants estimate_constants(const QuadraticGame& game, double theta_probe_radius) {
  if (theta_probe_radius < 0.0) throw ConfigError("theta probe radius must be nonnegative");
  GameConstants k;
  const Matrix& M = game.M();
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  k.mu = eig.eigenvalues().minCoeff();
  if (!(k.mu > 0.0)) {
    throw ConfigError(
        fmt::format("pseudo-gradient is not strongly monotone: smallest eigenvalue of the "
                    "symmetric part is {:.6g}",
                    k.mu));
  }
  k.l = spectral_norm(M);
  k.l_prime = k.l;
  k.l_theta = spectral_norm(game.T());

  const BoxSet& X = product(game.strategy_sets());
  k.B_X = X.max_norm();

  // Joint box over (x, theta) with theta restricted to the probed region.
  const BoxSet probe = game.theta_set().inflated(theta_probe_radius);
  const BoxSet joint = product({X, probe});
  const Eigen::Index d = game.total_dim();
  const Eigen::Index n = game.theta_dim();
  for (const auto& f : game.costs()) {
    Matrix gx(d, d + n);
    gx << f.P, f.S;
    k.L_x = std::max(k.L_x, max_affine_norm(gx, f.q, joint));
    Matrix gt = Matrix::Zero(n, d + n);
    gt.leftCols(d) = f.S.transpose();
    k.L_theta = std::max(k.L_theta, max_affine_norm(gt, f.w, joint));
  }
  k.L_F = composite_lipschitz(k.L_x, k.l_theta, k.mu, k.L_theta);
  return k;
}

}  // namespace socialopt
