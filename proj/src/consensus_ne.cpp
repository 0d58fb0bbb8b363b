#include "socialopt/consensus_ne.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

Vector EstimateState::stacked() const {
  // Eigen is column-major, so the transpose's storage is the row concatenation.
  const Matrix t = estimates.transpose();
  return Eigen::Map<const Vector>(t.data(), t.size());
}

EstimateState default_init(const GameSpec& game) {
  EstimateState s;
  s.estimates = game.joint_strategy_set().midpoint().transpose().replicate(game.n_players(), 1);
  return s;
}

double gamma_bound(const GameConstants& c, double sigma_bar) {
  if (!(c.mu > 0.0) || !(c.l > 0.0)) throw ConfigError("gamma_bound needs mu > 0 and l > 0");
  if (sigma_bar < 0.0 || sigma_bar >= 1.0) {
    throw ConfigError(fmt::format("sigma_bar {} outside [0, 1)", sigma_bar));
  }
  const double l = c.l;
  const double lp = c.l_prime;
  const double mu = c.mu;
  double bound = std::min(1.0, 2.0 * mu / (l * l));
  if (sigma_bar >= 1e-12) {
    const double s2 = sigma_bar * sigma_bar;
    const double a = s2 * (2 * l * lp + lp * lp + 4 * mu * lp + 2 * l * l) +
                     2 * (l * l * lp * lp + mu * lp * lp + 2 * l * l * lp * lp) * s2 +
                     2 * l * l * lp * lp * s2;
    bound = std::min({bound, sigma_bar / (3.0 * l), 2.0 * mu * (1.0 - s2) / a});
  }
  if (!(bound > 0.0)) throw ConfigError(fmt::format("nonpositive inner step bound {}", bound));
  return bound;
}

double q_factor(double gamma, const GameConstants& c, int n_players, double sigma_bar) {
  if (!(gamma > 0.0)) throw ConfigError("q_factor needs gamma > 0");
  const double n = n_players;
  const double l = c.l;
  const double lp = c.l_prime;
  const double q11 = 1.0 - 2.0 * gamma * c.mu / n + gamma * gamma * l * l / n;
  const double q12 = (gamma * (l + lp) + gamma * gamma * l * lp) * sigma_bar / std::sqrt(n);
  const double q22 = (1.0 + 2.0 * gamma * l + gamma * gamma * l * l) * sigma_bar * sigma_bar;
  const double mean = 0.5 * (q11 + q22);
  const double radius = std::hypot(0.5 * (q11 - q22), q12);
  return std::max(std::abs(mean + radius), std::abs(mean - radius));
}

double epsilon_bound(double init_norm_sq, int n_players, double B_X, double q, long t) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw ConfigError(fmt::format("no accuracy certificate: contraction factor q = {} >= 1", q));
  }
  return 2.0 * (init_norm_sq + n_players * B_X * B_X) * std::pow(q, static_cast<double>(t));
}

double ne_residual(const GameSpec& game, const Vector& x, const Vector& theta, double gamma_probe) {
  if (!(gamma_probe > 0.0)) throw ConfigError("residual probe step must be positive");
  const Vector step = x - gamma_probe * pseudo_gradient(game, x, theta);
  return (x - project_box(step, game.joint_strategy_set())).norm();
}

namespace {

double max_pairwise_gap(const Matrix& rows) {
  double gap = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j)
      gap = std::max(gap, (rows.row(i) - rows.row(j)).norm());
  return gap;
}

}  // namespace

NEResult ne_seek(const GameSpec& game, const CommGraph& graph, const Vector& theta, double gamma,
                 long t_max, const EstimateState& init,
                 const std::optional<InnerCertificate>& certificate, const RoundObserver& observer) {
  const int n = game.n_players();
  const Eigen::Index d = game.total_dim();
  if (graph.n_nodes() != n) {
    throw DimensionError(fmt::format("graph has {} nodes for {} players", graph.n_nodes(), n));
  }
  if (init.estimates.rows() != n || init.estimates.cols() != d) {
    throw DimensionError(fmt::format("initial estimates are {}x{}, expected {}x{}",
                                     init.estimates.rows(), init.estimates.cols(), n, d));
  }
  if (!init.estimates.allFinite()) throw DivergenceError("initial estimates are not finite", 0);
  if (!(gamma > 0.0)) throw ConfigError("inner step gamma must be positive");
  if (t_max < 0) throw ConfigError("round count must be nonnegative");

  const Matrix& a = graph.adjacency();
  Matrix current = init.estimates;
  Matrix mixed(n, d);
  for (long t = 0; t < t_max; ++t) {
    mixed.noalias() = a * current;
    // Rows of `mixed` are read-only below; each player writes only its own row.
    for (int i = 0; i < n; ++i) {
      const Vector est = mixed.row(i).transpose();
      const auto off = game.offset(i);
      const auto di = game.dim(i);
      const Vector own = est.segment(off, di) - gamma * game.partial_gradient(i, est, theta);
      current.row(i) = mixed.row(i);
      current.row(i).segment(off, di) = project_box(own, game.strategy_sets()[i]).transpose();
    }
    if (!current.allFinite()) {
      throw DivergenceError(fmt::format("inner iterate became non-finite at round {}", t + 1), t + 1);
    }
    if (observer) observer(t + 1, current);
  }

  NEResult out;
  out.x.resize(d);
  for (int i = 0; i < n; ++i) {
    out.x.segment(game.offset(i), game.dim(i)) =
        current.row(i).segment(game.offset(i), game.dim(i)).transpose();
  }
  out.residual = ne_residual(game, out.x, theta);
  out.iterations = t_max;
  out.consensus_gap = max_pairwise_gap(current);
  out.epsilon_bound = std::numeric_limits<double>::infinity();
  if (certificate && certificate->q < 1.0) {
    out.epsilon_bound =
        epsilon_bound(init.estimates.squaredNorm(), n, certificate->B_X, certificate->q, t_max);
  }
  out.final_state.estimates = std::move(current);
  out.final_state.iteration = init.iteration + t_max;
  return out;
}

Vector centralized_ne(const GameSpec& game, const Vector& theta, double step, double tol,
                      long max_iter, const std::optional<Vector>& start) {
  if (!(tol > 0.0)) throw ConfigError("centralized NE tolerance must be positive");
  if (!(step > 0.0)) throw ConfigError("centralized NE step must be positive");
  const BoxSet& X = game.joint_strategy_set();
  Vector x = start ? project_box(*start, X) : X.midpoint();
  double residual = std::numeric_limits<double>::infinity();
  for (long it = 0; it <= max_iter; ++it) {
    const Vector next = project_box(x - step * pseudo_gradient(game, x, theta), X);
    residual = (x - next).norm();
    if (!std::isfinite(residual)) {
      throw DivergenceError(fmt::format("centralized NE diverged at iteration {}", it), it);
    }
    if (residual <= tol) return x;
    x = next;
  }
  throw DivergenceError(
      fmt::format("centralized NE did not reach tolerance {:.3g} in {} iterations (residual {:.6g})",
                  tol, max_iter, residual),
      max_iter);
}

double centralized_step(const GameConstants& constants) {
  return std::min(1.0, constants.mu / (constants.l * constants.l));
}

}  // namespace socialopt
