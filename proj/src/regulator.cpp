#include "socialopt/regulator.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

double RegulatorConfig::step_size() const {
  if (alpha_mode == AlphaMode::kScaledBySqrtK) return alpha / std::sqrt(static_cast<double>(K));
  return alpha;
}

double alpha_certificate(double xi, long n, long n_players, double L_F, bool exact) {
  const double denom = static_cast<double>(n) * static_cast<double>(n_players) * L_F + 1.0;
  return xi / ((exact ? 2.0 : 4.0) * denom);
}

long inner_schedule(long k, double s, double q, long floor) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ConfigError(fmt::format("inner schedule needs 0 < q < 1, got q = {}", q));
  }
  if (s < 0.0 || s >= 1.0) throw ConfigError(fmt::format("schedule exponent s = {} not in [0, 1)", s));
  const double t = std::ceil(-s * std::log(static_cast<double>(k) + 1.0) / std::log(q));
  return std::max(floor, static_cast<long>(t));
}

long inner_schedule(long k, const InnerSchedule& schedule, double q) {
  switch (schedule.kind) {
    case ScheduleKind::kCertified:
      return inner_schedule(k, schedule.s, q, schedule.floor);
    case ScheduleKind::kFixed:
      return std::max(schedule.floor, schedule.fixed_rounds);
    case ScheduleKind::kLog: {
      const double t = std::ceil(schedule.log_coefficient * std::log(static_cast<double>(k) + 1.0));
      return std::max(schedule.floor, static_cast<long>(t));
    }
  }
  throw ConfigError("unknown inner schedule");
}

ZerothOrderSample zeroth_order_sample(const GameSpec& game, const InnerSolver& solver,
                                      const Vector& theta, double xi, const Vector& u, long t_k) {
  if (!(xi > 0.0)) throw ConfigError(fmt::format("smoothing parameter xi = {} must be positive", xi));
  if (std::abs(u.norm() - 1.0) > 1e-9) throw ConfigError("perturbation direction must be a unit vector");
  ZerothOrderSample out;
  const Vector probe = theta + xi * u;
  out.x_pert = solver(probe, t_k);
  out.x_base = solver(theta, t_k);
  out.costs_pert = player_costs(game, out.x_pert, probe);
  out.costs_base = player_costs(game, out.x_base, theta);
  out.gradient = Vector::Zero(theta.size());
  for (int i = 0; i < game.n_players(); ++i) {
    out.gradient += two_point_estimate(out.costs_pert[i], out.costs_base[i], u, xi);
  }
  return out;
}

Vector inexact_zo_gradient(const GameSpec& game, const InnerSolver& solver, const Vector& theta,
                           double xi, const Vector& u, long t_k) {
  return zeroth_order_sample(game, solver, theta, xi, u, t_k).gradient;
}

Vector theta_step(const Vector& theta, const Vector& zo_grad, const BoxSet& theta_set, double xi,
                  double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("outer step alpha must be positive");
  Vector next = theta - alpha * (zo_grad + moreau_gradient(theta, theta_set, xi));
  if (!next.allFinite()) throw DivergenceError("regulator iterate became non-finite", 0);
  return next;
}

namespace {

// Deterministic cache of an exact equilibrium map, keyed on the bit pattern of theta.
class MemoOracle {
 public:
  MemoOracle(const GameSpec& game, double step, double tol, long max_iter)
      : game_(game), step_(step), tol_(tol), max_iter_(max_iter) {}

  Vector operator()(const Vector& theta) {
    std::string key(reinterpret_cast<const char*>(theta.data()), sizeof(double) * theta.size());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Vector x = centralized_ne(game_, theta, step_, tol_, max_iter_);
    cache_.emplace(std::move(key), x);
    return x;
  }

 private:
  const GameSpec& game_;
  double step_;
  double tol_;
  long max_iter_;
  std::map<std::string, Vector> cache_;
};

// Upper bound on ||x_0 - 1 (x) x*||^2 for an arbitrary (warm) estimate state,
// from the natural-map error bound ||x - x*|| <= (1 + l)/mu * ||r(x)||.
double warm_start_distance_sq(const GameSpec& game, const EstimateState& state, const Vector& theta,
                              const GameConstants& c) {
  const int n = game.n_players();
  Vector own(game.total_dim());
  for (int i = 0; i < n; ++i) {
    own.segment(game.offset(i), game.dim(i)) =
        state.estimates.row(i).segment(game.offset(i), game.dim(i)).transpose();
  }
  const double spread = (state.estimates.rowwise() - own.transpose()).norm();
  const double to_ne = (1.0 + c.l) / c.mu * ne_residual(game, own, theta, 1.0);
  const double dist = spread + std::sqrt(static_cast<double>(n)) * to_ne;
  return dist * dist;
}

}  // namespace

RunTrace run(const RegulatorConfig& config, const GameSpec& game, const CommGraph& graph,
             const GameConstants& constants) {
  const auto started = std::chrono::steady_clock::now();
  if (config.K < 0) throw ConfigError("K must be nonnegative");
  if (!(config.xi > 0.0)) throw ConfigError("xi must be positive");
  const bool exact = config.inner_mode == InnerMode::kExact;
  const BoxSet& theta_set = game.theta_set();
  const Eigen::Index n = game.theta_dim();
  const int n_players = game.n_players();

  RunTrace trace;
  trace.config = config;
  trace.constants = constants;
  trace.alpha = config.step_size();
  trace.alpha_certificate =
      alpha_certificate(config.xi, static_cast<long>(n), n_players, constants.L_F, exact);
  if (trace.alpha > trace.alpha_certificate) {
    const auto msg = fmt::format("alpha = {:.6g} exceeds the certified bound {:.6g}", trace.alpha,
                                 trace.alpha_certificate);
    if (!config.allow_uncertified_alpha) throw ConfigError(msg);
    trace.warnings.push_back(msg);
  }

  Vector theta = config.theta0 ? *config.theta0 : theta_set.midpoint();
  if (theta.size() != n) throw DimensionError("theta0 has the wrong dimension");
  if (!theta_set.contains(theta)) throw ConfigError("theta0 must lie in the regulator feasible set");

  const double sigma_bar = graph.sigma_bar();
  if (!exact) {
    if (!(config.gamma > 0.0)) throw ConfigError("inner step gamma must be positive");
    const double bound = gamma_bound(constants, sigma_bar);
    if (config.gamma >= bound) {
      trace.warnings.push_back(fmt::format(
          "gamma = {:.6g} is not below the linear-rate bound {:.6g}", config.gamma, bound));
    }
    trace.q = q_factor(config.gamma, constants, n_players, sigma_bar);
    if (trace.q >= 1.0) {
      trace.warnings.push_back(
          fmt::format("inner contraction factor q = {:.6g} >= 1, epsilon bounds are infinite", trace.q));
    }
  }

  const double exact_step = centralized_step(constants);
  const EstimateState cold = default_init(game);
  EstimateState warm = cold;
  const InnerCertificate certificate{trace.q, constants.B_X};

  // Algorithm-path randomness lives in stream 0; diagnostics use their own streams.
  SphereSampler directions(n, derive_seed(config.seed, 0));

  double best_stat = std::numeric_limits<double>::infinity();
  trace.records.reserve(static_cast<std::size_t>(config.K));
  for (long k = 0; k < config.K; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.theta = theta;
    rec.dist_to_theta_set = distance_to_box(theta, theta_set);
    const Vector u = directions.sample_unit_sphere();

    const EstimateState& init = config.warm_start ? warm : cold;
    double init_dist_sq = 0.0;
    ZerothOrderSample sample;
    std::optional<NEResult> base_result;
    try {
      if (exact) {
        rec.t_k = 0;
        rec.epsilon_k_bound = 0.0;
        InnerSolver solver = [&](const Vector& th, long) {
          return centralized_ne(game, th, exact_step, config.exact_tol, config.exact_max_iter);
        };
        sample = zeroth_order_sample(game, solver, theta, config.xi, u, 0);
      } else {
        rec.t_k = inner_schedule(k, config.schedule, trace.q);
        InnerSolver solver = [&](const Vector& th, long t) {
          NEResult r = ne_seek(game, graph, th, config.gamma, t, init, certificate);
          Vector x = r.x;
          if ((th.array() == theta.array()).all()) base_result = std::move(r);
          return x;
        };
        sample = zeroth_order_sample(game, solver, theta, config.xi, u, rec.t_k);
        if (config.warm_start) {
          init_dist_sq = std::max(warm_start_distance_sq(game, init, theta + config.xi * u, constants),
                                  warm_start_distance_sq(game, init, theta, constants));
          rec.epsilon_k_bound = trace.q < 1.0 ? std::pow(trace.q, static_cast<double>(rec.t_k)) * init_dist_sq
                                              : std::numeric_limits<double>::infinity();
        } else {
          rec.epsilon_k_bound = base_result ? base_result->epsilon_bound
                                            : std::numeric_limits<double>::infinity();
        }
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError(fmt::format("{} (outer iteration k = {})", e.what(), k), k);
    }
    if (config.warm_start && base_result) warm = base_result->final_state;

    rec.player_costs = sample.costs_base;
    rec.social_cost = sample.costs_base.sum();
    const Vector direction = sample.gradient + moreau_gradient(theta, theta_set, config.xi);
    rec.grad_estimate_norm = direction.norm();

    if (config.diag_every > 0 && k % config.diag_every == 0) {
      MemoOracle oracle(game, exact_step, config.exact_tol, config.exact_max_iter);
      NEOracle ne_oracle = [&oracle](const Vector& th) { return oracle(th); };
      SphereSampler diag(n, derive_seed(derive_seed(config.seed, 1), static_cast<std::uint64_t>(k)));
      try {
        const auto est = mc_stationarity(game, theta, config.xi, config.diag_samples, ne_oracle, diag);
        rec.stationarity_mc_norm = est.mean.norm();
        if (!exact) {
          const Vector probe = theta + config.xi * u;
          const double e_pert = (sample.x_pert - ne_oracle(probe)).squaredNorm();
          const double e_base = (sample.x_base - ne_oracle(theta)).squaredNorm();
          rec.epsilon_k_measured = std::max(e_pert, e_base);
        }
      } catch (const DivergenceError& e) {
        throw DivergenceError(fmt::format("{} (diagnostics at k = {})", e.what(), k), k);
      }
      if (*rec.stationarity_mc_norm < best_stat) {
        best_stat = *rec.stationarity_mc_norm;
        trace.best_theta = theta;
        trace.best_k = k;
      }
    }

    try {
      theta = theta_step(theta, sample.gradient, theta_set, config.xi, trace.alpha);
    } catch (const DivergenceError&) {
      throw DivergenceError(fmt::format("regulator iterate became non-finite at k = {}", k), k);
    }
    trace.records.push_back(std::move(rec));
  }
  trace.final_theta = theta;
  if (trace.best_k < 0) {
    trace.best_theta = theta;
    trace.best_k = config.K;
  }
  trace.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

}  // namespace socialopt
