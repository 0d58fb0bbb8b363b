#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "socialopt/comm_graph.hpp"
#include "socialopt/consensus_ne.hpp"
#include "socialopt/constants.hpp"
#include "socialopt/smoothing.hpp"

namespace socialopt {

enum class InnerMode { kInexact, kExact };
enum class AlphaMode { kFixed, kScaledBySqrtK };
enum class ScheduleKind { kCertified, kFixed, kLog };

/// Number of inner rounds t_k run at outer iteration k.
///   kCertified: max(floor, ceil(-s ln(k+1) / ln q))
///   kFixed: max(floor, fixed_rounds)
///   kLog:   max(floor, ceil(log_coefficient * ln(k+1)))
struct InnerSchedule {
  ScheduleKind kind = ScheduleKind::kCertified;
  double s = 0.5;
  long fixed_rounds = 10;
  double log_coefficient = 5.0;
  long floor = 1;
};

struct RegulatorConfig {
  long K = 1000;
  AlphaMode alpha_mode = AlphaMode::kFixed;
  double alpha = 1e-5;  // the step itself, or alpha0 when scaled by 1/sqrt(K)
  double xi = 1e-3;
  InnerSchedule schedule;
  InnerMode inner_mode = InnerMode::kInexact;
  double gamma = 0.01;
  std::uint64_t seed = 0;
  long diag_samples = 2000;
  long diag_every = 50;  // 0 disables diagnostics
  bool warm_start = false;
  std::optional<Vector> theta0;  // midpoint of theta_set when empty
  bool allow_uncertified_alpha = false;
  double exact_tol = 1e-12;
  long exact_max_iter = 1'000'000;

  double step_size() const;
};

struct IterationRecord {
  long k = 0;
  Vector theta;
  long t_k = 0;                  // 0 in exact mode
  double epsilon_k_bound = 0.0;  // +inf when q >= 1
  std::optional<double> epsilon_k_measured;
  double social_cost = 0.0;      // at the (inexact) equilibrium for theta_k
  Vector player_costs;
  double grad_estimate_norm = 0.0;  // norm of zo gradient + Moreau term
  double dist_to_theta_set = 0.0;
  std::optional<double> stationarity_mc_norm;
};

struct RunTrace {
  RegulatorConfig config;
  GameConstants constants;
  double alpha = 0.0;
  double alpha_certificate = 0.0;
  double q = 0.0;  // inner contraction factor (inexact mode)
  std::vector<IterationRecord> records;
  Vector final_theta;
  Vector best_theta;  // smallest diagnostic stationarity norm, final theta if none
  long best_k = -1;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;
};

/// Largest certified outer step: xi / (4 (nNL_F + 1)), or xi / (2 (nNL_F + 1))
/// when the inner problems are solved exactly.
double alpha_certificate(double xi, long n, long n_players, double L_F, bool exact);

/// Inner round count for outer iteration k under `schedule`. Needs 0 < q < 1
/// for the certified schedule.
long inner_schedule(long k, const InnerSchedule& schedule, double q);
/// max(floor, ceil(-s ln(k+1) / ln q)).
long inner_schedule(long k, double s, double q, long floor);

/// (theta_tilde, t_k) -> approximate equilibrium at theta_tilde.
using InnerSolver = std::function<Vector(const Vector& theta, long t_k)>;

/// Both equilibria, their per-player costs and the resulting gradient estimate.
struct ZerothOrderSample {
  Vector gradient;
  Vector x_base;
  Vector x_pert;
  Vector costs_base;
  Vector costs_pert;
};

ZerothOrderSample zeroth_order_sample(const GameSpec& game, const InnerSolver& solver,
                                      const Vector& theta, double xi, const Vector& u, long t_k);

/// sum_i (n/xi)(f_i(x_eps(theta + xi u), theta + xi u) - f_i(x_eps(theta), theta)) u
Vector inexact_zo_gradient(const GameSpec& game, const InnerSolver& solver, const Vector& theta,
                           double xi, const Vector& u, long t_k);

/// theta - alpha (zo_grad + (theta - Pi(theta)) / xi). The result is not projected.
Vector theta_step(const Vector& theta, const Vector& zo_grad, const BoxSet& theta_set, double xi,
                  double alpha);

/// Outer zeroth-order loop. Deterministic given config.seed.
RunTrace run(const RegulatorConfig& config, const GameSpec& game, const CommGraph& graph,
             const GameConstants& constants);

/// Trace CSV with a fixed header; doubles printed with 17 significant digits.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
std::string trace_csv_header(Eigen::Index theta_dim, int n_players);
std::vector<IterationRecord> read_trace_csv(std::istream& is);

}  // namespace socialopt
