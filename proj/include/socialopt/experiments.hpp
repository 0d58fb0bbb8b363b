#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "socialopt/config.hpp"
#include "socialopt/oracles.hpp"

namespace socialopt {

/// Everything a run needs, built from an ExperimentConfig. `regulator.alpha`
/// is resolved when the config asks for the certified step.
struct Experiment {
  GameSpec game;
  QuadraticGame quadratic;
  CommGraph graph;
  GameConstants constants;
  RegulatorConfig regulator;
  double alpha_certificate = 0.0;
  double gamma_bound = 0.0;
  double q = 0.0;  // at regulator.gamma
};

/// Throws ConfigError naming the certificate when the step exceeds it and no
/// override is set.
Experiment build_experiment(const ExperimentConfig& config);

nlohmann::json constants_json(const Experiment& experiment);

/// Config echo, final and best theta, wall time and run diagnostics.
nlohmann::json summary_json(const ExperimentConfig& config, const RunTrace& trace);

/// Single distributed NE solve with a residual recorded after every round.
struct NERunReport {
  Vector theta;
  double gamma = 0.0;
  double q = 0.0;
  NEResult result;
  std::vector<double> round_residuals;  // entry t-1 is the residual after round t
};

NERunReport run_ne(const ExperimentConfig& config, const Experiment& experiment);
void write_ne_csv(std::ostream& os, const NERunReport& report);
nlohmann::json ne_json(const NERunReport& report);

/// Ten vehicles on a Metropolis graph with edge probability 1/3, step
/// alpha = 1e-5 (uncertified, override set), gamma = 0.01, xi = 1e-4,
/// t_k = ceil(5 ln(k+1)), K = 5000, theta_0 = 2, 2000 diagnostic samples.
ExperimentConfig evcharge_preset();

struct EVChargeReport {
  RunTrace trace;
  GridSearchResult grid;
};

/// Runs the regulator and a 400-point grid search for the reference theta*.
EVChargeReport run_evcharge(const ExperimentConfig& config);

/// k, theta, |theta_k - theta*|, stat_mc_norm, cost_1..cost_N, social_cost.
void write_evcharge_series(std::ostream& os, const EVChargeReport& report);

/// Closed form against solver for the two-player example.
struct OracleCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<OracleCheck> example1_checks();
nlohmann::json checks_json(const std::vector<OracleCheck>& checks);

}  // namespace socialopt

namespace socialopt {

/// 64-bit FNV-1a, used to key fixture entries by their input description.
std::uint64_t fnv1a(const std::string& text);

/// Oracle outputs keyed by "<oracle>#<fnv1a(input) in hex>", each entry with
/// its oracle name, input and value, plus a "metadata" object. Deterministic.
nlohmann::json oracle_fixtures();

}  // namespace socialopt
