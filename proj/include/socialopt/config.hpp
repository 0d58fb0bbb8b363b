#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialopt/ev_charging.hpp"
#include "socialopt/regulator.hpp"

namespace socialopt {

enum class GameKind { kExample1, kEVCharging, kQuadraticCustom };
enum class GraphKind { kMetropolis, kComplete };

struct CustomPlayer {
  QuadraticCost cost;
  BoxSet strategy_set;
};

struct GameConfig {
  GameKind kind = GameKind::kExample1;
  EVChargingParams ev;
  std::vector<CustomPlayer> custom_players;  // kQuadraticCustom only
  std::optional<BoxSet> custom_theta_set;    // kQuadraticCustom only
  std::optional<double> theta_probe_radius;  // regulator xi when empty
};

struct GraphConfig {
  GraphKind kind = GraphKind::kComplete;
  double edge_probability = 0.5;
  std::uint64_t seed = 0;
};

/// Single distributed NE solve used by the `ne` subcommand.
struct NESolveConfig {
  std::optional<Vector> theta;  // midpoint of theta_set when empty
  std::optional<double> gamma;  // regulator gamma when empty
  long t_max = 500;
};

struct OutputConfig {
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";
};

struct ExperimentConfig {
  GameConfig game;
  GraphConfig graph;
  RegulatorConfig regulator;
  bool alpha_from_certificate = false;  // "alpha": "certificate"
  NESolveConfig ne;
  OutputConfig output;
  nlohmann::json source;  // document as given, for the summary echo
};

/// Validates `doc` against the schema. Throws ConfigError listing every
/// violation, one per line, when any key is unknown, missing or mistyped.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a JSON file. When `check_alpha` is set the outer step is
/// also compared with its certificate, which requires building the game.
ExperimentConfig load_config(const std::string& path, bool check_alpha = true);

/// Schema-complete JSON form of a config (defaults filled in).
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace socialopt
