#include "socialopt/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "socialopt/errors.hpp"
#include "socialopt/experiments.hpp"

namespace socialopt {

using nlohmann::json;

namespace {

// Collects every schema violation before failing.
class Reader {
 public:
  void fail(const std::string& path, const std::string& what) {
    errors_.push_back(fmt::format("{}: {}", path, what));
  }
  const std::vector<std::string>& errors() const { return errors_; }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void allowed_keys(const json& j, const std::string& path, const std::set<std::string>& keys) {
    for (const auto& [key, value] : j.items()) {
      if (!keys.count(key)) fail(join(path, key), "unknown key");
    }
  }

  template <typename T>
  void number(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const auto p = join(path, key);
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) return fail(p, "expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        return fail(p, "expected a nonnegative integer");
      }
      out = v.get<T>();
    } else {
      if (!v.is_number_integer()) return fail(p, "expected an integer");
      out = v.get<T>();
    }
  }

  template <typename T>
  void number(const json& j, const std::string& path, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    T v{};
    const auto before = errors_.size();
    number(j, path, key, v);
    if (errors_.size() == before) out = v;
  }

  void boolean(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) return fail(join(path, key), "expected a boolean");
    out = j.at(key).get<bool>();
  }

  void string(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) return fail(join(path, key), "expected a string");
    out = j.at(key).get<std::string>();
  }

  std::optional<Vector> vector(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(fmt::format("{}[{}]", path, i), "expected a number");
        return std::nullopt;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  std::optional<Matrix> matrix(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array of rows");
      return std::nullopt;
    }
    const auto rows = static_cast<Eigen::Index>(v.size());
    Matrix out;
    for (Eigen::Index i = 0; i < rows; ++i) {
      auto row = vector(v[static_cast<std::size_t>(i)], fmt::format("{}[{}]", path, i));
      if (!row) return std::nullopt;
      if (i == 0) out.resize(rows, row->size());
      if (row->size() != out.cols()) {
        fail(path, "rows have different lengths");
        return std::nullopt;
      }
      out.row(i) = row->transpose();
    }
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string> errors_;
};

const char* game_kind_name(GameKind k) {
  switch (k) {
    case GameKind::kExample1: return "example1";
    case GameKind::kEVCharging: return "ev_charging";
    case GameKind::kQuadraticCustom: return "quadratic_custom";
  }
  return "?";
}

const char* schedule_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::kCertified: return "certified";
    case ScheduleKind::kFixed: return "fixed";
    case ScheduleKind::kLog: return "log";
  }
  return "?";
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_std(m.row(i).transpose()));
  return rows;
}

std::optional<BoxSet> read_box(Reader& rd, const json& j, const std::string& path) {
  if (!j.contains("lower") || !j.contains("upper")) {
    rd.fail(path, "needs 'lower' and 'upper'");
    return std::nullopt;
  }
  auto lo = rd.vector(j.at("lower"), Reader::join(path, "lower"));
  auto hi = rd.vector(j.at("upper"), Reader::join(path, "upper"));
  if (!lo || !hi) return std::nullopt;
  try {
    return BoxSet(*lo, *hi);
  } catch (const Error& e) {
    rd.fail(path, e.what());
    return std::nullopt;
  }
}

void read_ev(Reader& rd, const json& j, const std::string& path, EVChargingParams& p) {
  if (!rd.object(j, path)) return;
  rd.allowed_keys(j, path,
                  {"N", "dim", "c_base", "target_base", "target_step", "a_base", "lambda", "r",
                   "x_lower", "x_upper", "theta_lower", "theta_upper"});
  rd.number(j, path, "N", p.N);
  rd.number(j, path, "dim", p.dim);
  rd.number(j, path, "c_base", p.c_base);
  rd.number(j, path, "target_base", p.target_base);
  rd.number(j, path, "target_step", p.target_step);
  rd.number(j, path, "a_base", p.a_base);
  rd.number(j, path, "lambda", p.lambda);
  rd.number(j, path, "r", p.r);
  rd.number(j, path, "x_lower", p.x_lower);
  rd.number(j, path, "x_upper", p.x_upper);
  rd.number(j, path, "theta_lower", p.theta_lower);
  rd.number(j, path, "theta_upper", p.theta_upper);
  if (p.N < 1) rd.fail(Reader::join(path, "N"), "must be >= 1");
  if (p.dim < 1) rd.fail(Reader::join(path, "dim"), "must be >= 1");
}

void read_custom(Reader& rd, const json& j, const std::string& path, GameConfig& g) {
  if (!rd.object(j, path)) return;
  rd.allowed_keys(j, path, {"players", "theta_set"});
  if (!j.contains("theta_set")) {
    rd.fail(path, "missing 'theta_set'");
  } else if (rd.object(j.at("theta_set"), Reader::join(path, "theta_set"))) {
    g.custom_theta_set = read_box(rd, j.at("theta_set"), Reader::join(path, "theta_set"));
  }
  if (!j.contains("players") || !j.at("players").is_array() || j.at("players").empty()) {
    rd.fail(Reader::join(path, "players"), "expected a nonempty array");
    return;
  }
  const auto& players = j.at("players");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const auto p = fmt::format("{}.players[{}]", path, i);
    const json& pj = players[i];
    if (!rd.object(pj, p)) continue;
    rd.allowed_keys(pj, p, {"P", "S", "q", "w", "c", "lower", "upper"});
    auto box = read_box(rd, pj, p);
    std::optional<Matrix> P, S;
    std::optional<Vector> q, w;
    if (pj.contains("P")) P = rd.matrix(pj.at("P"), Reader::join(p, "P"));
    else rd.fail(p, "missing 'P'");
    if (pj.contains("S")) S = rd.matrix(pj.at("S"), Reader::join(p, "S"));
    else rd.fail(p, "missing 'S'");
    if (pj.contains("q")) q = rd.vector(pj.at("q"), Reader::join(p, "q"));
    else rd.fail(p, "missing 'q'");
    if (pj.contains("w")) w = rd.vector(pj.at("w"), Reader::join(p, "w"));
    double c = 0.0;
    rd.number(pj, p, "c", c);
    if (!box || !P || !S || !q) continue;
    QuadraticCost cost;
    cost.P = *P;
    cost.S = *S;
    cost.q = *q;
    cost.w = w ? *w : Vector::Zero(S->cols());
    cost.c = c;
    g.custom_players.push_back({std::move(cost), *box});
  }
}

void read_game(Reader& rd, const json& j, GameConfig& g) {
  const std::string path = "game";
  if (!rd.object(j, path)) return;
  rd.allowed_keys(j, path, {"kind", "params", "theta_probe_radius"});
  std::string kind;
  rd.string(j, path, "kind", kind);
  if (kind == "example1") g.kind = GameKind::kExample1;
  else if (kind == "ev_charging") g.kind = GameKind::kEVCharging;
  else if (kind == "quadratic_custom") g.kind = GameKind::kQuadraticCustom;
  else return rd.fail("game.kind", fmt::format("expected example1, ev_charging or quadratic_custom, got '{}'", kind));
  rd.number(j, path, "theta_probe_radius", g.theta_probe_radius);
  const bool has_params = j.contains("params");
  switch (g.kind) {
    case GameKind::kExample1:
      if (has_params && !(j.at("params").is_object() && j.at("params").empty())) {
        rd.fail("game.params", "example1 takes no parameters");
      }
      break;
    case GameKind::kEVCharging:
      if (has_params) read_ev(rd, j.at("params"), "game.params", g.ev);
      break;
    case GameKind::kQuadraticCustom:
      if (has_params) read_custom(rd, j.at("params"), "game.params", g);
      else rd.fail("game", "quadratic_custom needs 'params'");
      break;
  }
}

void read_graph(Reader& rd, const json& j, GraphConfig& g) {
  const std::string path = "graph";
  if (!rd.object(j, path)) return;
  std::string kind;
  rd.string(j, path, "kind", kind);
  if (kind == "complete") {
    g.kind = GraphKind::kComplete;
    rd.allowed_keys(j, path, {"kind"});
  } else if (kind == "metropolis") {
    g.kind = GraphKind::kMetropolis;
    rd.allowed_keys(j, path, {"kind", "edge_probability", "seed"});
    rd.number(j, path, "edge_probability", g.edge_probability);
    rd.number(j, path, "seed", g.seed);
    if (!(g.edge_probability > 0.0 && g.edge_probability <= 1.0)) {
      rd.fail("graph.edge_probability", "must lie in (0, 1]");
    }
  } else {
    rd.fail("graph.kind", fmt::format("expected metropolis or complete, got '{}'", kind));
  }
}

void read_schedule(Reader& rd, const json& j, InnerSchedule& s) {
  const std::string path = "regulator.schedule";
  if (!rd.object(j, path)) return;
  std::string kind = schedule_name(s.kind);
  rd.string(j, path, "kind", kind);
  if (kind == "certified") {
    s.kind = ScheduleKind::kCertified;
    rd.allowed_keys(j, path, {"kind", "s", "floor"});
    rd.number(j, path, "s", s.s);
    if (s.s < 0.0 || s.s >= 1.0) rd.fail("regulator.schedule.s", "must lie in [0, 1)");
  } else if (kind == "fixed") {
    s.kind = ScheduleKind::kFixed;
    rd.allowed_keys(j, path, {"kind", "rounds", "floor"});
    rd.number(j, path, "rounds", s.fixed_rounds);
    if (s.fixed_rounds < 1) rd.fail("regulator.schedule.rounds", "must be >= 1");
  } else if (kind == "log") {
    s.kind = ScheduleKind::kLog;
    rd.allowed_keys(j, path, {"kind", "coefficient", "floor"});
    rd.number(j, path, "coefficient", s.log_coefficient);
    if (!(s.log_coefficient > 0.0)) rd.fail("regulator.schedule.coefficient", "must be positive");
  } else {
    return rd.fail("regulator.schedule.kind", fmt::format("expected certified, fixed or log, got '{}'", kind));
  }
  rd.number(j, path, "floor", s.floor);
  if (s.floor < 1) rd.fail("regulator.schedule.floor", "must be >= 1");
}

void read_regulator(Reader& rd, const json& j, ExperimentConfig& cfg) {
  const std::string path = "regulator";
  if (!rd.object(j, path)) return;
  rd.allowed_keys(j, path,
                  {"K", "alpha", "alpha0", "xi", "schedule", "inner_mode", "gamma", "seed",
                   "diag_samples", "diag_every", "warm_start", "theta0", "exact_tol",
                   "exact_max_iter"});
  RegulatorConfig& r = cfg.regulator;
  rd.number(j, path, "K", r.K);
  if (r.K < 1) rd.fail("regulator.K", "must be >= 1");
  if (j.contains("alpha") && j.contains("alpha0")) {
    rd.fail(path, "give either 'alpha' (fixed step) or 'alpha0' (alpha0 / sqrt(K)), not both");
  } else if (j.contains("alpha0")) {
    r.alpha_mode = AlphaMode::kScaledBySqrtK;
    rd.number(j, path, "alpha0", r.alpha);
    if (!(r.alpha > 0.0)) rd.fail("regulator.alpha0", "must be positive");
  } else if (j.contains("alpha")) {
    r.alpha_mode = AlphaMode::kFixed;
    if (j.at("alpha").is_string()) {
      if (j.at("alpha").get<std::string>() == "certificate") cfg.alpha_from_certificate = true;
      else rd.fail("regulator.alpha", "expected a number or \"certificate\"");
    } else {
      rd.number(j, path, "alpha", r.alpha);
      if (!(r.alpha > 0.0)) rd.fail("regulator.alpha", "must be positive");
    }
  }
  rd.number(j, path, "xi", r.xi);
  if (!(r.xi > 0.0)) rd.fail("regulator.xi", "must be positive");
  if (j.contains("schedule")) read_schedule(rd, j.at("schedule"), r.schedule);
  std::string mode = r.inner_mode == InnerMode::kExact ? "exact" : "inexact";
  rd.string(j, path, "inner_mode", mode);
  if (mode == "exact") r.inner_mode = InnerMode::kExact;
  else if (mode == "inexact") r.inner_mode = InnerMode::kInexact;
  else rd.fail("regulator.inner_mode", fmt::format("expected exact or inexact, got '{}'", mode));
  rd.number(j, path, "gamma", r.gamma);
  if (!(r.gamma > 0.0)) rd.fail("regulator.gamma", "must be positive");
  rd.number(j, path, "seed", r.seed);
  rd.number(j, path, "diag_samples", r.diag_samples);
  if (r.diag_samples < 1) rd.fail("regulator.diag_samples", "must be >= 1");
  rd.number(j, path, "diag_every", r.diag_every);
  if (r.diag_every < 0) rd.fail("regulator.diag_every", "must be >= 0");
  rd.boolean(j, path, "warm_start", r.warm_start);
  if (j.contains("theta0")) {
    if (auto v = rd.vector(j.at("theta0"), "regulator.theta0")) r.theta0 = *v;
  }
  rd.number(j, path, "exact_tol", r.exact_tol);
  if (!(r.exact_tol > 0.0)) rd.fail("regulator.exact_tol", "must be positive");
  rd.number(j, path, "exact_max_iter", r.exact_max_iter);
  if (r.exact_max_iter < 1) rd.fail("regulator.exact_max_iter", "must be >= 1");
}

void read_ne(Reader& rd, const json& j, NESolveConfig& ne) {
  const std::string path = "ne";
  if (!rd.object(j, path)) return;
  rd.allowed_keys(j, path, {"theta", "gamma", "t_max"});
  if (j.contains("theta")) {
    if (auto v = rd.vector(j.at("theta"), "ne.theta")) ne.theta = *v;
  }
  rd.number(j, path, "gamma", ne.gamma);
  if (ne.gamma && !(*ne.gamma > 0.0)) rd.fail("ne.gamma", "must be positive");
  rd.number(j, path, "t_max", ne.t_max);
  if (ne.t_max < 1) rd.fail("ne.t_max", "must be >= 1");
}

void read_output(Reader& rd, const json& j, OutputConfig& o) {
  if (!rd.object(j, "output")) return;
  rd.allowed_keys(j, "output", {"trace_path", "summary_path"});
  rd.string(j, "output", "trace_path", o.trace_path);
  rd.string(j, "output", "summary_path", o.summary_path);
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  Reader rd;
  ExperimentConfig cfg;
  cfg.source = doc;
  if (!rd.object(doc, "(root)")) throw ConfigError("config: (root): expected an object");
  rd.allowed_keys(doc, "", {"game", "graph", "regulator", "ne", "output", "overrides"});
  if (doc.contains("game")) read_game(rd, doc.at("game"), cfg.game);
  else rd.fail("game", "missing section");
  if (doc.contains("graph")) read_graph(rd, doc.at("graph"), cfg.graph);
  if (doc.contains("regulator")) read_regulator(rd, doc.at("regulator"), cfg);
  if (doc.contains("ne")) read_ne(rd, doc.at("ne"), cfg.ne);
  if (doc.contains("output")) read_output(rd, doc.at("output"), cfg.output);
  if (doc.contains("overrides") && rd.object(doc.at("overrides"), "overrides")) {
    rd.allowed_keys(doc.at("overrides"), "overrides", {"allow_uncertified_alpha"});
    rd.boolean(doc.at("overrides"), "overrides", "allow_uncertified_alpha",
               cfg.regulator.allow_uncertified_alpha);
  }
  if (!rd.errors().empty()) {
    std::string msg = fmt::format("invalid config ({} problem{}):", rd.errors().size(),
                                  rd.errors().size() == 1 ? "" : "s");
    for (const auto& e : rd.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, bool check_alpha) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}", path, e.what()));
  }
  ExperimentConfig cfg = parse_config(doc);
  if (check_alpha) build_experiment(cfg);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json out;
  json game;
  game["kind"] = game_kind_name(cfg.game.kind);
  if (cfg.game.theta_probe_radius) game["theta_probe_radius"] = *cfg.game.theta_probe_radius;
  if (cfg.game.kind == GameKind::kEVCharging) {
    const auto& p = cfg.game.ev;
    game["params"] = {{"N", p.N},           {"dim", p.dim},
                      {"c_base", p.c_base}, {"target_base", p.target_base},
                      {"target_step", p.target_step}, {"a_base", p.a_base},
                      {"lambda", p.lambda}, {"r", p.r},
                      {"x_lower", p.x_lower}, {"x_upper", p.x_upper},
                      {"theta_lower", p.theta_lower}, {"theta_upper", p.theta_upper}};
  } else if (cfg.game.kind == GameKind::kQuadraticCustom) {
    json players = json::array();
    for (const auto& pl : cfg.game.custom_players) {
      players.push_back({{"P", matrix_json(pl.cost.P)},
                         {"S", matrix_json(pl.cost.S)},
                         {"q", to_std(pl.cost.q)},
                         {"w", to_std(pl.cost.w)},
                         {"c", pl.cost.c},
                         {"lower", to_std(pl.strategy_set.lower())},
                         {"upper", to_std(pl.strategy_set.upper())}});
    }
    json params = {{"players", players}};
    if (cfg.game.custom_theta_set) {
      params["theta_set"] = {{"lower", to_std(cfg.game.custom_theta_set->lower())},
                             {"upper", to_std(cfg.game.custom_theta_set->upper())}};
    }
    game["params"] = params;
  }
  out["game"] = game;

  if (cfg.graph.kind == GraphKind::kComplete) {
    out["graph"] = {{"kind", "complete"}};
  } else {
    out["graph"] = {{"kind", "metropolis"},
                    {"edge_probability", cfg.graph.edge_probability},
                    {"seed", cfg.graph.seed}};
  }

  const auto& r = cfg.regulator;
  json reg;
  reg["K"] = r.K;
  if (cfg.alpha_from_certificate) reg["alpha"] = "certificate";
  else if (r.alpha_mode == AlphaMode::kScaledBySqrtK) reg["alpha0"] = r.alpha;
  else reg["alpha"] = r.alpha;
  reg["xi"] = r.xi;
  json sched = {{"kind", schedule_name(r.schedule.kind)}, {"floor", r.schedule.floor}};
  if (r.schedule.kind == ScheduleKind::kCertified) sched["s"] = r.schedule.s;
  if (r.schedule.kind == ScheduleKind::kFixed) sched["rounds"] = r.schedule.fixed_rounds;
  if (r.schedule.kind == ScheduleKind::kLog) sched["coefficient"] = r.schedule.log_coefficient;
  reg["schedule"] = sched;
  reg["inner_mode"] = r.inner_mode == InnerMode::kExact ? "exact" : "inexact";
  reg["gamma"] = r.gamma;
  reg["seed"] = r.seed;
  reg["diag_samples"] = r.diag_samples;
  reg["diag_every"] = r.diag_every;
  reg["warm_start"] = r.warm_start;
  if (r.theta0) reg["theta0"] = to_std(*r.theta0);
  reg["exact_tol"] = r.exact_tol;
  reg["exact_max_iter"] = r.exact_max_iter;
  out["regulator"] = reg;

  json ne = {{"t_max", cfg.ne.t_max}};
  if (cfg.ne.theta) ne["theta"] = to_std(*cfg.ne.theta);
  if (cfg.ne.gamma) ne["gamma"] = *cfg.ne.gamma;
  out["ne"] = ne;
  out["output"] = {{"trace_path", cfg.output.trace_path},
                   {"summary_path", cfg.output.summary_path}};
  out["overrides"] = {{"allow_uncertified_alpha", r.allow_uncertified_alpha}};
  return out;
}

}  // namespace socialopt
