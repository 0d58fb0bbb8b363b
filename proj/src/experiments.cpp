#include "socialopt/experiments.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "socialopt/errors.hpp"

namespace socialopt {

using nlohmann::json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::string num(double v) { return fmt::format("{:.17g}", v); }

struct BuiltGame {
  GameSpec spec;
  QuadraticGame quadratic;
};

BuiltGame build_game(const GameConfig& g) {
  switch (g.kind) {
    case GameKind::kExample1: {
      auto ex = make_example1();
      return {std::move(ex.spec), std::move(ex.quadratic)};
    }
    case GameKind::kEVCharging: {
      auto ev = build_ev_game(g.ev);
      return {std::move(ev.spec), std::move(ev.quadratic)};
    }
    case GameKind::kQuadraticCustom: {
      if (!g.custom_theta_set) throw ConfigError("quadratic_custom game needs a theta_set");
      std::vector<QuadraticCost> costs;
      std::vector<BoxSet> sets;
      for (const auto& p : g.custom_players) {
        costs.push_back(p.cost);
        sets.push_back(p.strategy_set);
      }
      QuadraticGame quad(std::move(costs), std::move(sets), *g.custom_theta_set);
      GameSpec spec = quad.to_game_spec();
      return {std::move(spec), std::move(quad)};
    }
  }
  throw ConfigError("unknown game kind");
}

CommGraph build_graph(const GraphConfig& g, int n_players) {
  if (g.kind == GraphKind::kComplete) return complete_graph(n_players);
  return metropolis_graph(n_players, g.edge_probability, g.seed);
}

// Own blocks of the estimate rows, stacked.
Vector own_blocks(const GameSpec& game, const Matrix& estimates) {
  Vector x(game.total_dim());
  for (int i = 0; i < game.n_players(); ++i) {
    x.segment(game.offset(i), game.dim(i)) =
        estimates.row(i).segment(game.offset(i), game.dim(i)).transpose();
  }
  return x;
}

OracleCheck check(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, expected, tol, std::abs(value - expected) <= tol};
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& config) {
  BuiltGame g = build_game(config.game);
  CommGraph graph = build_graph(config.graph, g.spec.n_players());
  RegulatorConfig reg = config.regulator;
  const double probe = config.game.theta_probe_radius.value_or(reg.xi);
  const GameConstants c = estimate_constants(g.quadratic, probe);
  const bool exact = reg.inner_mode == InnerMode::kExact;
  const double cert = alpha_certificate(reg.xi, static_cast<long>(g.spec.theta_dim()),
                                        g.spec.n_players(), c.L_F, exact);
  if (config.alpha_from_certificate) {
    reg.alpha_mode = AlphaMode::kFixed;
    reg.alpha = cert;
  }
  if (reg.step_size() > cert && !reg.allow_uncertified_alpha) {
    throw ConfigError(fmt::format(
        "outer step {:.6g} exceeds the certified bound alpha_certificate = {:.6g} "
        "(set overrides.allow_uncertified_alpha or pass --override-alpha to run anyway)",
        reg.step_size(), cert));
  }
  const double bound = gamma_bound(c, graph.sigma_bar());
  const double q = q_factor(reg.gamma, c, g.spec.n_players(), graph.sigma_bar());
  return {std::move(g.spec), std::move(g.quadratic), std::move(graph), c, reg, cert, bound, q};
}

json constants_json(const Experiment& e) {
  const auto& c = e.constants;
  return {{"mu", c.mu},
          {"l", c.l},
          {"l_prime", c.l_prime},
          {"l_theta", c.l_theta},
          {"L_x", c.L_x},
          {"L_theta", c.L_theta},
          {"B_X", c.B_X},
          {"L_F", c.L_F},
          {"sigma_bar", e.graph.sigma_bar()},
          {"gamma", e.regulator.gamma},
          {"gamma_bound", e.gamma_bound},
          {"q_factor", e.q},
          {"alpha", e.regulator.step_size()},
          {"alpha_certificate", e.alpha_certificate}};
}

json summary_json(const ExperimentConfig& config, const RunTrace& trace) {
  json out;
  out["config"] = config_to_json(config);
  out["final_theta"] = to_std(trace.final_theta);
  out["best_theta"] = to_std(trace.best_theta);
  out["best_k"] = trace.best_k;
  out["wall_time_s"] = trace.wall_time_s;
  out["alpha"] = trace.alpha;
  out["alpha_certificate"] = trace.alpha_certificate;
  out["q"] = trace.q;
  out["L_F"] = trace.constants.L_F;
  out["iterations"] = trace.records.size();
  if (!trace.records.empty()) out["final_social_cost"] = trace.records.back().social_cost;
  out["warnings"] = trace.warnings;
  return out;
}

NERunReport run_ne(const ExperimentConfig& config, const Experiment& e) {
  NERunReport report;
  report.theta = config.ne.theta.value_or(e.game.theta_set().midpoint());
  if (report.theta.size() != e.game.theta_dim()) throw DimensionError("ne.theta has the wrong dimension");
  report.gamma = config.ne.gamma.value_or(e.regulator.gamma);
  report.q = q_factor(report.gamma, e.constants, e.game.n_players(), e.graph.sigma_bar());
  std::optional<InnerCertificate> cert;
  if (report.q < 1.0) cert = InnerCertificate{report.q, e.constants.B_X};
  const auto observer = [&](long, const Matrix& est) {
    report.round_residuals.push_back(ne_residual(e.game, own_blocks(e.game, est), report.theta));
  };
  report.result = ne_seek(e.game, e.graph, report.theta, report.gamma, config.ne.t_max,
                          default_init(e.game), cert, observer);
  return report;
}

void write_ne_csv(std::ostream& os, const NERunReport& report) {
  os << "t,residual\n";
  for (std::size_t t = 0; t < report.round_residuals.size(); ++t) {
    os << t + 1 << ',' << num(report.round_residuals[t]) << '\n';
  }
}

json ne_json(const NERunReport& r) {
  json out = {{"theta", to_std(r.theta)},
              {"gamma", r.gamma},
              {"q", r.q},
              {"x", to_std(r.result.x)},
              {"residual", r.result.residual},
              {"consensus_gap", r.result.consensus_gap},
              {"iterations", r.result.iterations}};
  if (std::isfinite(r.result.epsilon_bound)) out["epsilon_bound"] = r.result.epsilon_bound;
  else out["epsilon_bound"] = nullptr;
  return out;
}

ExperimentConfig evcharge_preset() {
  ExperimentConfig cfg;
  cfg.game.kind = GameKind::kEVCharging;
  cfg.game.ev = EVChargingParams{};
  cfg.graph.kind = GraphKind::kMetropolis;
  cfg.graph.edge_probability = 1.0 / 3.0;
  cfg.graph.seed = 7;
  auto& r = cfg.regulator;
  r.K = 5000;
  r.alpha_mode = AlphaMode::kFixed;
  r.alpha = 1e-5;
  r.allow_uncertified_alpha = true;
  r.gamma = 0.01;
  r.xi = 1e-4;
  r.schedule.kind = ScheduleKind::kLog;
  r.schedule.log_coefficient = 5.0;
  r.schedule.floor = 1;
  r.inner_mode = InnerMode::kInexact;
  r.theta0 = Vector::Constant(1, 2.0);
  r.diag_samples = 2000;
  r.diag_every = 50;
  r.seed = 0;
  cfg.output.trace_path = "evcharge_trace.csv";
  cfg.output.summary_path = "evcharge_summary.json";
  cfg.source = config_to_json(cfg);
  return cfg;
}

EVChargeReport run_evcharge(const ExperimentConfig& config) {
  const Experiment e = build_experiment(config);
  EVChargeReport report{run(e.regulator, e.game, e.graph, e.constants), {}};
  report.grid = grid_search_theta(e.game, e.game.theta_set(), 400, centralized_step(e.constants),
                                  e.regulator.exact_tol, e.regulator.exact_max_iter);
  return report;
}

void write_evcharge_series(std::ostream& os, const EVChargeReport& report) {
  const auto& recs = report.trace.records;
  const Eigen::Index players = recs.empty() ? 0 : recs.front().player_costs.size();
  os << "k,theta,abs_theta_err,stat_mc_norm";
  for (Eigen::Index i = 1; i <= players; ++i) os << ",cost_" << i;
  os << ",social_cost\n";
  for (const auto& r : recs) {
    os << r.k << ',' << num(r.theta[0]) << ',' << num(std::abs(r.theta[0] - report.grid.theta_star[0]))
       << ',' << (r.stationarity_mc_norm ? num(*r.stationarity_mc_norm) : std::string());
    for (Eigen::Index i = 0; i < players; ++i) os << ',' << num(r.player_costs[i]);
    os << ',' << num(r.social_cost) << '\n';
  }
}

std::vector<OracleCheck> example1_checks() {
  std::vector<OracleCheck> out;
  const auto ex = make_example1();
  const GameConstants c = estimate_constants(ex.quadratic, 1e-3);
  const double step = centralized_step(c);
  const CommGraph graph = complete_graph(2);
  const double gamma = 0.99 * gamma_bound(c, graph.sigma_bar());

  out.push_back(check("closed_form_social(0)", example1_social(0.0), -16.0 / 9.0, 1e-15));
  out.push_back(check("closed_form_social(2/3)", example1_social(2.0 / 3.0), -32.0 / 9.0, 1e-14));
  out.push_back(check("closed_form_social(1)", example1_social(1.0), -6.0, 1e-15));

  double ne_err = 0.0, seek_err = 0.0, social_err = 0.0, quad_err = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double th = k / 100.0;
    const Vector theta = Vector::Constant(1, th);
    const Vector expected = example1_ne(th);
    const Vector x = centralized_ne(ex.spec, theta, step, 1e-13, 100000);
    ne_err = std::max(ne_err, (x - expected).cwiseAbs().maxCoeff());
    const auto seek = ne_seek(ex.spec, graph, theta, gamma, 500, default_init(ex.spec));
    seek_err = std::max(seek_err, (seek.x - expected).cwiseAbs().maxCoeff());
    social_err = std::max(social_err, std::abs(social_cost(ex.spec, x, theta) - example1_social(th)));
    const GameSpec qspec = ex.quadratic.to_game_spec();
    quad_err = std::max(quad_err, std::abs(social_cost(qspec, x, theta) - social_cost(ex.spec, x, theta)));
  }
  out.push_back(check("centralized_ne_max_error", ne_err, 0.0, 1e-9));
  out.push_back(check("ne_seek_max_error", seek_err, 0.0, 1e-6));
  out.push_back(check("social_cost_max_error", social_err, 0.0, 1e-9));
  out.push_back(check("quadratic_form_max_error", quad_err, 0.0, 1e-12));

  out.push_back(check("mu", c.mu, 2.0, 1e-12));
  out.push_back(check("l", c.l, 2.0, 1e-12));

  const auto grid = grid_search_theta(ex.spec, ex.spec.theta_set(), 101, step, 1e-13, 100000);
  out.push_back(check("grid_theta_star", grid.theta_star[0], 1.0, 1e-12));
  out.push_back(check("grid_F_star", grid.F_star, -6.0, 1e-9));
  return out;
}

json checks_json(const std::vector<OracleCheck>& checks) {
  json arr = json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"expected", c.expected},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  return {{"checks", arr}, {"all_pass", all}};
}

}  // namespace socialopt

namespace socialopt {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

void add_fixture(json& out, const std::string& oracle, const json& input, const json& value) {
  const std::string key = fmt::format("{}#{:016x}", oracle, fnv1a(input.dump()));
  out["entries"][key] = {{"oracle", oracle}, {"input", input}, {"value", value}};
}

}  // namespace

json oracle_fixtures() {
  json out;
  out["metadata"] = {{"generator", "socialopt fixtures"},
                     {"format", 1},
                     {"ne_tolerance", 1e-13},
                     {"grid_points", 400}};
  out["entries"] = json::object();

  const auto ex = make_example1();
  const GameConstants ec = estimate_constants(ex.quadratic, 1e-3);
  for (int k = 0; k <= 10; ++k) {
    const double th = k / 10.0;
    add_fixture(out, "example1_social", {{"theta", th}}, example1_social(th));
    const Vector x = centralized_ne(ex.spec, Vector::Constant(1, th), centralized_step(ec), 1e-13, 100000);
    add_fixture(out, "example1_centralized_ne", {{"theta", th}}, to_std(x));
  }

  const EVChargingParams p;
  const auto ev = build_ev_game(p);
  const GameConstants c = estimate_constants(ev.quadratic, 1e-4);
  add_fixture(out, "ev_constants", {{"dim", p.dim}, {"theta_probe_radius", 1e-4}},
              {{"mu", c.mu}, {"l", c.l}, {"l_theta", c.l_theta}, {"L_x", c.L_x},
               {"L_theta", c.L_theta}, {"B_X", c.B_X}, {"L_F", c.L_F}});
  for (double th : {1.0, 2.0, 3.0}) {
    const Vector x = centralized_ne(ev.spec, Vector::Constant(1, th), centralized_step(c), 1e-13, 1000000);
    add_fixture(out, "ev_centralized_ne", {{"dim", p.dim}, {"theta", th}}, to_std(x));
  }
  const auto grid = grid_search_theta(ev.spec, ev.spec.theta_set(), 400, centralized_step(c), 1e-13);
  add_fixture(out, "ev_grid_search", {{"dim", p.dim}, {"grid_points", 400}},
              {{"theta_star", grid.theta_star[0]}, {"F_star", grid.F_star}});
  return out;
}

}  // namespace socialopt
