// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "socialopt/errors.hpp"
#include "socialopt/experiments.hpp"

using namespace socialopt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Vector scalar(double v) { return Vector::Constant(1, v); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// Criterion 1 ---------------------------------------------------------------

constexpr double kC1Tol = 1e-6;
constexpr long kC1Rounds = 500;
constexpr double kC1Seconds = 5.0;

Outcome criterion1() {
  const auto ex = make_example1();
  const GameConstants c = estimate_constants(ex.quadratic, 0.0);
  const CommGraph graph = complete_graph(2);
  const double gamma = gamma_bound(c, graph.sigma_bar());
  double worst_central = 0.0, worst_seek = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double th = k / 100.0;
    const Vector expected = example1_ne(th);
    const Vector central = centralized_ne(ex.spec, scalar(th), centralized_step(c), 1e-13, 100000);
    const auto seek = ne_seek(ex.spec, graph, scalar(th), gamma, kC1Rounds, default_init(ex.spec));
    worst_central = std::max(worst_central, (central - expected).cwiseAbs().maxCoeff());
    worst_seek = std::max(worst_seek, (seek.x - expected).cwiseAbs().maxCoeff());
  }
  return {worst_central <= kC1Tol && worst_seek <= kC1Tol,
          fmt::format("gamma={:.4g} max|centralized-closed|={:.3g} max|distributed-closed|={:.3g} tol={:g}",
                      gamma, worst_central, worst_seek, kC1Tol)};
}

// Criteria 2 and 8 ----------------------------------------------------------

constexpr long kC2K = 2000;
constexpr double kC2Xi = 1e-3;
constexpr int kC2Seeds = 10;
constexpr double kC2ThetaTol = 0.05;
constexpr double kC2CostTol = 0.2;
constexpr double kC2Seconds = 30.0;

struct Example1Runs {
  std::vector<RunTrace> traces;
  double alpha = 0.0;
};

Example1Runs& criterion2_runs() {
  static Example1Runs runs = [] {
    Example1Runs out;
    const auto ex = make_example1();
    const GameConstants c = estimate_constants(ex.quadratic, kC2Xi);
    const CommGraph graph = complete_graph(2);
    // Largest certified step, written as alpha0 / sqrt(K).
    const double cert = alpha_certificate(kC2Xi, 1, 2, c.L_F, true);
    RegulatorConfig cfg;
    cfg.K = kC2K;
    cfg.xi = kC2Xi;
    cfg.inner_mode = InnerMode::kExact;
    cfg.alpha_mode = AlphaMode::kScaledBySqrtK;
    cfg.alpha = cert * std::sqrt(static_cast<double>(kC2K));
    cfg.diag_every = 100;
    cfg.diag_samples = 500;
    out.alpha = cfg.step_size();
    for (int s = 0; s < kC2Seeds; ++s) {
      cfg.seed = static_cast<std::uint64_t>(s);
      out.traces.push_back(run(cfg, ex.spec, graph, c));
    }
    return out;
  }();
  return runs;
}

Outcome criterion2() {
  const auto& runs = criterion2_runs();
  const auto ex = make_example1();
  std::vector<double> gaps, costs;
  for (const auto& t : runs.traces) {
    const double th = t.final_theta[0];
    gaps.push_back(std::abs(th - 1.0));
    // Social cost at the exact equilibrium of the final decision.
    const Vector x = centralized_ne(ex.spec, t.final_theta, 0.5, 1e-13, 100000);
    costs.push_back(social_cost(ex.spec, x, t.final_theta));
  }
  const double gap = median(gaps);
  const double cost = median(costs);
  return {gap <= kC2ThetaTol && std::abs(cost + 6.0) <= kC2CostTol,
          fmt::format("alpha={:.4g} median|theta_K-1|={:.4f} (tol {}) median F(theta_K)={:.4f} (target -6 +/- {})",
                      runs.alpha, gap, kC2ThetaTol, cost, kC2CostTol)};
}

Outcome criterion8() {
  const auto& runs = criterion2_runs();
  const auto ex = make_example1();
  const GameConstants c = estimate_constants(ex.quadratic, kC2Xi);
  const double slack = kC2Xi * 1.0 * 2.0 * c.L_F;  // xi n N L_F
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  long best_violations = 0;
  for (const auto& t : runs.traces) {
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      const double bound = slack + runs.alpha * t.records[k - 1].grad_estimate_norm;
      const double dist = t.records[k].dist_to_theta_set;
      worst_margin = std::min(worst_margin, bound - dist);
      if (dist > bound) ++violations;
    }
    const double final_bound = slack + runs.alpha * t.records.back().grad_estimate_norm;
    if (distance_to_box(t.final_theta, ex.spec.theta_set()) > final_bound) ++violations;
    for (const auto& r : t.records) {
      if (r.k != t.best_k) continue;
      if (r.dist_to_theta_set > slack + kC2Xi * r.stationarity_mc_norm.value()) ++best_violations;
    }
  }
  return {violations == 0 && best_violations == 0,
          fmt::format("xi*n*N*L_F={:.4g} iterate violations={} best-iterate violations={} min margin={:.4g}",
                      slack, violations, best_violations, worst_margin)};
}

// Criterion 3 ---------------------------------------------------------------

constexpr double kC3Slack = 1.05;
constexpr long kC3Lag = 10;
constexpr double kC3Seconds = 10.0;

Outcome criterion3() {
  const auto ev = build_ev_game(EVChargingParams{});
  const GameConstants c = estimate_constants(ev.quadratic, 0.0);
  const CommGraph graph = metropolis_graph(10, 1.0 / 3.0, 7);
  const double gamma = gamma_bound(c, graph.sigma_bar()) * (1.0 - 1e-9);
  const double q = q_factor(gamma, c, 10, graph.sigma_bar());
  const Vector theta = scalar(2.0);
  const Vector star = centralized_ne(ev.spec, theta, centralized_step(c), 1e-13, 1000000);
  std::vector<double> err(1, (default_init(ev.spec).estimates.rowwise() - star.transpose()).squaredNorm());
  ne_seek(ev.spec, graph, theta, gamma, 200 + kC3Lag, default_init(ev.spec), std::nullopt,
          [&](long, const Matrix& est) { err.push_back((est.rowwise() - star.transpose()).squaredNorm()); });
  const double limit = std::pow(q, kC3Lag) * kC3Slack;
  double worst = 0.0;
  for (long t = 20; t <= 200; ++t) worst = std::max(worst, err[t + kC3Lag] / err[t]);
  return {q < 1.0 && worst <= limit,
          fmt::format("sigma_bar={:.4f} gamma={:.4g} q={:.9f} max e(t+10)/e(t)={:.9f} limit q^10*1.05={:.9f}",
                      graph.sigma_bar(), gamma, q, worst, limit)};
}

// Criterion 4 ---------------------------------------------------------------

constexpr long kC4K = 500;
constexpr double kC4Seconds = 60.0;

Outcome criterion4() {
  const auto ex = make_example1();
  const GameConstants c = estimate_constants(ex.quadratic, 1e-3);
  const CommGraph graph = complete_graph(2);
  RegulatorConfig cfg;
  cfg.K = kC4K;
  cfg.xi = 1e-3;
  cfg.inner_mode = InnerMode::kInexact;
  cfg.gamma = 0.2;
  cfg.schedule.kind = ScheduleKind::kCertified;
  cfg.schedule.s = 0.5;
  cfg.alpha = alpha_certificate(cfg.xi, 1, 2, c.L_F, false);
  cfg.diag_every = 1;
  cfg.diag_samples = 100;
  cfg.seed = 4;
  const RunTrace t = run(cfg, ex.spec, graph, c);
  long checked = 0, violations = 0;
  double worst_ratio = 0.0;
  for (const auto& r : t.records) {
    if (!r.epsilon_k_measured) continue;
    ++checked;
    if (*r.epsilon_k_measured > r.epsilon_k_bound) ++violations;
    if (r.epsilon_k_bound > 0.0) worst_ratio = std::max(worst_ratio, *r.epsilon_k_measured / r.epsilon_k_bound);
  }
  return {checked == kC4K && violations == 0,
          fmt::format("q={:.4f} diagnostic iterations={} violations={} max measured/bound={:.4g}", t.q, checked,
                      violations, worst_ratio)};
}

// Criterion 5 ---------------------------------------------------------------

constexpr long kC5Samples = 100000;
constexpr double kC5Xi = 0.01;
constexpr double kC5H = 1e-4;
constexpr double kC5Sigmas = 3.0;
constexpr double kC5Seconds = 60.0;

Outcome criterion5() {
  const auto ex = make_example1();
  const GameConstants c = estimate_constants(ex.quadratic, kC5Xi);
  const double step = centralized_step(c);
  const NEOracle oracle = [&](const Vector& th) { return centralized_ne(ex.spec, th, step, 1e-13, 100000); };
  const ScalarFn F = [&](const Vector& th) { return social_cost(ex.spec, oracle(th), th); };
  std::mt19937_64 gen(2024);
  // Smooth branch with room for the ball and the difference step.
  std::uniform_real_distribution<double> pick(2.0 / 3.0 + kC5Xi + 2 * kC5H, 1.0 - kC5Xi - 2 * kC5H);
  int agree = 0;
  std::string worst;
  double worst_z = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Vector th = scalar(pick(gen));
    SphereSampler s1(1, derive_seed(11, static_cast<std::uint64_t>(i)));
    SphereSampler s2(1, derive_seed(12, static_cast<std::uint64_t>(i)));
    const auto zo = mc_stationarity(ex.spec, th, kC5Xi, kC5Samples, oracle, s1);
    const Vector zo_mean = zo.mean - moreau_gradient(th, ex.spec.theta_set(), kC5Xi);
    const auto fd = fd_smoothed_gradient(F, th, kC5Xi, kC5H, kC5Samples, s2);
    const double se = std::hypot(zo.std_err[0], fd.std_err[0]);
    const double z = std::abs(zo_mean[0] - fd.mean[0]) / se;
    if (z <= kC5Sigmas) ++agree;
    if (z >= worst_z) {
      worst_z = z;
      worst = fmt::format("theta={:.4f} zo={:.6f} fd={:.6f} se={:.3g}", th[0], zo_mean[0], fd.mean[0], se);
    }
  }
  return {agree == 5, fmt::format("{}/5 within {} combined std-err; worst z={:.3f} ({})", agree, kC5Sigmas,
                                  worst_z, worst)};
}

// Criterion 6 ---------------------------------------------------------------

constexpr long kC6Bases = 1000;
constexpr long kC6DrawsPerBase = 1000;
constexpr double kC6Xi = 1e-4;
constexpr double kC6Slack = 1e-9;
constexpr double kC6Seconds = 60.0;

Outcome criterion6() {
  const auto ev = build_ev_game(EVChargingParams{});
  const GameConstants c = estimate_constants(ev.quadratic, kC6Xi);
  const double step = centralized_step(c);
  const int N = ev.spec.n_players();
  const double limit = 1.0 * c.L_F + kC6Slack;
  std::map<double, Vector> cache;
  const auto costs_at = [&](double th) -> const Vector& {
    auto it = cache.find(th);
    if (it != cache.end()) return it->second;
    const Vector x = centralized_ne(ev.spec, scalar(th), step, 1e-13, 1000000);
    return cache.emplace(th, player_costs(ev.spec, x, scalar(th))).first->second;
  };
  CounterRng base_rng(606);
  SphereSampler dirs(1, 607);
  const BoxSet& Theta = ev.spec.theta_set();
  long draws = 0, violations = 0;
  double worst = 0.0;
  for (long b = 0; b < kC6Bases; ++b) {
    const double th = Theta.lower()[0] + base_rng.uniform() * (Theta.upper()[0] - Theta.lower()[0]);
    for (long m = 0; m < kC6DrawsPerBase; ++m) {
      const Vector u = dirs.sample_unit_sphere();
      const Vector& base = costs_at(th);
      const Vector& pert = costs_at(th + kC6Xi * u[0]);
      for (int i = 0; i < N; ++i) {
        const double norm = two_point_estimate(pert[i], base[i], u, kC6Xi).norm();
        worst = std::max(worst, norm);
        if (norm > limit) ++violations;
      }
      ++draws;
    }
  }
  return {violations == 0 && draws == kC6Bases * kC6DrawsPerBase,
          fmt::format("draws={} per-player estimates={} violations={} max norm={:.4f} bound n*L_F={:.4f}", draws,
                      draws * N, violations, worst, c.L_F)};
}

// Criterion 7 ---------------------------------------------------------------

constexpr double kC7Xi = 0.05;
constexpr int kC7Seeds = 10;
constexpr double kC7Slope = -0.35;
constexpr double kC7Seconds = 600.0;
const std::vector<long> kC7Ks = {250, 1000, 4000};

Outcome criterion7() {
  const auto ex = make_example1();
  const GameConstants c = estimate_constants(ex.quadratic, kC7Xi);
  const CommGraph graph = complete_graph(2);
  std::string detail;
  bool pass = true;
  for (InnerMode mode : {InnerMode::kExact, InnerMode::kInexact}) {
    const bool exact = mode == InnerMode::kExact;
    // alpha0 / sqrt(K) stays certified for every K >= 250.
    const double alpha0 = alpha_certificate(kC7Xi, 1, 2, c.L_F, exact) * std::sqrt(250.0);
    std::vector<double> ks, means;
    for (long K : kC7Ks) {
      double total = 0.0;
      long count = 0;
      for (int s = 0; s < kC7Seeds; ++s) {
        RegulatorConfig cfg;
        cfg.K = K;
        cfg.xi = kC7Xi;
        cfg.inner_mode = mode;
        cfg.gamma = 0.2;
        cfg.schedule.kind = ScheduleKind::kCertified;
        cfg.schedule.s = 0.5;
        cfg.alpha_mode = AlphaMode::kScaledBySqrtK;
        cfg.alpha = alpha0;
        cfg.diag_every = 5;
        cfg.diag_samples = 200;
        cfg.seed = static_cast<std::uint64_t>(1000 + s);
        const RunTrace t = run(cfg, ex.spec, graph, c);
        for (const auto& r : t.records) {
          if (!r.stationarity_mc_norm) continue;
          total += *r.stationarity_mc_norm * *r.stationarity_mc_norm;
          ++count;
        }
      }
      ks.push_back(static_cast<double>(K));
      means.push_back(total / static_cast<double>(count));
    }
    const double slope = loglog_slope(ks, means);
    pass = pass && slope <= kC7Slope;
    detail += fmt::format("{}{}: mean|grad|^2 = {:.4g}/{:.4g}/{:.4g}, slope={:.3f}", detail.empty() ? "" : "; ",
                          exact ? "exact" : "inexact(s=0.5)", means[0], means[1], means[2], slope);
  }
  return {pass, detail + fmt::format(" (limit {})", kC7Slope)};
}

// Criterion 9 ---------------------------------------------------------------

constexpr double kC9ThetaTol = 0.1;
constexpr double kC9StatFactor = 10.0;
constexpr double kC9CostRange = 0.01;
constexpr long kC9Tail = 100;
constexpr double kC9Seconds = 300.0;

Outcome criterion9() {
  const EVChargeReport rep = run_evcharge(evcharge_preset());
  const auto& recs = rep.trace.records;
  const double star = rep.grid.theta_star[0];
  const auto err = [&](std::size_t k) { return std::abs(recs[k].theta[0] - star); };
  const double err0 = err(0);
  const double err_final = std::abs(rep.trace.final_theta[0] - star);
  double err_second_half = 0.0;
  for (std::size_t k = recs.size() / 2; k < recs.size(); ++k) err_second_half = std::max(err_second_half, err(k));
  const bool a = err_final <= kC9ThetaTol && err_second_half <= kC9ThetaTol && err_second_half < err0;

  std::vector<double> stats;
  for (const auto& r : recs) {
    if (r.stationarity_mc_norm) stats.push_back(*r.stationarity_mc_norm);
  }
  const bool b = stats.size() >= 2 && stats.back() * kC9StatFactor <= stats.front();

  const Eigen::Index N = recs.front().player_costs.size();
  double worst_rel = 0.0;
  for (Eigen::Index i = 0; i <= N; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (std::size_t k = recs.size() - kC9Tail; k < recs.size(); ++k) {
      const double v = i < N ? recs[k].player_costs[i] : recs[k].social_cost;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    worst_rel = std::max(worst_rel, (hi - lo) / std::abs(sum / kC9Tail));
  }
  const bool cst = worst_rel <= kC9CostRange;
  return {a && b && cst,
          fmt::format("theta*_grid={:.4f}; (a) |theta-theta*| {:.4f} -> {:.4f}, second-half max {:.4f} [{}]; "
                      "(b) stationarity {:.4g} -> {:.4g} [{}]; (c) last-{} cost range/|mean| max {:.3g} [{}]",
                      star, err0, err_final, err_second_half, a ? "ok" : "FAIL", stats.front(), stats.back(),
                      b ? "ok" : "FAIL", kC9Tail, worst_rel, cst ? "ok" : "FAIL")};
}

// Criterion 10 --------------------------------------------------------------

constexpr double kC10Seconds = 300.0;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

Outcome criterion10() {
  const fs::path root = fs::temp_directory_path() / fmt::format("socialopt_determinism_{}", ::getpid());
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "regulate.json";
  {
    std::ofstream os(config);
    os << R"({"game": {"kind": "ev_charging"},
             "graph": {"kind": "metropolis", "edge_probability": 0.3333333333333333, "seed": 7},
             "regulator": {"K": 300, "alpha": 1e-5, "xi": 1e-4, "gamma": 0.01, "theta0": [2.0],
                           "schedule": {"kind": "log", "coefficient": 5}, "diag_every": 25},
             "ne": {"theta": [1.5], "t_max": 300},
             "overrides": {"allow_uncertified_alpha": true}})";
  }
  const std::string cli = SOCIALOPT_CLI;
  struct Job {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Job> jobs = {
      {"regulate", fmt::format("regulate --config {} --seed 5", config.string()), {"trace.csv"}},
      {"regulate-sweep", fmt::format("regulate --config {} --seeds 1..2", config.string()),
       {"trace_seed1.csv", "trace_seed2.csv"}},
      {"ne", fmt::format("ne --config {} --seed 5", config.string()), {"ne_residuals.csv"}},
      {"evcharge", "evcharge --seed 5 --iterations 600", {"evcharge_trace.csv", "evcharge_series.csv"}},
      {"fixtures", "fixtures", {"oracles.json"}},
  };
  std::vector<std::string> notes;
  bool pass = true;
  for (const auto& job : jobs) {
    std::string content[2];
    bool ok = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / fmt::format("{}_{}", job.name, rep);
      if (shell(fmt::format("{} {} --out {}", cli, job.args, dir.string())) != 0) ok = false;
      for (const auto& f : job.files) {
        if (!fs::exists(dir / f)) ok = false;
        content[rep] += slurp(dir / f);
      }
    }
    ok = ok && !content[0].empty() && content[0] == content[1];
    pass = pass && ok;
    notes.push_back(fmt::format("{}={}", job.name, ok ? "identical" : "DIFFERENT"));
  }
  fs::remove_all(root);
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : " ") + n;
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* title;
  double seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Example-1 NE oracle equivalence", kC1Seconds, criterion1},
      {2, "Example-1 regulator optimum", kC2Seconds, criterion2},
      {3, "linear inner rate", kC3Seconds, criterion3},
      {4, "inner accuracy certificate", kC4Seconds, criterion4},
      {5, "estimator unbiasedness", kC5Seconds, criterion5},
      {6, "estimator norm bound", kC6Seconds, criterion6},
      {7, "sublinear outer rate", kC7Seconds, criterion7},
      {8, "Moreau containment", kC2Seconds, criterion8},
      {9, "EV charging reproduction", kC9Seconds, criterion9},
      {10, "determinism", kC10Seconds, criterion10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    fmt::print("[{}] criterion {:>2} {}: {} | {:.2f}s (limit {:g}s{})\n", pass ? "PASS" : "FAIL", c.id, c.title,
               out.detail, secs, c.seconds, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
