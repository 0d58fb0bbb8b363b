// Command-line driver: config-driven runs, the EV charging preset and oracle checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "socialopt/errors.hpp"
#include "socialopt/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace socialopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitOracle = 4;

constexpr const char* kOutDirEnv = "SOCIALOPT_OUT_DIR";

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out_dir;
  bool override_alpha = false;
  std::optional<long> iterations;
};

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

// "a..b" inclusive, or a single value.
SeedRange parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const auto v = std::stoull(text);
      return {v, v};
    }
    const SeedRange r{std::stoull(text.substr(0, dots)), std::stoull(text.substr(dots + 2))};
    if (r.last < r.first) throw ConfigError(fmt::format("empty seed range '{}'", text));
    return r;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("bad seed range '{}', expected A..B", text));
  }
}

fs::path out_dir(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

fs::path resolve(const Options& opt, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : out_dir(opt) / p;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return os;
}

fs::path with_seed_suffix(const fs::path& path, std::uint64_t seed) {
  fs::path out = path;
  out.replace_filename(fmt::format("{}_seed{}{}", path.stem().string(), seed, path.extension().string()));
  return out;
}

ExperimentConfig config_from(const Options& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required for this subcommand");
  ExperimentConfig cfg = load_config(opt.config_path, false);
  if (opt.override_alpha) cfg.regulator.allow_uncertified_alpha = true;
  if (opt.seed) cfg.regulator.seed = *opt.seed;
  if (opt.iterations) cfg.regulator.K = *opt.iterations;
  return cfg;
}

std::vector<std::uint64_t> seed_list(const Options& opt, std::uint64_t fallback) {
  if (opt.seeds.empty()) return {opt.seed.value_or(fallback)};
  const SeedRange r = parse_seeds(opt.seeds);
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = r.first;; ++s) {
    out.push_back(s);
    if (s == r.last) break;
  }
  return out;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_ne(const Options& opt) {
  const ExperimentConfig cfg = config_from(opt);
  const Experiment e = build_experiment(cfg);
  const NERunReport report = run_ne(cfg, e);
  const fs::path csv = resolve(opt, "ne_residuals.csv");
  auto os = open_out(csv);
  write_ne_csv(os, report);
  json out = ne_json(report);
  out["residual_csv"] = csv.string();
  print(out);
  return kExitOk;
}

int cmd_regulate(const Options& opt) {
  ExperimentConfig cfg = config_from(opt);
  const auto seeds = seed_list(opt, cfg.regulator.seed);
  const bool sweep = seeds.size() > 1;
  json runs = json::array();
  for (const auto seed : seeds) {
    cfg.regulator.seed = seed;
    const Experiment e = build_experiment(cfg);
    const RunTrace trace = run(e.regulator, e.game, e.graph, e.constants);
    fs::path trace_path = resolve(opt, cfg.output.trace_path);
    fs::path summary_path = resolve(opt, cfg.output.summary_path);
    if (sweep) {
      trace_path = with_seed_suffix(trace_path, seed);
      summary_path = with_seed_suffix(summary_path, seed);
    }
    {
      auto os = open_out(trace_path);
      write_trace_csv(os, trace);
    }
    const json summary = summary_json(cfg, trace);
    {
      auto os = open_out(summary_path);
      os << summary.dump(2) << '\n';
    }
    runs.push_back({{"seed", seed},
                    {"final_theta", summary["final_theta"]},
                    {"trace", trace_path.string()},
                    {"summary", summary_path.string()}});
  }
  print({{"runs", runs}});
  return kExitOk;
}

int cmd_evcharge(const Options& opt) {
  ExperimentConfig cfg = evcharge_preset();
  if (opt.iterations) cfg.regulator.K = *opt.iterations;
  json runs = json::array();
  const auto seeds = seed_list(opt, cfg.regulator.seed);
  const bool sweep = seeds.size() > 1;
  for (const auto seed : seeds) {
    cfg.regulator.seed = seed;
    const EVChargeReport report = run_evcharge(cfg);
    fs::path trace_path = resolve(opt, cfg.output.trace_path);
    fs::path series_path = resolve(opt, "evcharge_series.csv");
    fs::path summary_path = resolve(opt, cfg.output.summary_path);
    if (sweep) {
      trace_path = with_seed_suffix(trace_path, seed);
      series_path = with_seed_suffix(series_path, seed);
      summary_path = with_seed_suffix(summary_path, seed);
    }
    {
      auto os = open_out(trace_path);
      write_trace_csv(os, report.trace);
    }
    {
      auto os = open_out(series_path);
      write_evcharge_series(os, report);
    }
    json summary = summary_json(cfg, report.trace);
    summary["theta_star_grid"] = report.grid.theta_star[0];
    summary["F_star_grid"] = report.grid.F_star;
    {
      auto os = open_out(summary_path);
      os << summary.dump(2) << '\n';
    }
    runs.push_back({{"seed", seed},
                    {"final_theta", summary["final_theta"]},
                    {"theta_star_grid", report.grid.theta_star[0]},
                    {"trace", trace_path.string()},
                    {"series", series_path.string()},
                    {"summary", summary_path.string()}});
  }
  print({{"runs", runs}});
  return kExitOk;
}

int cmd_example1() {
  const auto checks = example1_checks();
  const json out = checks_json(checks);
  print(out);
  if (!out["all_pass"].get<bool>()) {
    std::string failed;
    for (const auto& c : checks) {
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    throw OracleMismatch("closed form and solver disagree: " + failed);
  }
  return kExitOk;
}

int cmd_check_constants(const Options& opt) {
  const ExperimentConfig cfg = config_from(opt);
  ExperimentConfig lenient = cfg;
  lenient.regulator.allow_uncertified_alpha = true;
  const Experiment e = build_experiment(lenient);
  print(constants_json(e));
  return kExitOk;
}

int cmd_fixtures(const Options& opt) {
  const fs::path path = resolve(opt, "oracles.json");
  auto os = open_out(path);
  os << oracle_fixtures().dump(2) << '\n';
  print({{"written", path.string()}});
  return kExitOk;
}

int report_error(const char* kind, const std::string& message, int code) {
  const json err = {{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilevel social optimization over noncooperative games"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config_path, "experiment config (JSON)");
    if (needs_config) c->required();
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--out", opt.out_dir, fmt::format("output directory (default ${} or .)", kOutDirEnv));
  };

  auto* ne = app.add_subcommand("ne", "one distributed equilibrium solve");
  add_common(ne, true);

  auto* regulate = app.add_subcommand("regulate", "full regulator run, trace CSV and summary JSON");
  add_common(regulate, true);
  regulate->add_option("--seeds", opt.seeds, "seed sweep A..B (inclusive)");
  regulate->add_flag("--override-alpha", opt.override_alpha, "run with an uncertified outer step");
  regulate->add_option("--iterations", opt.iterations, "override regulator.K");

  auto* example1 = app.add_subcommand("example1", "closed-form oracle cross-checks");

  auto* evcharge = app.add_subcommand("evcharge", "EV charging reproduction preset");
  evcharge->add_option("--seed", opt.seed, "random seed");
  evcharge->add_option("--seeds", opt.seeds, "seed sweep A..B (inclusive)");
  evcharge->add_option("--out", opt.out_dir, "output directory");
  evcharge->add_option("--iterations", opt.iterations, "override K");

  auto* constants = app.add_subcommand("check-constants", "print game constants and step certificates");
  add_common(constants, true);
  constants->add_flag("--override-alpha", opt.override_alpha, "accepted for symmetry");

  auto* fixtures = app.add_subcommand("fixtures", "regenerate oracle fixture files");
  fixtures->add_option("--out", opt.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitConfig);
  }

  try {
    if (*ne) return cmd_ne(opt);
    if (*regulate) return cmd_regulate(opt);
    if (*example1) return cmd_example1();
    if (*evcharge) return cmd_evcharge(opt);
    if (*constants) return cmd_check_constants(opt);
    if (*fixtures) return cmd_fixtures(opt);
  } catch (const ConfigError& e) {
    return report_error("config", e.what(), kExitConfig);
  } catch (const DimensionError& e) {
    return report_error("config", e.what(), kExitConfig);
  } catch (const DivergenceError& e) {
    return report_error("divergence", e.what(), kExitDivergence);
  } catch (const OracleMismatch& e) {
    return report_error("oracle_mismatch", e.what(), kExitOracle);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kExitFailure);
  }
  return kExitFailure;
}
