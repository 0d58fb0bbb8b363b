#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "socialopt/errors.hpp"
#include "socialopt/regulator.hpp"

namespace socialopt {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError(fmt::format("bad number '{}' in trace", s));
  return v;
}

}  // namespace

std::string trace_csv_header(Eigen::Index theta_dim, int n_players) {
  std::string h = "k";
  for (Eigen::Index j = 0; j < theta_dim; ++j) h += fmt::format(",theta_{}", j);
  h += ",t_k,eps_bound,eps_measured,social_cost";
  for (int i = 1; i <= n_players; ++i) h += fmt::format(",cost_{}", i);
  h += ",grad_norm,dist_theta,stat_mc_norm";
  return h;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  Eigen::Index n = trace.final_theta.size();
  int players = trace.records.empty() ? 0 : static_cast<int>(trace.records.front().player_costs.size());
  os << trace_csv_header(n, players) << '\n';
  for (const auto& r : trace.records) {
    os << r.k;
    for (Eigen::Index j = 0; j < r.theta.size(); ++j) os << ',' << num(r.theta[j]);
    os << ',' << r.t_k << ',' << num(r.epsilon_k_bound) << ',' << opt_num(r.epsilon_k_measured)
       << ',' << num(r.social_cost);
    for (Eigen::Index i = 0; i < r.player_costs.size(); ++i) os << ',' << num(r.player_costs[i]);
    os << ',' << num(r.grad_estimate_norm) << ',' << num(r.dist_to_theta_set) << ','
       << opt_num(r.stationarity_mc_norm) << '\n';
  }
}

std::vector<IterationRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trace file");
  const auto header = split(line);
  Eigen::Index theta_dim = 0;
  int players = 0;
  for (const auto& h : header) {
    if (h.rfind("theta_", 0) == 0) ++theta_dim;
    if (h.rfind("cost_", 0) == 0) ++players;
  }
  if (line != trace_csv_header(theta_dim, players)) throw ConfigError("unrecognized trace header");

  std::vector<IterationRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) {
      throw ConfigError(fmt::format("trace row has {} fields, header has {}", f.size(), header.size()));
    }
    IterationRecord r;
    std::size_t c = 0;
    r.k = std::stol(f[c++]);
    r.theta.resize(theta_dim);
    for (Eigen::Index j = 0; j < theta_dim; ++j) r.theta[j] = parse_double(f[c++]);
    r.t_k = std::stol(f[c++]);
    r.epsilon_k_bound = parse_double(f[c++]);
    if (!f[c].empty()) r.epsilon_k_measured = parse_double(f[c]);
    ++c;
    r.social_cost = parse_double(f[c++]);
    r.player_costs.resize(players);
    for (int i = 0; i < players; ++i) r.player_costs[i] = parse_double(f[c++]);
    r.grad_estimate_norm = parse_double(f[c++]);
    r.dist_to_theta_set = parse_double(f[c++]);
    if (!f[c].empty()) r.stationarity_mc_norm = parse_double(f[c]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace socialopt
