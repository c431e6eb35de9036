#include "drs/run/replay_oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drs::run {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

struct TraceUser {
  bool active;
  double x, g, d;
  int rho;
  double b, p, c;
  double latency, throughput;
};

}  // namespace

ReplayReport verify_trace_rows(const std::vector<std::string>& rows,
                               const env::WirelessConfig& cfg) {
  const int n = cfg.n_users;
  ReplayReport report;
  const auto note = [&](double logged, double computed, const char* field,
                        long row) {
    const double d = std::abs(logged - computed);
    if (d > report.max_discrepancy) {
      report.max_discrepancy = d;
      report.worst_field = field;
      report.worst_row = row;
    }
  };

  for (size_t ri = 0; ri < rows.size(); ++ri) {
    auto cells = split_csv(rows[ri]);
    if (static_cast<int>(cells.size()) != 1 + 10 * n + 2)
      throw std::runtime_error("replay: bad column count at row " +
                               std::to_string(ri));
    std::vector<TraceUser> users(n);
    for (int i = 0; i < n; ++i) {
      const int base = 1 + 10 * i;
      auto& u = users[i];
      u.active = cells[base] == "1";
      u.x = std::stod(cells[base + 1]);
      u.g = std::stod(cells[base + 2]);
      u.d = std::stod(cells[base + 3]);
      u.rho = std::stoi(cells[base + 4]);
      u.b = std::stod(cells[base + 5]);
      u.p = std::stod(cells[base + 6]);
      u.c = std::stod(cells[base + 7]);
      u.latency = std::stod(cells[base + 8]);
      u.throughput = std::stod(cells[base + 9]);
    }
    const double logged_reward = std::stod(cells[1 + 10 * n]);
    const int logged_case = std::stoi(cells[1 + 10 * n + 1]);

    // received power per user; inactive users do not transmit
    std::vector<double> rx(n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (!users[i].active) continue;
      double dist = users[i].x * (cfg.cell_diameter_km / 2.0);
      if (dist < cfg.d_min_km) dist = cfg.d_min_km;
      rx[i] = users[i].p * cfg.p_max_w * std::pow(dist, -cfg.alpha_pathloss) *
              users[i].g;
    }
    bool any_violation = false;
    std::vector<double> latency(n, 0.0), rate(n, 0.0);
    for (int i = 0; i < n; ++i) {
      if (!users[i].active) {
        note(users[i].latency, 0.0, "latency", ri);
        note(users[i].throughput, 0.0, "throughput", ri);
        continue;
      }
      double interference = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) interference += rx[j];
      const double sinr = rx[i] / (interference + cfg.noise_power);
      const double thr =
          users[i].b * cfg.b_max_hz * std::log2(1.0 + sinr);
      note(users[i].throughput, thr, "throughput", ri);
      double lat;
      if (thr <= 0.0 || users[i].c <= 0.0) {
        lat = cfg.latency_sentinel;
      } else {
        lat = users[i].d / thr + users[i].d / (users[i].c * cfg.c_max);
      }
      note(users[i].latency, lat, "latency", ri);
      latency[i] = lat;
      rate[i] = 1.0 / lat;
      if (lat > cfg.latency_limit) any_violation = true;
    }

    bool any_active = false;
    for (const auto& u : users) any_active = any_active || u.active;

    double reward = 0.0;
    int rcase = 1;
    if (any_active && !any_violation) {
      rcase = 2;
      for (int i = 0; i < n; ++i) {
        if (!users[i].active) continue;
        reward += rate[i];
        double excess = latency[i] - cfg.latency_limit;
        if (cfg.clamp_latency_bonus && excess < 0.0) excess = 0.0;
        reward -= cfg.lambda_penalty * excess;
        if (users[i].rho <= cfg.patience_threshold) reward -= cfg.mu_penalty;
      }
    }
    note(logged_reward, reward, "reward", ri);
    if (rcase != logged_case) report.case_mismatches += 1;
    report.rows_checked += 1;
  }
  return report;
}

ReplayReport verify_trace_file(const std::string& path,
                               const env::WirelessConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("replay: cannot open " + path);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("replay: empty trace " + path);
  std::vector<std::string> rows;
  while (std::getline(f, line))
    if (!line.empty()) rows.push_back(line);
  return verify_trace_rows(rows, cfg);
}

}  // namespace drs::run
