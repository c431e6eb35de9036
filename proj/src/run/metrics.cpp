#include "drs/run/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace drs::run {

namespace {

void append_row(std::ostringstream& o, const MetricsRecord& r) {
  o << r.step << ',' << r.episode_return_env << ',' << r.episode_return_aux
    << ',' << r.episode_len << ',' << r.case1_fraction << ',' << r.wall_ms
    << '\n';
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream o;
  o.precision(17);
  o << kMetricsHeader << '\n';
  for (const auto& r : records) append_row(o, r);
  return o.str();
}

void write_metrics_csv(const std::vector<MetricsRecord>& records,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  f << metrics_to_csv(records);
  if (!f) throw std::runtime_error("write_metrics_csv: write failed " + path);
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_metrics_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != kMetricsHeader)
    throw std::runtime_error("read_metrics_csv: bad header in " + path);
  std::vector<MetricsRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    MetricsRecord r;
    std::getline(ss, cell, ',');
    r.step = std::stol(cell);
    std::getline(ss, cell, ',');
    r.episode_return_env = std::stod(cell);
    std::getline(ss, cell, ',');
    r.episode_return_aux = std::stod(cell);
    std::getline(ss, cell, ',');
    r.episode_len = std::stol(cell);
    std::getline(ss, cell, ',');
    r.case1_fraction = std::stod(cell);
    std::getline(ss, cell, ',');
    r.wall_ms = std::stol(cell);
    out.push_back(r);
  }
  return out;
}

std::vector<double> smoothed_env_returns(const std::vector<MetricsRecord>& r,
                                         int window) {
  if (window < 1) throw std::invalid_argument("smoothed_env_returns: window < 1");
  std::vector<double> out(r.size());
  double acc = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    acc += r[i].episode_return_env;
    if (i >= static_cast<size_t>(window)) acc -= r[i - window].episode_return_env;
    const size_t n = std::min(i + 1, static_cast<size_t>(window));
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

std::string sweep_long_csv(const std::vector<SweepRun>& runs) {
  std::ostringstream o;
  o.precision(17);
  o << "beta,k,latency_limit,seed," << kMetricsHeader << '\n';
  for (const auto& run : runs) {
    for (const auto& r : run.records) {
      o << run.beta << ',' << run.k << ',' << run.latency_limit << ','
        << run.seed << ',';
      append_row(o, r);
    }
  }
  return o.str();
}

std::vector<SweepSummaryRow> sweep_summary(const std::vector<SweepRun>& runs,
                                           int smooth_window) {
  std::map<std::tuple<double, int, double>, std::vector<double>> cells;
  for (const auto& run : runs) {
    double final_smoothed = 0.0;
    if (!run.records.empty())
      final_smoothed = smoothed_env_returns(run.records, smooth_window).back();
    cells[{run.beta, run.k, run.latency_limit}].push_back(final_smoothed);
  }
  std::vector<SweepSummaryRow> out;
  for (const auto& [key, finals] : cells) {
    SweepSummaryRow row;
    std::tie(row.beta, row.k, row.latency_limit) = key;
    row.n_seeds = static_cast<int>(finals.size());
    for (double v : finals) row.mean_final_return += v;
    row.mean_final_return /= static_cast<double>(finals.size());
    row.median_final_return = median_of(finals);
    out.push_back(row);
  }
  return out;
}

std::string sweep_summary_csv(const std::vector<SweepSummaryRow>& rows) {
  std::ostringstream o;
  o.precision(17);
  o << "beta,k,latency_limit,n_seeds,mean_final_return,median_final_return\n";
  for (const auto& r : rows)
    o << r.beta << ',' << r.k << ',' << r.latency_limit << ',' << r.n_seeds
      << ',' << r.mean_final_return << ',' << r.median_final_return << '\n';
  return o.str();
}

}  // namespace drs::run
