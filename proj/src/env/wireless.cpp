#include "drs/env/wireless.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drs::env {

void WirelessConfig::validate() const {
  if (n_users < 0) throw std::invalid_argument("WirelessConfig: n_users < 0");
  if (b_max_hz <= 0 || p_max_w <= 0 || c_max <= 0)
    throw std::invalid_argument("WirelessConfig: resource caps must be > 0");
  if (m_antennas < 1) throw std::invalid_argument("WirelessConfig: m_antennas < 1");
  if (alpha_pathloss <= 0 || noise_power <= 0 || latency_limit <= 0)
    throw std::invalid_argument("WirelessConfig: alpha, sigma^2, L_th must be > 0");
  if (episode_length < 1)
    throw std::invalid_argument("WirelessConfig: episode_length < 1");
  if (delta_x_max < 0 || delta_x_max > 1)
    throw std::invalid_argument("WirelessConfig: delta_x_max outside [0,1]");
  if (demand_min <= 0 || demand_max < demand_min)
    throw std::invalid_argument("WirelessConfig: bad demand range");
}

void AllocationAction::validate(int n_users) const {
  const auto check = [n_users](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != n_users)
      throw std::invalid_argument(std::string("AllocationAction: bad length for ") + name);
    double sum = 0.0;
    for (double x : v) {
      if (x < 0.0 || x > 1.0)
        throw std::invalid_argument(std::string("AllocationAction: entry outside [0,1] in ") + name);
      sum += x;
    }
    if (sum > 1.0 + 1e-9)
      throw std::invalid_argument(std::string("AllocationAction: sum > 1 for ") + name);
  };
  check(bandwidth, "bandwidth");
  check(power, "power");
  check(compute, "compute");
}

NetworkState reset(const WirelessConfig& config, std::mt19937_64& rng) {
  config.validate();
  NetworkState state;
  state.t = 0;
  state.users.resize(config.n_users);
  std::uniform_real_distribution<double> upos(0.0, 1.0);
  std::uniform_real_distribution<double> udem(config.demand_min, config.demand_max);
  std::uniform_real_distribution<double> ulreq(config.lreq_min_factor * config.latency_limit,
                                               config.lreq_max_factor * config.latency_limit);
  std::uniform_real_distribution<double> utreq(config.treq_min, config.treq_max);
  for (auto& u : state.users) {
    u.position = upos(rng);
    u.demand = udem(rng);
    u.latency_req = ulreq(rng);
    u.throughput_req = utreq(rng);
    u.patience = config.initial_patience;
    u.channel_gain = sample_channel_gain(config.m_antennas, rng);
    u.active = true;
  }
  return state;
}

NetworkState reset(const WirelessConfig& config, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return reset(config, rng);
}

void update_positions(NetworkState& state, const WirelessConfig& config,
                      std::mt19937_64& rng) {
  if (config.delta_x_max == 0.0) return;
  std::uniform_real_distribution<double> u(-config.delta_x_max, config.delta_x_max);
  for (auto& user : state.users)
    user.position = std::min(std::max(user.position + u(rng), 0.0), 1.0);
}

double sample_channel_gain(int m_antennas, std::mt19937_64& rng) {
  if (m_antennas < 1) throw std::invalid_argument("sample_channel_gain: M < 1");
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  double g = 0.0;
  for (int m = 0; m < m_antennas; ++m) {
    const double re = n(rng), im = n(rng);
    g += re * re + im * im;
  }
  return g;
}

std::vector<double> compute_sinr(std::span<const double> power_frac,
                                 std::span<const double> gains,
                                 std::span<const double> positions,
                                 const WirelessConfig& config) {
  const size_t n = power_frac.size();
  if (gains.size() != n || positions.size() != n)
    throw std::invalid_argument("compute_sinr: length mismatch");
  // received power per user, p_n * P_max * D_n^-alpha * g_n
  std::vector<double> rx(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = std::max(positions[i] * config.cell_radius_km(), config.d_min_km);
    rx[i] = power_frac[i] * config.p_max_w * std::pow(d, -config.alpha_pathloss) * gains[i];
  }
  std::vector<double> sinr(n);
  for (size_t i = 0; i < n; ++i) {
    double interference = 0.0;
    for (size_t j = 0; j < n; ++j)
      if (j != i) interference += rx[j];
    sinr[i] = rx[i] / (interference + config.noise_power);
  }
  return sinr;
}

std::vector<double> compute_throughput(std::span<const double> bandwidth_frac,
                                       std::span<const double> sinr,
                                       double b_max) {
  if (bandwidth_frac.size() != sinr.size())
    throw std::invalid_argument("compute_throughput: length mismatch");
  std::vector<double> t(sinr.size());
  for (size_t i = 0; i < t.size(); ++i)
    t[i] = bandwidth_frac[i] * b_max * std::log2(1.0 + sinr[i]);
  return t;
}

double compute_latency(double demand, double throughput, double compute_frac,
                       double c_max, double sentinel) {
  if (demand <= 0) throw std::invalid_argument("compute_latency: demand <= 0");
  if (throughput <= 0.0 || compute_frac <= 0.0) return sentinel;
  return demand / throughput + demand / (compute_frac * c_max);
}

std::pair<double, RewardCase> compute_reward(
    std::span<const double> latencies, std::span<const double> service_rates,
    std::span<const int> patience, const WirelessConfig& config) {
  const size_t n = latencies.size();
  if (service_rates.size() != n || patience.size() != n)
    throw std::invalid_argument("compute_reward: length mismatch");
  for (double l : latencies)
    if (l > config.latency_limit) return {0.0, RewardCase::NoFeedback};
  double reward = 0.0;
  for (size_t i = 0; i < n; ++i) {
    reward += service_rates[i];
    double excess = latencies[i] - config.latency_limit;
    if (config.clamp_latency_bonus && excess < 0.0) excess = 0.0;
    reward -= config.lambda_penalty * excess;
    if (patience[i] <= config.patience_threshold) reward -= config.mu_penalty;
  }
  return {reward, RewardCase::Degraded};
}

AllocationAction project_action(std::span<const double> raw) {
  if (raw.size() % 3 != 0)
    throw std::invalid_argument("project_action: raw length must be 3N");
  const size_t n = raw.size() / 3;
  AllocationAction a;
  a.bandwidth.resize(n);
  a.power.resize(n);
  a.compute.resize(n);
  for (size_t i = 0; i < n; ++i) {
    a.bandwidth[i] = std::clamp((raw[3 * i] + 1.0) / 2.0, 0.0, 1.0);
    a.power[i] = std::clamp((raw[3 * i + 1] + 1.0) / 2.0, 0.0, 1.0);
    a.compute[i] = std::clamp((raw[3 * i + 2] + 1.0) / 2.0, 0.0, 1.0);
  }
  const auto normalize = [](std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum > 1.0)
      for (double& x : v) x /= sum;
  };
  normalize(a.bandwidth);
  normalize(a.power);
  normalize(a.compute);
  return a;
}

std::vector<double> encode_observation(const NetworkState& state,
                                       const WirelessConfig& config) {
  std::vector<double> obs(5 * state.users.size(), 0.0);
  for (size_t i = 0; i < state.users.size(); ++i) {
    const auto& u = state.users[i];
    if (!u.active) continue;
    obs[5 * i + 0] = u.channel_gain / config.gain_scale();
    obs[5 * i + 1] = u.demand / config.demand_max;
    obs[5 * i + 2] = u.latency_req / (config.lreq_max_factor * config.latency_limit);
    obs[5 * i + 3] = static_cast<double>(u.patience) / config.initial_patience;
    obs[5 * i + 4] = u.position;
  }
  return obs;
}

NetworkState decode_observation(std::span<const double> obs,
                                const WirelessConfig& config) {
  if (obs.size() % 5 != 0)
    throw std::invalid_argument("decode_observation: length must be 5N");
  NetworkState state;
  state.users.resize(obs.size() / 5);
  for (size_t i = 0; i < state.users.size(); ++i) {
    auto& u = state.users[i];
    u.channel_gain = obs[5 * i + 0] * config.gain_scale();
    u.demand = obs[5 * i + 1] * config.demand_max;
    u.latency_req = obs[5 * i + 2] * config.lreq_max_factor * config.latency_limit;
    u.patience = static_cast<int>(std::lround(obs[5 * i + 3] * config.initial_patience));
    u.position = obs[5 * i + 4];
    u.active = obs[5 * i + 3] > 0.0;
  }
  return state;
}

StepOutcome step(const NetworkState& state, const AllocationAction& action,
                 const WirelessConfig& config, std::mt19937_64& rng) {
  const int n = config.n_users;
  action.validate(n);
  StepOutcome out;
  out.next_state = state;

  if (n == 0 || std::none_of(state.users.begin(), state.users.end(),
                             [](const UserState& u) { return u.active; })) {
    out.reward = 0.0;
    out.done = true;
    out.info.reward_case = RewardCase::NoFeedback;
    out.info.latencies.assign(n, 0.0);
    out.info.throughputs.assign(n, 0.0);
    out.info.service_rates.assign(n, 0.0);
    return out;
  }

  // inactive users neither transmit nor count toward the reward
  std::vector<double> p(n), b(n), c(n), gains(n), positions(n);
  for (int i = 0; i < n; ++i) {
    const auto& u = state.users[i];
    p[i] = u.active ? action.power[i] : 0.0;
    b[i] = u.active ? action.bandwidth[i] : 0.0;
    c[i] = u.active ? action.compute[i] : 0.0;
    gains[i] = u.channel_gain;
    positions[i] = u.position;
  }

  auto sinr = compute_sinr(p, gains, positions, config);
  auto throughput = compute_throughput(b, sinr, config.b_max_hz);
  out.info.throughputs = throughput;
  out.info.latencies.resize(n);
  out.info.service_rates.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!state.users[i].active) {
      out.info.latencies[i] = 0.0;
      out.info.throughputs[i] = 0.0;
      out.info.service_rates[i] = 0.0;
      continue;
    }
    out.info.latencies[i] =
        compute_latency(state.users[i].demand, throughput[i], c[i], config.c_max,
                        config.latency_sentinel);
    out.info.service_rates[i] = 1.0 / out.info.latencies[i];
  }

  std::vector<double> act_lat, act_srv;
  std::vector<int> act_pat;
  for (int i = 0; i < n; ++i) {
    if (!state.users[i].active) continue;
    act_lat.push_back(out.info.latencies[i]);
    act_srv.push_back(out.info.service_rates[i]);
    act_pat.push_back(state.users[i].patience);
  }
  auto [reward, rcase] = compute_reward(act_lat, act_srv, act_pat, config);
  out.reward = reward;
  out.info.reward_case = rcase;

  // patience decay on unmet QoS; exhausted users leave the system
  for (int i = 0; i < n; ++i) {
    auto& u = out.next_state.users[i];
    if (!u.active) continue;
    const bool unmet = out.info.throughputs[i] < u.throughput_req ||
                       out.info.latencies[i] > u.latency_req;
    if (unmet && u.patience > 0) u.patience -= 1;
    if (u.patience == 0) u.active = false;
  }

  update_positions(out.next_state, config, rng);
  for (auto& u : out.next_state.users)
    u.channel_gain = sample_channel_gain(config.m_antennas, rng);
  out.next_state.t = state.t + 1;

  const bool all_gone =
      std::none_of(out.next_state.users.begin(), out.next_state.users.end(),
                   [](const UserState& u) { return u.active; });
  out.done = out.next_state.t >= config.episode_length || all_gone;
  return out;
}

}  // namespace drs::env
