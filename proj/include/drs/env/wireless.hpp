#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace drs::env {

/// Multi-user base-station resource allocation with a latency-gated sparse
/// reward: whenever any active user's latency exceeds latency_limit the
/// environment returns exactly zero reward (an outage, "no feedback" step).
struct WirelessConfig {
  int n_users = 3;
  double b_max_hz = 20.0;       // total bandwidth
  double p_max_w = 10.0;        // total transmit power
  double c_max = 100.0;         // total compute, cycles/s
  int m_antennas = 4;
  double alpha_pathloss = 3.0;
  double noise_power = 1e-2;    // sigma^2, W
  double latency_limit = 0.02;  // s, reward gate
  double lambda_penalty = 1.0;
  double mu_penalty = 0.5;
  int patience_threshold = 2;
  int initial_patience = 10;
  int episode_length = 200;
  double delta_x_max = 0.02;
  double cell_diameter_km = 10.0;
  double demand_min = 0.5, demand_max = 2.0;        // normalized bits
  double treq_min = 0.5, treq_max = 1.5;            // normalized bits/s
  double lreq_min_factor = 1.0, lreq_max_factor = 2.0;  // x latency_limit
  double beta_reward = 0.2;     // consumed by the training harness
  bool clamp_latency_bonus = false;  // clamp the (L - L_th) term at 0
  double d_min_km = 0.01;            // distance floor near the base station
  double latency_sentinel = 1e9;     // stands in for +inf

  double cell_radius_km() const { return cell_diameter_km / 2.0; }
  double gain_scale() const { return 3.0 * m_antennas; }  // obs normalization
  void validate() const;
};

struct UserState {
  double position = 0.0;        // normalized [0,1], 0 = base station
  double demand = 1.0;          // bits
  double latency_req = 0.02;    // s, per-user QoS target (patience only)
  double throughput_req = 1.0;  // bits/s, per-user QoS target (patience only)
  int patience = 0;             // steps remaining
  double channel_gain = 0.0;    // sum of |h_m|^2 across antennas
  bool active = true;
};

struct NetworkState {
  std::vector<UserState> users;
  int t = 0;
};

struct AllocationAction {
  std::vector<double> bandwidth;  // fractions, sum <= 1
  std::vector<double> power;
  std::vector<double> compute;
  void validate(int n_users) const;
};

enum class RewardCase { NoFeedback, Degraded };

struct StepInfo {
  std::vector<double> latencies;      // sentinel-valued when starved
  std::vector<double> throughputs;
  std::vector<double> service_rates;
  RewardCase reward_case = RewardCase::NoFeedback;
};

struct StepOutcome {
  NetworkState next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

NetworkState reset(const WirelessConfig& config, std::mt19937_64& rng);
NetworkState reset(const WirelessConfig& config, uint64_t seed);

void update_positions(NetworkState& state, const WirelessConfig& config,
                      std::mt19937_64& rng);

/// Gamma(M, 1)-distributed combined gain: sum of M squared magnitudes of
/// unit-variance complex normals.
double sample_channel_gain(int m_antennas, std::mt19937_64& rng);

std::vector<double> compute_sinr(std::span<const double> power_frac,
                                 std::span<const double> gains,
                                 std::span<const double> positions,
                                 const WirelessConfig& config);

std::vector<double> compute_throughput(std::span<const double> bandwidth_frac,
                                       std::span<const double> sinr,
                                       double b_max);

double compute_latency(double demand, double throughput, double compute_frac,
                       double c_max, double sentinel);

/// Two-case reward over the users supplied (callers pass active users only).
std::pair<double, RewardCase> compute_reward(
    std::span<const double> latencies, std::span<const double> service_rates,
    std::span<const int> patience, const WirelessConfig& config);

/// Maps raw agent output in [-1,1]^{3N}, laid out as per-user (b,p,c)
/// triples, onto the constrained simplexes.
AllocationAction project_action(std::span<const double> raw);

/// Fixed layout, 5 entries per user:
/// [gain/gain_scale, demand/demand_max, latency_req/(lreq_max_factor*L_th),
///  patience/initial_patience, position]; inactive users zero-filled.
std::vector<double> encode_observation(const NetworkState& state,
                                       const WirelessConfig& config);

/// Inverse of encode_observation for active slots (test support).
NetworkState decode_observation(std::span<const double> obs,
                                const WirelessConfig& config);

StepOutcome step(const NetworkState& state, const AllocationAction& action,
                 const WirelessConfig& config, std::mt19937_64& rng);

inline int observation_dim(const WirelessConfig& c) { return 5 * c.n_users; }
inline int action_dim(const WirelessConfig& c) { return 3 * c.n_users; }

}  // namespace drs::env
