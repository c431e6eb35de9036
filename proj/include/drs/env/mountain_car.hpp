#pragma once

#include <cstdint>
#include <random>

namespace drs::env {

/// Continuous-action mountain car: a sparse-reward control task where the
/// +100 goal bonus is only reachable by momentum building while every other
/// step costs -0.1 * force^2.
struct CarState {
  double position = -0.5;  // [-1.2, 0.6]
  double velocity = 0.0;   // [-0.07, 0.07]
};

inline constexpr double kCarMinPosition = -1.2;
inline constexpr double kCarMaxPosition = 0.6;
inline constexpr double kCarMaxVelocity = 0.07;
inline constexpr double kCarGoalPosition = 0.45;
inline constexpr int kCarMaxEpisodeSteps = 999;

CarState car_reset(std::mt19937_64& rng);
CarState car_reset(uint64_t seed);

struct CarStepResult {
  CarState next;
  double reward = 0.0;
  bool goal_reached = false;
};

/// One step of the dynamics; |force| <= 1. Time-limit termination is the
/// caller's job (kCarMaxEpisodeSteps).
CarStepResult car_step(const CarState& state, double force);

}  // namespace drs::env
