#include "drs/env/mountain_car.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drs::env {

CarState car_reset(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.6, -0.4);
  CarState s;
  s.position = u(rng);
  s.velocity = 0.0;
  return s;
}

CarState car_reset(uint64_t seed) {
  std::mt19937_64 rng(seed);
  return car_reset(rng);
}

CarStepResult car_step(const CarState& state, double force) {
  if (std::abs(force) > 1.0 + 1e-12)
    throw std::invalid_argument("car_step: |force| must be <= 1");
  CarStepResult r;
  double v = state.velocity + 0.0015 * force - 0.0025 * std::cos(3.0 * state.position);
  v = std::clamp(v, -kCarMaxVelocity, kCarMaxVelocity);
  double x = std::clamp(state.position + v, kCarMinPosition, kCarMaxPosition);
  r.next.position = x;
  r.next.velocity = v;
  r.goal_reached = x >= kCarGoalPosition;
  r.reward = r.goal_reached ? 100.0 : -0.1 * force * force;
  return r;
}

}  // namespace drs::env
