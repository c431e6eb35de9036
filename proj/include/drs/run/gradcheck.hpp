#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drs::run {

/// One finite-difference comparison of an analytic update gradient.
struct GradCheckResult {
  std::string name;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_rel_err < tolerance; }
};

/// Runs central-difference checks on every network update operation
/// (SAC critic/actor, TD3, DDPG, REINFORCE, diffusion generation chain,
/// evaluation TD loss) on tiny smooth nets. Deterministic per seed.
std::vector<GradCheckResult> run_gradcheck_suite(uint64_t seed);

bool gradcheck_all_pass(const std::vector<GradCheckResult>& results);

}  // namespace drs::run
