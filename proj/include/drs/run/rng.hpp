#pragma once

#include <cstdint>
#include <random>

namespace drs::run {

/// splitmix64 mix of a (seed, key) pair; used to derive stream seeds.
uint64_t mix_seed(uint64_t seed, uint64_t key);

/// Independent named generators for one run. Consuming one stream never
/// advances another, which is what makes the beta = 0 shaped run replay the
/// plain run's policy trajectory exactly.
struct RngStreams {
  std::mt19937_64 env;
  std::mt19937_64 policy;
  std::mt19937_64 dress;
  std::mt19937_64 eval;
};

RngStreams make_streams(uint64_t seed);

}  // namespace drs::run
