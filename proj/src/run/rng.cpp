#include "drs/run/rng.hpp"

namespace drs::run {

uint64_t mix_seed(uint64_t seed, uint64_t key) {
  // splitmix64 finalizer over the keyed state
  uint64_t z = seed + key * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStreams make_streams(uint64_t seed) {
  RngStreams s;
  s.env.seed(mix_seed(seed, 1));
  s.policy.seed(mix_seed(seed, 2));
  s.dress.seed(mix_seed(seed, 3));
  s.eval.seed(mix_seed(seed, 4));
  return s;
}

}  // namespace drs::run
