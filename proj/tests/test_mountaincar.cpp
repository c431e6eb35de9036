#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "drs/env/env.hpp"
#include "drs/env/mountain_car.hpp"

using namespace drs::env;

TEST_CASE("car_reset: deterministic and inside the start band") {
  auto a = car_reset(uint64_t{5});
  auto b = car_reset(uint64_t{5});
  CHECK(a.position == b.position);
  CHECK(a.velocity == 0.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    auto s = car_reset(rng);
    CHECK(s.position >= -0.6);
    CHECK(s.position <= -0.4);
  }
}

TEST_CASE("car_reset: start positions uniform by KS at 1% level") {
  std::mt19937_64 rng(9);
  const int n = 10000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = (car_reset(rng).position + 0.6) / 0.2;
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i)
    d = std::max({d, (i + 1.0) / n - xs[i], xs[i] - static_cast<double>(i) / n});
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("car_step: zero force at the valley bottom barely moves") {
  CarState s;
  s.position = -std::acos(0.0) / 3.0;  // cos(3x) = 0
  s.velocity = 0.0;
  auto r = car_step(s, 0.0);
  CHECK(std::abs(r.next.position - s.position) < 1e-3);
}

TEST_CASE("car_step: goal yields +100, otherwise the force penalty") {
  CarState s;
  s.position = 0.449;
  s.velocity = 0.07;
  auto r = car_step(s, 1.0);
  CHECK(r.goal_reached);
  CHECK(r.reward == 100.0);

  s.position = -0.5;
  s.velocity = 0.0;
  r = car_step(s, 0.5);
  CHECK_FALSE(r.goal_reached);
  CHECK(r.reward == doctest::Approx(-0.1 * 0.25));
}

TEST_CASE("car_step: clipping keeps state in range; zero-force episode runs full length") {
  MountainCarEnv env;
  std::mt19937_64 rng(3);
  env.reset(rng);
  std::vector<double> zero{0.0};
  int steps = 0;
  while (true) {
    auto s = env.step(zero, rng);
    ++steps;
    CHECK(s.observation[0] >= kCarMinPosition);
    CHECK(s.observation[0] <= kCarMaxPosition);
    CHECK(std::abs(s.observation[1]) <= 1.0 + 1e-12);  // velocity / v_max
    if (s.done) break;
  }
  CHECK(steps == kCarMaxEpisodeSteps);
}

TEST_CASE("car_step: rejects out-of-range force") {
  CarState s;
  CHECK_THROWS(car_step(s, 1.5));
}

TEST_CASE("car dynamics: determinism under identical seeds and forces") {
  MountainCarEnv a, b;
  std::mt19937_64 ra(7), rb(7), fr(8);
  auto oa = a.reset(ra);
  auto ob = b.reset(rb);
  CHECK(oa == ob);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> f{u(fr)};
    auto sa = a.step(f, ra);
    auto sb = b.step(f, rb);
    CHECK(sa.observation == sb.observation);
    CHECK(sa.reward == sb.reward);
    if (sa.done) break;
  }
}
