#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "drs/nn/gaussian.hpp"
#include "drs/nn/grad_check.hpp"
#include "drs/rl/detpg.hpp"
#include "drs/rl/reinforce.hpp"
#include "drs/rl/replay.hpp"
#include "drs/rl/sac.hpp"

using namespace drs;
using namespace drs::rl;

namespace {

PolicyTransition make_transition(std::mt19937_64& rng, int obs_dim,
                                 int action_dim) {
  std::uniform_real_distribution<double> u(-1, 1);
  PolicyTransition t;
  t.s.resize(obs_dim);
  t.a.resize(action_dim);
  t.s_next.resize(obs_dim);
  for (auto& v : t.s) v = u(rng);
  for (auto& v : t.a) v = u(rng);
  for (auto& v : t.s_next) v = u(rng);
  t.r_total = u(rng);
  t.done = false;
  return t;
}

std::vector<const PolicyTransition*> ptrs(
    const std::vector<PolicyTransition>& v) {
  std::vector<const PolicyTransition*> p;
  for (const auto& t : v) p.push_back(&t);
  return p;
}

SacConfig tiny_sac_config() {
  SacConfig cfg;
  cfg.obs_dim = 3;
  cfg.action_dim = 2;
  cfg.hidden = {4};
  return cfg;
}

// tanh everywhere so central differences are clean
void make_smooth(SacAgent& a) {
  a.actor_spec.activation = nn::Activation::Tanh;
  a.critic_spec.activation = nn::Activation::Tanh;
}

void make_smooth(DetPgAgent& a) {
  a.actor_spec.activation = nn::Activation::Tanh;
  a.critic_spec.activation = nn::Activation::Tanh;
}

}  // namespace

TEST_CASE("replay buffer: FIFO eviction at capacity") {
  ReplayBuffer buf(3);
  std::mt19937_64 rng(1);
  std::vector<PolicyTransition> ts;
  for (int i = 0; i < 4; ++i) {
    auto t = make_transition(rng, 2, 1);
    t.r_total = i;  // tag by insertion order
    ts.push_back(t);
    buf.push(t);
  }
  CHECK(buf.size() == 3);
  CHECK(buf.capacity() == 3);
  CHECK(buf.at(0).r_total == 1.0);  // first pushed was evicted
  CHECK(buf.at(1).r_total == 2.0);
  CHECK(buf.at(2).r_total == 3.0);
  CHECK_THROWS(buf.at(3));
}

TEST_CASE("replay buffer: full-size batch covers every element exactly once") {
  ReplayBuffer buf(8);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 8; ++i) {
    auto t = make_transition(rng, 2, 1);
    t.r_total = i;
    buf.push(t);
  }
  auto batch = buf.sample(8, rng);
  std::set<double> seen;
  for (const auto* t : batch) seen.insert(t->r_total);
  CHECK(seen.size() == 8);
  CHECK_THROWS(buf.sample(9, rng));
  CHECK_THROWS(buf.sample(0, rng));
}

TEST_CASE("replay buffer: sampling uniform by chi-square over 1e5 draws") {
  ReplayBuffer buf(10);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto t = make_transition(rng, 1, 1);
    t.r_total = i;
    buf.push(t);
  }
  const int n = 100000;
  std::vector<int> counts(10, 0);
  for (int i = 0; i < n; ++i) {
    auto batch = buf.sample(1, rng);
    counts[static_cast<int>(batch[0]->r_total)] += 1;
  }
  const double expected = n / 10.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 9 degrees of freedom, 1% critical value
  CHECK(chi2 < 21.67);
}

TEST_CASE("sac_select_action: eval deterministic, both modes bounded") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(11);
  auto agent = SacAgent::make(cfg, rng);
  std::vector<double> obs{0.2, -0.3, 0.5};
  std::mt19937_64 r1(5), r2(6);
  auto a1 = sac_select_action(agent, obs, r1, false);
  auto a2 = sac_select_action(agent, obs, r2, false);
  CHECK(a1 == a2);  // eval mode ignores the rng
  for (int i = 0; i < 500; ++i) {
    auto a = sac_select_action(agent, obs, r1, true);
    for (double v : a) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("sac_select_action: train-mode std matches the head for a linear actor") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(13);
  auto agent = SacAgent::make(cfg, rng);
  // zero weights; output biases give mu = 0, log_std = log(0.01). At this
  // scale tanh is the identity to first order, so the sample std is sigma.
  std::fill(agent.actor.values.begin(), agent.actor.values.end(), 0.0);
  const int n = agent.actor.size();
  const int d = cfg.action_dim;
  for (int j = 0; j < d; ++j) agent.actor.values[n - d + j] = std::log(0.01);
  std::vector<double> obs{0.1, 0.2, 0.3};
  const int samples = 20000;
  double sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    auto a = sac_select_action(agent, obs, rng, true);
    sq += a[0] * a[0];
  }
  const double std_hat = std::sqrt(sq / samples);
  CHECK(std_hat == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("sac_critic_update: done mask and gamma = 0 reduce the target to r") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(17);
  auto agent = SacAgent::make(cfg, rng);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2)};
  ts[0].done = true;
  auto batch = ptrs(ts);

  std::vector<double> input(cfg.obs_dim + cfg.action_dim);
  std::copy(ts[0].s.begin(), ts[0].s.end(), input.begin());
  std::copy(ts[0].a.begin(), ts[0].a.end(), input.begin() + cfg.obs_dim);
  const double q1 = nn::mlp_forward(agent.critic_spec, agent.q1, input)[0];
  const double q2 = nn::mlp_forward(agent.critic_spec, agent.q2, input)[0];
  const double e1 = q1 - ts[0].r_total, e2 = q2 - ts[0].r_total;
  const double expected = 0.5 * (e1 * e1 + e2 * e2);

  std::mt19937_64 ur(1);
  CHECK(sac_critic_update(agent, batch, ur) == doctest::Approx(expected));

  // same reduction via gamma = 0 on a non-terminal transition
  auto agent2 = SacAgent::make(cfg, rng);
  agent2.cfg.gamma = 0.0;
  std::vector<PolicyTransition> ts2{make_transition(rng, 3, 2)};
  auto batch2 = ptrs(ts2);
  std::copy(ts2[0].s.begin(), ts2[0].s.end(), input.begin());
  std::copy(ts2[0].a.begin(), ts2[0].a.end(), input.begin() + cfg.obs_dim);
  const double p1 = nn::mlp_forward(agent2.critic_spec, agent2.q1, input)[0];
  const double p2 = nn::mlp_forward(agent2.critic_spec, agent2.q2, input)[0];
  const double f1 = p1 - ts2[0].r_total, f2 = p2 - ts2[0].r_total;
  std::mt19937_64 ur2(1);
  CHECK(sac_critic_update(agent2, batch2, ur2) ==
        doctest::Approx(0.5 * (f1 * f1 + f2 * f2)));
}

TEST_CASE("sac_critic_backward: gradients match finite differences") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(19);
  auto agent = SacAgent::make(cfg, rng);
  make_smooth(agent);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2),
                                   make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  const uint64_t seed = 555;

  auto loss = [&]() {
    SacAgent tmp = agent;
    std::mt19937_64 r(seed);
    return sac_critic_backward(tmp, batch, r);
  };
  agent.q1.zero_grads();
  agent.q2.zero_grads();
  std::mt19937_64 r(seed);
  sac_critic_backward(agent, batch, r);
  CHECK(nn::finite_diff_check_loss(agent.q1, loss, 1e-6) < 1e-4);
  CHECK(nn::finite_diff_check_loss(agent.q2, loss, 1e-6) < 1e-4);
}

TEST_CASE("sac_actor_backward: gradients match finite differences") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(23);
  auto agent = SacAgent::make(cfg, rng);
  make_smooth(agent);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2),
                                   make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  const uint64_t seed = 777;

  auto loss = [&]() {
    SacAgent tmp = agent;
    std::mt19937_64 r(seed);
    return sac_actor_backward(tmp, batch, r);
  };
  agent.actor.zero_grads();
  std::mt19937_64 r(seed);
  sac_actor_backward(agent, batch, r);
  CHECK(nn::finite_diff_check_loss(agent.actor, loss, 1e-6) < 1e-4);
}

TEST_CASE("sac_actor_update: zero entropy weight and flat critics move nothing") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(29);
  auto agent = SacAgent::make(cfg, rng);
  agent.cfg.alpha_ent = 0.0;  // legal post-construction for this probe
  std::fill(agent.q1.values.begin(), agent.q1.values.end(), 0.0);
  std::fill(agent.q2.values.begin(), agent.q2.values.end(), 0.0);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  auto before = agent.actor.values;
  std::mt19937_64 ur(1);
  sac_actor_update(agent, batch, ur);
  CHECK(agent.actor.values == before);
}

TEST_CASE("sac_actor_update: entropy term alone drives log_std upward") {
  auto cfg = tiny_sac_config();
  std::mt19937_64 rng(31);
  auto agent = SacAgent::make(cfg, rng);
  std::fill(agent.q1.values.begin(), agent.q1.values.end(), 0.0);
  std::fill(agent.q2.values.begin(), agent.q2.values.end(), 0.0);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2),
                                   make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  const int d = cfg.action_dim;
  // start well below the squashed-Gaussian entropy peak so the expected
  // gradient sign is unambiguous
  const int n = agent.actor.size();
  for (int j = 0; j < d; ++j) agent.actor.values[n - d + j] = -2.0;
  auto head0 = nn::mlp_forward(agent.actor_spec, agent.actor, ts[0].s);
  std::mt19937_64 ur(1);
  for (int i = 0; i < 200; ++i) sac_actor_update(agent, batch, ur);
  auto head1 = nn::mlp_forward(agent.actor_spec, agent.actor, ts[0].s);
  for (int j = 0; j < d; ++j) CHECK(head1[d + j] > head0[d + j]);
  CHECK(agent.skipped_updates == 0);
}

TEST_CASE("ddpg: zero critic leaves the actor unchanged") {
  std::mt19937_64 rng(37);
  auto agent = DetPgAgent::make(ddpg_config(3, 2), rng);
  std::fill(agent.q1.values.begin(), agent.q1.values.end(), 0.0);
  std::fill(agent.q1_target.values.begin(), agent.q1_target.values.end(), 0.0);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  auto before = agent.actor.values;
  std::mt19937_64 ur(1);
  auto out = detpg_update(agent, batch, ur);
  CHECK(out.actor_updated);  // delay 1: actor step every update
  CHECK(agent.actor.values == before);
}

TEST_CASE("td3: actor updates exactly floor(n/2) times") {
  std::mt19937_64 rng(41);
  auto agent = DetPgAgent::make(td3_config(3, 2), rng);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  std::mt19937_64 ur(1);
  for (int n = 1; n <= 7; ++n) {
    detpg_update(agent, batch, ur);
    CHECK(agent.critic_updates == n);
    CHECK(agent.actor_updates == n / 2);
  }
}

TEST_CASE("detpg critic and actor gradients match finite differences") {
  std::mt19937_64 rng(43);
  auto cfg = td3_config(3, 2);
  cfg.hidden = {4};
  auto agent = DetPgAgent::make(cfg, rng);
  make_smooth(agent);
  std::vector<PolicyTransition> ts{make_transition(rng, 3, 2),
                                   make_transition(rng, 3, 2)};
  auto batch = ptrs(ts);
  const uint64_t seed = 999;

  auto critic_loss = [&]() {
    DetPgAgent tmp = agent;
    std::mt19937_64 r(seed);
    return detpg_critic_backward(tmp, batch, r);
  };
  agent.q1.zero_grads();
  agent.q2.zero_grads();
  std::mt19937_64 r(seed);
  detpg_critic_backward(agent, batch, r);
  CHECK(nn::finite_diff_check_loss(agent.q1, critic_loss, 1e-6) < 1e-4);
  CHECK(nn::finite_diff_check_loss(agent.q2, critic_loss, 1e-6) < 1e-4);

  auto actor_loss = [&]() {
    DetPgAgent tmp = agent;
    return detpg_actor_backward(tmp, batch);
  };
  agent.actor.zero_grads();
  detpg_actor_backward(agent, batch);
  CHECK(nn::finite_diff_check_loss(agent.actor, actor_loss, 1e-6) < 1e-4);
}

TEST_CASE("discounted_returns: recursion matches brute force") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<EpisodeStep> episode(13);
  for (auto& s : episode) s.r_total = u(rng);
  const double gamma = 0.97;
  auto g = discounted_returns(episode, gamma);
  for (size_t t = 0; t < episode.size(); ++t) {
    double brute = 0.0;
    for (size_t tp = t; tp < episode.size(); ++tp)
      brute += std::pow(gamma, static_cast<double>(tp - t)) * episode[tp].r_total;
    CHECK(g[t] == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("reinforce: all-zero rewards give zero gradient") {
  ReinforceConfig cfg;
  cfg.obs_dim = 2;
  cfg.action_dim = 1;
  cfg.hidden = {4};
  cfg.mean_baseline = false;
  std::mt19937_64 rng(53);
  auto agent = ReinforceAgent::make(cfg, rng);
  std::vector<EpisodeStep> episode(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& s : episode) {
    s.s = {u(rng), u(rng)};
    s.pre_tanh = {u(rng)};
    s.r_total = 0.0;
  }
  auto before = agent.actor.values;
  CHECK(reinforce_update(agent, episode) == 0.0);
  CHECK(agent.actor.values == before);
  CHECK_THROWS(reinforce_update(agent, {}));
}

TEST_CASE("reinforce: single-step episode reduces to -log pi * r") {
  ReinforceConfig cfg;
  cfg.obs_dim = 2;
  cfg.action_dim = 2;
  cfg.hidden = {4};
  cfg.mean_baseline = false;
  std::mt19937_64 rng(59);
  auto agent = ReinforceAgent::make(cfg, rng);
  std::vector<EpisodeStep> episode(1);
  episode[0].s = {0.3, -0.5};
  episode[0].pre_tanh = {0.4, -0.2};
  episode[0].r_total = 1.7;

  auto head = nn::mlp_forward(agent.actor_spec, agent.actor, episode[0].s);
  std::vector<double> ls{nn::clip_log_std(head[2]), nn::clip_log_std(head[3])};
  const double logp = nn::gaussian_tanh_log_prob(
      {head.data(), 2}, ls, episode[0].pre_tanh, 1.0);
  CHECK(reinforce_update(agent, episode) == doctest::Approx(-logp * 1.7));
}

TEST_CASE("reinforce_backward: gradients match finite differences") {
  ReinforceConfig cfg;
  cfg.obs_dim = 2;
  cfg.action_dim = 2;
  cfg.hidden = {4};
  std::mt19937_64 rng(61);
  auto agent = ReinforceAgent::make(cfg, rng);
  agent.actor_spec.activation = nn::Activation::Tanh;
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<EpisodeStep> episode(6);
  for (auto& s : episode) {
    s.s = {u(rng), u(rng)};
    s.pre_tanh = {u(rng), u(rng)};
    s.r_total = u(rng);
  }
  auto loss = [&]() {
    ReinforceAgent tmp = agent;
    return reinforce_backward(tmp, episode);
  };
  agent.actor.zero_grads();
  reinforce_backward(agent, episode);
  CHECK(nn::finite_diff_check_loss(agent.actor, loss, 1e-6) < 1e-4);
}
