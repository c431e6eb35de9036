#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "drs/diffusion/evaluation.hpp"
#include "drs/diffusion/generation.hpp"
#include "drs/diffusion/schedule.hpp"
#include "drs/nn/grad_check.hpp"

using namespace drs;
using namespace drs::diffusion;

namespace {

GenerationConfig tiny_gen_config(int cond_dim) {
  GenerationConfig cfg;
  cfg.cond_dim = cond_dim;
  cfg.latent_dim = 2;
  cfg.k_embed_dim = 2;
  cfg.denoiser_hidden = {4};
  cfg.head_hidden = {4};
  return cfg;
}

// smooth activations so central differences are clean near relu kinks
void make_smooth(GenerationAgent& a) {
  a.denoiser_spec.activation = nn::Activation::Tanh;
  a.mu_spec.activation = nn::Activation::Tanh;
  a.sigma_spec.activation = nn::Activation::Tanh;
}

struct ConstantCritic : RewardCritic {
  double v;
  explicit ConstantCritic(double v) : v(v) {}
  double value(std::span<const double>, double) const override { return v; }
  double grad_reward(std::span<const double>, double) const override { return 0.0; }
};

// concave bowl peaked at r = peak; ascent on Q pulls rewards toward it
struct BowlCritic : RewardCritic {
  double peak;
  explicit BowlCritic(double p) : peak(p) {}
  double value(std::span<const double>, double r) const override {
    return -(r - peak) * (r - peak);
  }
  double grad_reward(std::span<const double>, double r) const override {
    return -2.0 * (r - peak);
  }
};

}  // namespace

TEST_CASE("schedule: cumulative products match the direct-product oracle") {
  auto s = Schedule::linear(5, 1e-4, 0.2);
  // frozen independently: beta_i = 1e-4 + (0.2 - 1e-4) i / 4, abar = prod(1 - beta)
  const double beta_oracle[5] = {0.0001, 0.050075000000000008,
                                 0.10005000000000001, 0.15002500000000002,
                                 0.20000000000000001};
  const double abar_oracle[5] = {0.99990000000000001, 0.94983000750000002,
                                 0.85479951524962505, 0.72655821797429998,
                                 0.58124657437944005};
  for (int k = 1; k <= 5; ++k) {
    CHECK(s.beta_at(k) == doctest::Approx(beta_oracle[k - 1]).epsilon(1e-15));
    CHECK(s.alpha_bar_at(k) == doctest::Approx(abar_oracle[k - 1]).epsilon(1e-15));
    CHECK(s.alpha_at(k) == doctest::Approx(1.0 - beta_oracle[k - 1]).epsilon(1e-15));
  }
  CHECK(s.alpha_bar_at(0) == 1.0);
  CHECK(s.posterior_var_at(1) == 0.0);
  CHECK(s.posterior_var_at(3) == doctest::Approx(0.034569497190415112).epsilon(1e-14));
}

TEST_CASE("schedule: alpha_bar strictly decreasing, everything in range") {
  auto s = Schedule::linear(15, 1e-4, 0.2);
  for (int k = 1; k <= 15; ++k) {
    CHECK(s.beta_at(k) > 0.0);
    CHECK(s.beta_at(k) < 1.0);
    CHECK(s.alpha_bar_at(k) > 0.0);
    CHECK(s.alpha_bar_at(k) < s.alpha_bar_at(k - 1));
    CHECK(s.posterior_var_at(k) >= 0.0);
    CHECK(s.posterior_var_at(k) < s.beta_at(k) + 1e-15);
  }
  CHECK_THROWS(Schedule::linear(0, 1e-4, 0.2));
  CHECK_THROWS(Schedule::linear(5, 0.0, 0.2));
  CHECK_THROWS(Schedule::linear(5, 0.3, 0.2));
  CHECK_THROWS(Schedule::linear(5, 1e-4, 1.0));
}

TEST_CASE("forward_noise: sample moments follow the closed-form law") {
  auto s = Schedule::linear(5, 1e-4, 0.2);
  const int k = 4;
  const double z0 = 1.3;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0, 1);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  std::vector<double> in{z0}, eps(1), out(1);
  for (int i = 0; i < n; ++i) {
    eps[0] = normal(rng);
    forward_noise(in, k, eps, s, out);
    sum += out[0];
    sq += out[0] * out[0];
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(std::sqrt(s.alpha_bar_at(k)) * z0).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 - s.alpha_bar_at(k)).epsilon(0.02));
}

TEST_CASE("sampler_coeffs: posterior-mean fixed point and frozen values") {
  auto s = Schedule::linear(5, 1e-4, 0.2);
  // with z0 = c and z_k = sqrt(abar_k) c the mean must land on sqrt(abar_{k-1}) c
  for (int k = 2; k <= 5; ++k) {
    auto c = sampler_coeffs(s, k, SamplerMode::StandardPosterior);
    CHECK(c.z0_hat_coef + c.z_k_coef * std::sqrt(s.alpha_bar_at(k)) ==
          doctest::Approx(std::sqrt(s.alpha_bar_at(k - 1))).epsilon(1e-13));
    CHECK(c.sigma == doctest::Approx(std::sqrt(s.posterior_var_at(k))));
  }
  auto c1 = sampler_coeffs(s, 1, SamplerMode::StandardPosterior);
  CHECK(c1.z0_hat_coef == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(c1.z_k_coef == doctest::Approx(0.0));
  CHECK(c1.sigma == 0.0);

  auto c3 = sampler_coeffs(s, 3, SamplerMode::StandardPosterior);
  CHECK(c3.z0_hat_coef == doctest::Approx(0.67154012884766301).epsilon(1e-14));
  CHECK(c3.z_k_coef == doctest::Approx(0.32778204505406267).epsilon(1e-14));
  CHECK(c3.sigma == doctest::Approx(0.18592874223856598).epsilon(1e-14));

  auto p3 = sampler_coeffs(s, 3, SamplerMode::ShiftedPosterior);
  CHECK(p3.z0_hat_coef == doctest::Approx(2.8207765783861016).epsilon(1e-14));
  CHECK(p3.z_k_coef == doctest::Approx(0.94686074628047934).epsilon(1e-14));
  auto p1 = sampler_coeffs(s, 1, SamplerMode::ShiftedPosterior);
  CHECK(p1.z0_hat_coef == 1.0);
  CHECK(p1.z_k_coef == 0.0);
  CHECK(p1.sigma == 0.0);

  CHECK_THROWS(sampler_coeffs(s, 0, SamplerMode::StandardPosterior));
  CHECK_THROWS(sampler_coeffs(s, 6, SamplerMode::StandardPosterior));
}

TEST_CASE("timestep_embedding: interleaved sinusoids, bounded, distinct") {
  auto e = timestep_embedding(3, 8);
  REQUIRE(e.size() == 8);
  for (int i = 0; i < 4; ++i) {
    const double freq = std::pow(10000.0, -i / 4.0);
    CHECK(e[2 * i] == doctest::Approx(std::sin(3 * freq)));
    CHECK(e[2 * i + 1] == doctest::Approx(std::cos(3 * freq)));
  }
  auto f = timestep_embedding(4, 8);
  CHECK(e != f);
  auto odd = timestep_embedding(2, 5);
  CHECK(odd.back() == 0.0);
}

TEST_CASE("reverse_sample: constant denoiser collapses to its prediction") {
  for (auto mode : {SamplerMode::StandardPosterior, SamplerMode::ShiftedPosterior}) {
    auto cfg = tiny_gen_config(2);
    cfg.mode = mode;
    std::mt19937_64 init_rng(21);
    auto agent = GenerationAgent::make(cfg, init_rng);
    // zero weights + output bias: the denoiser emits {0.4, -0.9} for any input
    std::fill(agent.denoiser.values.begin(), agent.denoiser.values.end(), 0.0);
    const int n = agent.denoiser.size();
    agent.denoiser.values[n - 2] = 0.4;
    agent.denoiser.values[n - 1] = -0.9;
    auto s = Schedule::linear(5, 1e-4, 0.2);
    std::mt19937_64 rng(3);
    auto z0 = reverse_sample(agent, s, std::vector<double>{0.1, 0.2}, rng, false);
    CHECK(z0[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(z0[1] == doctest::Approx(-0.9).epsilon(1e-12));
  }
}

TEST_CASE("reverse_sample: K = 1 is a single denoiser evaluation in both modes") {
  auto cfg = tiny_gen_config(2);
  std::mt19937_64 init_rng(5);
  auto agent = GenerationAgent::make(cfg, init_rng);
  auto s = Schedule::linear(1, 0.1, 0.1);
  std::mt19937_64 ra(9), rb(9);
  auto za = reverse_sample(agent, s, std::vector<double>{0.3, -0.2}, ra, true);
  agent.cfg.mode = SamplerMode::ShiftedPosterior;
  auto zb = reverse_sample(agent, s, std::vector<double>{0.3, -0.2}, rb, true);
  for (size_t i = 0; i < za.size(); ++i)
    CHECK(za[i] == doctest::Approx(zb[i]).epsilon(1e-14));
}

TEST_CASE("generate_reward: bounded by the scale and bias, deterministic per seed") {
  auto cfg = tiny_gen_config(4);
  cfg.e_s = 2.0;
  cfg.e_b = 0.5;
  std::mt19937_64 init_rng(13);
  auto agent = GenerationAgent::make(cfg, init_rng);
  auto s = Schedule::linear(5, 1e-4, 0.2);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> obs{u(rng), u(rng)}, act{u(rng), u(rng)};
    const double r = generate_reward(agent, s, obs, act, rng, true);
    CHECK(r >= cfg.e_b - cfg.e_s);
    CHECK(r <= cfg.e_b + cfg.e_s);
    CHECK(std::isfinite(r));
  }
  std::mt19937_64 r1(4), r2(4);
  std::vector<double> cond{0.1, 0.2, 0.3, 0.4};
  CHECK(generate_reward_cond(agent, s, cond, r1, true) ==
        generate_reward_cond(agent, s, cond, r2, true));
  // deterministic mode ignores the per-step and head noise draws
  std::mt19937_64 r3(4), r4(99);
  std::vector<double> z3, z4;
  CHECK(generate_reward_cond(agent, s, cond, r3, false) !=
        generate_reward_cond(agent, s, cond, r4, false));  // z_K still random
}

TEST_CASE("combine_rewards: linear mix, beta = 0 leaves the env reward alone") {
  CHECK(combine_rewards(1.5, -0.3, 0.0) == 1.5);
  CHECK(combine_rewards(1.5, -0.3, 2.0) == doctest::Approx(0.9));
  CHECK_THROWS(combine_rewards(1.0, 1.0, -0.1));
}

TEST_CASE("evaluation_td_target: stub critic pins the bootstrap term") {
  ConstantCritic one(1.0);
  RewardTransition t;
  t.cond = {0.1};
  t.cond_next = {0.2};
  t.r_e = 0.25;
  t.done = false;
  CHECK(evaluation_td_target(t, 0.0, one, 0.99) == doctest::Approx(0.25 + 0.99));
  t.done = true;
  CHECK(evaluation_td_target(t, 0.7, one, 0.99) == doctest::Approx(0.25));
}

TEST_CASE("QNetworkCritic: grad_reward matches central differences") {
  std::mt19937_64 rng(31);
  EvaluationConfig cfg;
  cfg.cond_dim = 3;
  cfg.hidden = {8};
  auto eval = EvaluationAgent::make(cfg, rng);
  // tanh keeps the numeric derivative clean
  const_cast<nn::MlpSpec&>(eval.q.spec()).activation = nn::Activation::Tanh;
  std::vector<double> cond{0.2, -0.4, 0.8};
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& v : eval.q.params().values) v += u(rng) * 0.1;
  for (double r : {-0.9, -0.1, 0.3, 0.8}) {
    const double h = 1e-6;
    const double fd =
        (eval.q.value(cond, r + h) - eval.q.value(cond, r - h)) / (2 * h);
    CHECK(nn::relative_error(eval.q.grad_reward(cond, r), fd) < 1e-6);
  }
}

TEST_CASE("generation_backward: full-chain gradient vs finite differences") {
  auto cfg = tiny_gen_config(2);
  std::mt19937_64 init_rng(41);
  auto agent = GenerationAgent::make(cfg, init_rng);
  make_smooth(agent);
  auto s = Schedule::linear(2, 1e-2, 0.1);
  std::vector<double> cond{0.3, -0.6};
  const uint64_t seed = 1234;

  auto loss = [&]() {
    std::mt19937_64 rng(seed);
    return generate_reward_cond(agent, s, cond, rng, true);
  };

  ChainCache cache;
  std::mt19937_64 rng(seed);
  generate_reward_cond(agent, s, cond, rng, true, &cache);
  agent.denoiser.zero_grads();
  agent.head_mu.zero_grads();
  agent.head_sigma.zero_grads();
  generation_backward(agent, s, cache, 1.0);

  CHECK(nn::finite_diff_check_loss(agent.denoiser, loss, 1e-6) < 1e-3);
  CHECK(nn::finite_diff_check_loss(agent.head_mu, loss, 1e-6) < 1e-3);
  CHECK(nn::finite_diff_check_loss(agent.head_sigma, loss, 1e-6) < 1e-3);
}

TEST_CASE("evaluation critic gradient: TD loss vs finite differences") {
  std::mt19937_64 rng(51);
  EvaluationConfig ecfg;
  ecfg.cond_dim = 2;
  ecfg.hidden = {6};
  auto eval = EvaluationAgent::make(ecfg, rng);
  const_cast<nn::MlpSpec&>(eval.q.spec()).activation = nn::Activation::Tanh;
  const_cast<nn::MlpSpec&>(eval.q_target.spec()).activation = nn::Activation::Tanh;

  std::vector<RewardTransition> batch(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> ys;
  for (auto& t : batch) {
    t.cond = {u(rng), u(rng)};
    t.cond_next = {u(rng), u(rng)};
    t.r_g = u(rng);
    t.r_e = u(rng);
    t.done = false;
    ys.push_back(evaluation_td_target(t, 0.1, eval.q_target, ecfg.gamma));
  }
  auto loss = [&]() {
    double l = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
      const double e = ys[i] - eval.q.value(batch[i].cond, batch[i].r_g);
      l += e * e;
    }
    return l / batch.size();
  };

  auto& params = eval.q.params();
  params.zero_grads();
  std::vector<double> input(eval.q.spec().input_dim);
  nn::MlpCache cache;
  for (size_t i = 0; i < batch.size(); ++i) {
    std::copy(batch[i].cond.begin(), batch[i].cond.end(), input.begin());
    input.back() = batch[i].r_g;
    nn::mlp_forward_cached(eval.q.spec(), params, input, cache);
    const double up = 2.0 * (cache.output()[0] - ys[i]) / batch.size();
    nn::mlp_backward(eval.q.spec(), params, cache,
                     std::span<const double>(&up, 1), &params, {});
  }
  CHECK(nn::finite_diff_check_loss(params, loss, 1e-6) < 1e-4);
}

TEST_CASE("evaluation_update: overfits terminal transitions to near-zero loss") {
  std::mt19937_64 rng(61);
  EvaluationConfig ecfg;
  ecfg.cond_dim = 2;
  ecfg.hidden = {16};
  auto eval = EvaluationAgent::make(ecfg, rng);
  auto gcfg = tiny_gen_config(2);
  auto gen = GenerationAgent::make(gcfg, rng);
  auto s = Schedule::linear(3, 1e-3, 0.1);

  // done = true pins y = r_e, so the target net drift cannot move the labels
  std::vector<RewardTransition> batch(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& t : batch) {
    t.cond = {u(rng), u(rng)};
    t.cond_next = {0.0, 0.0};
    t.r_g = u(rng);
    t.r_e = u(rng);
    t.done = true;
  }
  nn::AdamConfig adam;
  adam.lr = 1e-2;
  double loss = 0.0;
  for (int i = 0; i < 2000; ++i)
    loss = evaluation_update(eval, gen, s, batch, rng, adam);
  CHECK(loss < 1e-3);
  CHECK(eval.skipped_updates == 0);
}

TEST_CASE("generation_update: bowl critic pulls rewards to its peak") {
  auto cfg = tiny_gen_config(2);
  std::mt19937_64 rng(71);
  auto agent = GenerationAgent::make(cfg, rng);
  auto s = Schedule::linear(3, 1e-3, 0.1);
  BowlCritic bowl(0.7);
  std::vector<std::vector<double>> conds{{0.2, -0.1}, {-0.5, 0.4}};
  nn::AdamConfig adam;
  adam.lr = 3e-3;
  for (int i = 0; i < 500; ++i)
    generation_update(agent, bowl, s, conds, rng, adam);
  double mean = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i)
    mean += generate_reward_cond(agent, s, conds[i % 2], rng, true) / n;
  CHECK(mean == doctest::Approx(0.7).epsilon(0.08));
  CHECK(agent.skipped_updates == 0);
}

TEST_CASE("denoiser_supervised_step: regression loss drops by 10x") {
  auto cfg = tiny_gen_config(2);
  std::mt19937_64 rng(81);
  auto agent = GenerationAgent::make(cfg, rng);
  auto s = Schedule::linear(5, 1e-4, 0.2);

  // target map: clean latent is a fixed linear function of the condition
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_int_distribution<int> ks(1, s.num_steps);
  std::vector<DenoiserSample> data(64);
  for (auto& d : data) {
    d.cond = {u(rng), u(rng)};
    d.z0 = {0.5 * d.cond[0] - 0.2 * d.cond[1], 0.3 * d.cond[1]};
    d.eps = {normal(rng), normal(rng)};
    d.k = ks(rng);
  }
  nn::AdamConfig adam;
  adam.lr = 1e-3;
  const double initial = denoiser_supervised_loss(agent, s, data);
  for (int i = 0; i < 2000; ++i) denoiser_supervised_step(agent, s, data, adam);
  const double final_loss = denoiser_supervised_loss(agent, s, data);
  CHECK(final_loss < 0.1 * initial);
  CHECK(agent.skipped_updates == 0);
}
