#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drs/nn/gaussian.hpp"
#include "drs/nn/grad_check.hpp"
#include "drs/nn/kernels.hpp"
#include "drs/nn/mlp.hpp"
#include "drs/nn/optim.hpp"

using namespace drs::nn;

namespace {
std::mt19937_64 rng_for(uint64_t seed) { return std::mt19937_64(seed); }

std::vector<double> random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}
}  // namespace

TEST_CASE("mlp forward: zero weights give zero output") {
  MlpSpec spec{3, {4}, 2, Activation::Relu};
  ParamSet p = ParamSet::zeros(spec.param_count());
  auto out = mlp_forward(spec, p, std::vector<double>{1.0, -2.0, 3.0});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("mlp forward: identity-like 1x1 relu net") {
  MlpSpec spec{1, {}, 1, Activation::Relu};
  ParamSet p = ParamSet::zeros(spec.param_count());
  p.values = {1.0, 0.0};  // w=1, b=0
  auto out = mlp_forward(spec, p, std::vector<double>{2.0});
  CHECK(out[0] == doctest::Approx(2.0));
}

TEST_CASE("mlp forward: 2-4-1 net matches hand-computed pass") {
  MlpSpec spec{2, {4}, 1, Activation::Relu};
  ParamSet p = ParamSet::zeros(spec.param_count());
  p.values = {0.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8,  // W1 rows
              0.01, -0.02, 0.03, 0.04,                   // b1
              0.2, -0.1, 0.3, 0.5,                       // W2
              0.05};                                     // b2
  // hidden pre-acts: [-0.04, -0.37, 0.58, -0.01] -> relu -> [0,0,0.58,0]
  // output: 0.3*0.58 + 0.05 = 0.224
  auto out = mlp_forward(spec, p, std::vector<double>{0.5, -0.5});
  CHECK(out[0] == doctest::Approx(0.224).epsilon(1e-12));
}

TEST_CASE("mlp forward: dimension mismatch rejected") {
  MlpSpec spec{2, {3}, 1, Activation::Relu};
  auto rng = rng_for(1);
  ParamSet p = init_params(spec, rng);
  CHECK_THROWS(mlp_forward(spec, p, std::vector<double>{1.0}));
  CHECK_THROWS((void)MlpSpec{0, {}, 1, Activation::Relu}.validate());
}

TEST_CASE("mlp backward: linear net, d(wx)/dw = x") {
  MlpSpec spec{1, {}, 1, Activation::Relu};
  ParamSet p = ParamSet::zeros(spec.param_count());
  p.values = {0.7, 0.1};
  MlpCache cache;
  mlp_forward_cached(spec, p, std::vector<double>{3.0}, cache);
  ParamSet accum = ParamSet::zeros(p.size());
  std::vector<double> gi(1);
  mlp_backward(spec, p, cache, std::vector<double>{1.0}, &accum, gi);
  CHECK(accum.grads[0] == doctest::Approx(3.0));  // dw
  CHECK(accum.grads[1] == doctest::Approx(1.0));  // db
  CHECK(gi[0] == doctest::Approx(0.7));           // dx
}

TEST_CASE("mlp backward: zero upstream gives zero grads") {
  MlpSpec spec{2, {3}, 2, Activation::Tanh};
  auto rng = rng_for(2);
  ParamSet p = init_params(spec, rng);
  MlpCache cache;
  auto in = random_vec(2, rng);
  mlp_forward_cached(spec, p, in, cache);
  ParamSet accum = ParamSet::zeros(p.size());
  mlp_backward(spec, p, cache, std::vector<double>{0.0, 0.0}, &accum, {});
  for (double g : accum.grads) CHECK(g == 0.0);
  CHECK_THROWS(mlp_backward(spec, p, cache, std::vector<double>{0.0}, &accum, {}));
}

TEST_CASE("finite_diff_check passes on small nets across seeds") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto rng = rng_for(100 + seed);
    MlpSpec spec{2, {3}, 1, seed % 2 ? Activation::Tanh : Activation::Relu};
    ParamSet p = init_params(spec, rng);
    auto in = random_vec(2, rng);
    CHECK(finite_diff_check(spec, p, in, 1e-5) < 1e-4);
  }
}

TEST_CASE("finite_diff_check on zero-weight and tanh nets") {
  MlpSpec spec{2, {3}, 1, Activation::Tanh};
  ParamSet p = ParamSet::zeros(spec.param_count());
  auto rng = rng_for(3);
  auto in = random_vec(2, rng);
  CHECK(finite_diff_check(spec, p, in, 1e-5) < 1e-4);
  p = init_params(spec, rng);
  CHECK(finite_diff_check(spec, p, in, 1e-5) < 1e-4);
}

TEST_CASE("adam: zero grad is a no-op on values, bumps step_count") {
  ParamSet p = ParamSet::zeros(3);
  p.values = {1.0, -2.0, 0.5};
  auto before = p.values;
  CHECK(adam_step(p, {}));
  CHECK(p.values == before);
  CHECK(p.step_count == 1);
}

TEST_CASE("adam: first step with unit grad moves by ~lr") {
  ParamSet p = ParamSet::zeros(1);
  p.values = {1.0};
  p.grads = {1.0};
  AdamConfig cfg;
  cfg.lr = 0.1;
  CHECK(adam_step(p, cfg));
  // bias-corrected first step: lr * 1 / (1 + eps)
  CHECK(p.values[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-6));
  CHECK(p.grads[0] == 0.0);
}

TEST_CASE("adam: two identical-grad steps match hand recurrence") {
  ParamSet p = ParamSet::zeros(1);
  p.values = {0.0};
  AdamConfig cfg;
  cfg.lr = 0.05;
  // independent recurrence
  double m = 0.0, v = 0.0, x = 0.0;
  for (int t = 1; t <= 2; ++t) {
    m = cfg.beta1 * m + (1 - cfg.beta1) * 1.0;
    v = cfg.beta2 * v + (1 - cfg.beta2) * 1.0;
    const double mhat = m / (1 - std::pow(cfg.beta1, t));
    const double vhat = v / (1 - std::pow(cfg.beta2, t));
    x -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  p.grads = {1.0};
  adam_step(p, cfg);
  p.grads = {1.0};
  adam_step(p, cfg);
  CHECK(p.values[0] == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("adam: non-finite grads refuse the step") {
  ParamSet p = ParamSet::zeros(2);
  p.values = {1.0, 2.0};
  p.grads = {0.1, std::nan("")};
  CHECK_FALSE(adam_step(p, {}));
  CHECK(p.values[0] == 1.0);
  CHECK(p.step_count == 0);
}

TEST_CASE("soft_update: tau=1 copies source; linearity holds exactly") {
  ParamSet t = ParamSet::zeros(2), s = ParamSet::zeros(2);
  t.values = {0.0, 0.0};
  s.values = {1.0, -3.0};
  soft_update(t, s, 1.0);
  CHECK(t.values == s.values);

  t.values = {0.0, 0.0};
  soft_update(t, s, 0.005);
  CHECK(t.values[0] == doctest::Approx(0.005).epsilon(1e-15));

  ParamSet bad = ParamSet::zeros(3);
  CHECK_THROWS(soft_update(t, bad, 0.5));
}

TEST_CASE("soft_update: repeated updates converge geometrically") {
  ParamSet t = ParamSet::zeros(1), s = ParamSet::zeros(1);
  t.values = {0.0};
  s.values = {1.0};
  const double tau = 0.1;
  const int n = 20;
  for (int i = 0; i < n; ++i) soft_update(t, s, tau);
  CHECK(1.0 - t.values[0] == doctest::Approx(std::pow(1.0 - tau, n)).epsilon(1e-10));
}

TEST_CASE("gaussian head: zero noise and mean gives zero sample") {
  std::vector<double> mean{0.0}, log_std{kLogStdMin}, noise{0.0};
  auto out = gaussian_tanh_sample(mean, log_std, noise, 1.0, 0.0);
  CHECK(out.sample[0] == 0.0);
  CHECK(std::isfinite(out.log_prob));
}

TEST_CASE("gaussian head: samples bounded by [e_b - e_s, e_b + e_s]") {
  auto rng = rng_for(4);
  std::normal_distribution<double> nd(0, 1);
  const double e_s = 0.5, e_b = 0.2;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> mean{nd(rng) * 5}, log_std{nd(rng)}, noise{nd(rng)};
    auto out = gaussian_tanh_sample(mean, log_std, noise, e_s, e_b);
    CHECK(out.sample[0] >= e_b - e_s);
    CHECK(out.sample[0] <= e_b + e_s);
    CHECK(std::isfinite(out.log_prob));
  }
}

TEST_CASE("gaussian head: log_prob stays finite for large pre-tanh values") {
  std::vector<double> mean{15.0}, log_std{-5.0}, noise{0.0};
  auto out = gaussian_tanh_sample(mean, log_std, noise, 1.0, 0.0);
  CHECK(std::isfinite(out.log_prob));
  mean[0] = -15.0;
  out = gaussian_tanh_sample(mean, log_std, noise, 1.0, 0.0);
  CHECK(std::isfinite(out.log_prob));
}

TEST_CASE("gaussian head: empirical pre-tanh mean within 3 standard errors") {
  auto rng = rng_for(5);
  std::normal_distribution<double> nd(0, 1);
  const double mu = 0.3, ls = -0.5;
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> noise{nd(rng)};
    auto out = gaussian_tanh_sample(std::vector<double>{mu},
                                    std::vector<double>{ls}, noise, 1.0, 0.0);
    sum += out.pre_tanh[0];
  }
  const double se = std::exp(ls) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum / n - mu) < 3 * se);
}

TEST_CASE("batch kernels: omp path bit-identical to serial reference") {
  MlpSpec spec{5, {8, 8}, 3, Activation::Relu};
  auto rng = rng_for(6);
  ParamSet p = init_params(spec, rng);
  const int batch = 17;
  auto inputs = random_vec(batch * spec.input_dim, rng);
  auto upstreams = random_vec(batch * spec.output_dim, rng);

  std::vector<double> out_ref(batch * spec.output_dim);
  std::vector<double> out_omp(batch * spec.output_dim);
  reference::batch_forward(spec, p, inputs, batch, out_ref);
  BatchRunner runner;
  runner.forward(spec, p, inputs, batch, out_omp);
  CHECK(out_ref == out_omp);

  ParamSet acc_ref = ParamSet::zeros(p.size());
  ParamSet acc_omp = ParamSet::zeros(p.size());
  std::vector<double> gi_ref(batch * spec.input_dim);
  std::vector<double> gi_omp(batch * spec.input_dim);
  reference::batch_backward(spec, p, inputs, batch, upstreams, acc_ref, gi_ref);
  runner.backward(spec, p, upstreams, acc_omp, gi_omp);
  CHECK(acc_ref.grads == acc_omp.grads);
  CHECK(gi_ref == gi_omp);
}
