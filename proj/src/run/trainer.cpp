#include "drs/run/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "drs/diffusion/evaluation.hpp"
#include "drs/diffusion/generation.hpp"
#include "drs/env/env.hpp"
#include "drs/rl/detpg.hpp"
#include "drs/rl/reinforce.hpp"
#include "drs/rl/replay.hpp"
#include "drs/rl/sac.hpp"
#include "drs/run/checkpoint.hpp"
#include "drs/run/rng.hpp"

namespace drs::run {

namespace {

constexpr double kDetPgExploreStd = 0.1;

/// FIFO ring of shaper transitions with uniform batch sampling, mirroring
/// the policy buffer semantics.
class RewardBuffer {
 public:
  explicit RewardBuffer(int capacity) : capacity_(capacity) {}

  void push(diffusion::RewardTransition t) {
    if (static_cast<int>(storage_.size()) < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }
  int size() const { return static_cast<int>(storage_.size()); }

  std::vector<diffusion::RewardTransition> sample(int batch,
                                                  std::mt19937_64& rng) {
    if (static_cast<int>(scratch_.size()) != size()) {
      scratch_.resize(size());
      std::iota(scratch_.begin(), scratch_.end(), 0);
    }
    std::vector<diffusion::RewardTransition> out;
    out.reserve(batch);
    for (int i = 0; i < batch; ++i) {
      std::uniform_int_distribution<int> pick(i, size() - 1);
      std::swap(scratch_[i], scratch_[pick(rng)]);
      out.push_back(storage_[scratch_[i]]);
    }
    return out;
  }

 private:
  int capacity_;
  int head_ = 0;
  std::vector<diffusion::RewardTransition> storage_;
  std::vector<int> scratch_;
};

/// Uniform policy wrapper so the training loop is algorithm-agnostic.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> select(std::span<const double> obs,
                                     std::mt19937_64& rng) = 0;
  // called once per env step with the finished transition
  virtual void observe(const rl::PolicyTransition& t, bool episode_end) = 0;
  // one off-policy update phase; no-op for episodic learners
  virtual void update(rl::ReplayBuffer& buffer, int batch_size,
                      std::mt19937_64& rng) = 0;
  // episode-boundary hook (REINFORCE trains here)
  virtual void on_episode_end() {}
  virtual void checkpoint_items(std::vector<CheckpointItem>& out) const = 0;
};

class SacPolicy : public Policy {
 public:
  explicit SacPolicy(rl::SacAgent agent) : agent_(std::move(agent)) {}
  std::vector<double> select(std::span<const double> obs,
                             std::mt19937_64& rng) override {
    return rl::sac_select_action(agent_, obs, rng, true);
  }
  void observe(const rl::PolicyTransition&, bool) override {}
  void update(rl::ReplayBuffer& buffer, int batch_size,
              std::mt19937_64& rng) override {
    auto batch = buffer.sample(batch_size, rng);
    rl::sac_critic_update(agent_, batch, rng);
    rl::sac_actor_update(agent_, batch, rng);
  }
  void checkpoint_items(std::vector<CheckpointItem>& out) const override {
    out.push_back({"actor", agent_.actor_spec, agent_.actor});
    out.push_back({"q1", agent_.critic_spec, agent_.q1});
    out.push_back({"q2", agent_.critic_spec, agent_.q2});
    out.push_back({"q1_target", agent_.critic_spec, agent_.q1_target});
    out.push_back({"q2_target", agent_.critic_spec, agent_.q2_target});
  }

 private:
  rl::SacAgent agent_;
};

class DetPgPolicy : public Policy {
 public:
  explicit DetPgPolicy(rl::DetPgAgent agent) : agent_(std::move(agent)) {}
  std::vector<double> select(std::span<const double> obs,
                             std::mt19937_64& rng) override {
    return rl::detpg_select_action(agent_, obs, rng, kDetPgExploreStd);
  }
  void observe(const rl::PolicyTransition&, bool) override {}
  void update(rl::ReplayBuffer& buffer, int batch_size,
              std::mt19937_64& rng) override {
    auto batch = buffer.sample(batch_size, rng);
    rl::detpg_update(agent_, batch, rng);
  }
  void checkpoint_items(std::vector<CheckpointItem>& out) const override {
    out.push_back({"actor", agent_.actor_spec, agent_.actor});
    out.push_back({"actor_target", agent_.actor_spec, agent_.actor_target});
    out.push_back({"q1", agent_.critic_spec, agent_.q1});
    out.push_back({"q1_target", agent_.critic_spec, agent_.q1_target});
    if (agent_.cfg.twin_critics) {
      out.push_back({"q2", agent_.critic_spec, agent_.q2});
      out.push_back({"q2_target", agent_.critic_spec, agent_.q2_target});
    }
  }

 private:
  rl::DetPgAgent agent_;
};

class ReinforcePolicy : public Policy {
 public:
  explicit ReinforcePolicy(rl::ReinforceAgent agent) : agent_(std::move(agent)) {}
  std::vector<double> select(std::span<const double> obs,
                             std::mt19937_64& rng) override {
    auto a = rl::reinforce_select_action(agent_, obs, rng);
    last_pre_tanh_ = std::move(a.pre_tanh);
    return std::move(a.action);
  }
  void observe(const rl::PolicyTransition& t, bool) override {
    episode_.push_back({t.s, last_pre_tanh_, t.r_total});
  }
  void update(rl::ReplayBuffer&, int, std::mt19937_64&) override {}
  void on_episode_end() override {
    if (!episode_.empty()) rl::reinforce_update(agent_, episode_);
    episode_.clear();
  }
  void checkpoint_items(std::vector<CheckpointItem>& out) const override {
    out.push_back({"actor", agent_.actor_spec, agent_.actor});
  }

 private:
  rl::ReinforceAgent agent_;
  std::vector<rl::EpisodeStep> episode_;
  std::vector<double> last_pre_tanh_;
};

std::unique_ptr<Policy> make_policy(const RunConfig& cfg, int obs_dim,
                                    int action_dim, std::mt19937_64& rng) {
  if (cfg.algo == "sac") {
    rl::SacConfig sc;
    sc.obs_dim = obs_dim;
    sc.action_dim = action_dim;
    sc.hidden = cfg.hidden;
    sc.gamma = cfg.gamma;
    sc.tau = cfg.tau;
    sc.alpha_ent = cfg.alpha_ent;
    sc.auto_tune_alpha = cfg.auto_tune_alpha;
    sc.adam.lr = cfg.lr;
    return std::make_unique<SacPolicy>(rl::SacAgent::make(sc, rng));
  }
  if (cfg.algo == "td3" || cfg.algo == "ddpg") {
    auto dc = cfg.algo == "td3" ? rl::td3_config(obs_dim, action_dim)
                                : rl::ddpg_config(obs_dim, action_dim);
    dc.hidden = cfg.hidden;
    dc.gamma = cfg.gamma;
    dc.tau = cfg.tau;
    dc.adam.lr = cfg.lr;
    return std::make_unique<DetPgPolicy>(rl::DetPgAgent::make(dc, rng));
  }
  rl::ReinforceConfig rc;
  rc.obs_dim = obs_dim;
  rc.action_dim = action_dim;
  rc.hidden = cfg.hidden;
  rc.gamma = cfg.gamma;
  rc.adam.lr = cfg.lr;
  return std::make_unique<ReinforcePolicy>(rl::ReinforceAgent::make(rc, rng));
}

struct DressState {
  diffusion::Schedule schedule;
  diffusion::GenerationAgent gen;
  diffusion::EvaluationAgent eval;
  RewardBuffer buffer;
  nn::AdamConfig adam;
  bool has_pending = false;
  diffusion::RewardTransition pending;
};

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::vector<MetricsRecord> run_training(const RunConfig& cfg,
                                        const TrainHooks& hooks) {
  cfg.validate();
  auto streams = make_streams(cfg.seed);

  env::WirelessConfig wcfg = cfg.wireless;
  auto environment = env::make_env(cfg.env, wcfg);
  if (hooks.wireless_trace) {
    auto* w = dynamic_cast<env::WirelessEnv*>(environment.get());
    if (w) w->set_trace(hooks.wireless_trace);
  }
  const int obs_dim = environment->observation_dim();
  const int action_dim = environment->action_dim();

  auto policy = make_policy(cfg, obs_dim, action_dim, streams.policy);
  rl::ReplayBuffer buffer(cfg.buffer_capacity);
  const bool episodic = cfg.algo == "reinforce";

  std::unique_ptr<DressState> dress;
  if (cfg.dress_enabled) {
    diffusion::GenerationConfig gc;
    gc.cond_dim = obs_dim + action_dim;
    gc.latent_dim = cfg.latent_dim;
    gc.k_embed_dim = cfg.k_embed_dim;
    gc.denoiser_hidden = cfg.dress_hidden;
    gc.head_hidden = cfg.head_hidden;
    gc.e_s = cfg.reward_scale;
    gc.e_b = cfg.reward_bias;
    gc.mode = cfg.shifted_posterior_sampler
                  ? diffusion::SamplerMode::ShiftedPosterior
                  : diffusion::SamplerMode::StandardPosterior;
    diffusion::EvaluationConfig ec;
    ec.cond_dim = gc.cond_dim;
    ec.hidden = cfg.dress_hidden;
    ec.gamma = cfg.gamma;
    ec.tau = cfg.tau;
    dress = std::make_unique<DressState>(DressState{
        diffusion::Schedule::linear(cfg.diffusion_steps,
                                    cfg.beta_schedule_start,
                                    cfg.beta_schedule_end),
        diffusion::GenerationAgent::make(gc, streams.dress),
        diffusion::EvaluationAgent::make(ec, streams.eval),
        RewardBuffer(cfg.buffer_capacity),
        nn::AdamConfig{cfg.lr, 0.9, 0.999, 1e-8},
        false,
        {}});
  }
  const int dress_batch =
      cfg.dress_batch_size > 0 ? cfg.dress_batch_size : cfg.batch_size;

  const auto emit = [&](const char* event) {
    if (hooks.debug_events) hooks.debug_events->emplace_back(event);
  };

  const auto save = [&](long step) {
    if (cfg.out_dir.empty()) return;
    std::vector<CheckpointItem> items;
    policy->checkpoint_items(items);
    if (dress) {
      items.push_back({"dress_denoiser", dress->gen.denoiser_spec,
                       dress->gen.denoiser});
      items.push_back({"dress_head_mu", dress->gen.mu_spec, dress->gen.head_mu});
      items.push_back({"dress_head_sigma", dress->gen.sigma_spec,
                       dress->gen.head_sigma});
      items.push_back({"dress_q", dress->eval.q.spec(), dress->eval.q.params()});
      items.push_back({"dress_q_target", dress->eval.q_target.spec(),
                       dress->eval.q_target.params()});
    }
    (void)step;
    save_checkpoint(cfg.out_dir + "/checkpoint.txt", items);
  };

  const auto update_phase = [&](long step) {
    bool updated = false;
    if (dress && dress->buffer.size() >= dress_batch) {
      auto batch = dress->buffer.sample(dress_batch, streams.dress);
      std::vector<std::vector<double>> conds;
      conds.reserve(batch.size());
      for (const auto& t : batch) conds.push_back(t.cond);
      diffusion::generation_update(dress->gen, dress->eval.q, dress->schedule,
                                   conds, streams.dress, dress->adam);
      diffusion::evaluation_update(dress->eval, dress->gen, dress->schedule,
                                   batch, streams.eval, dress->adam);
      updated = true;
    }
    if (!episodic && step > cfg.warmup_steps &&
        buffer.size() >= cfg.batch_size) {
      policy->update(buffer, cfg.batch_size, streams.policy);
      updated = true;
    }
    if (updated) emit("update");
  };

  std::vector<MetricsRecord> records;
  long global_step = 0;
  std::uniform_real_distribution<double> uniform_action(-1.0, 1.0);

  while (global_step < cfg.total_steps) {
    auto obs = environment->reset(streams.env);
    double ret_env = 0.0, ret_aux = 0.0;
    long ep_len = 0, case1 = 0;
    const auto episode_start = std::chrono::steady_clock::now();
    bool done = false;
    while (!done && global_step < cfg.total_steps) {
      // act
      std::vector<double> action;
      if (!episodic && global_step < cfg.warmup_steps) {
        action.resize(action_dim);
        for (auto& a : action) a = uniform_action(streams.policy);
      } else {
        action = policy->select(obs, streams.policy);
      }
      emit("act");

      if (dress && dress->has_pending) {
        dress->pending.cond_next = concat(obs, action);
        dress->buffer.push(std::move(dress->pending));
        dress->has_pending = false;
      }

      auto step_out = environment->step(action, streams.env);
      emit("step");
      global_step += 1;
      done = step_out.done;

      double r_aux = 0.0;
      if (dress) {
        r_aux = diffusion::generate_reward(dress->gen, dress->schedule, obs,
                                           action, streams.dress, true);
        emit("generate");
      }
      const double r_total =
          dress ? diffusion::combine_rewards(step_out.reward, r_aux, cfg.beta)
                : step_out.reward;
      if (dress) emit("combine");

      rl::PolicyTransition t;
      t.s = obs;
      t.a = action;
      t.s_next = step_out.observation;
      t.r_total = r_total;
      t.done = done;
      if (!episodic) buffer.push(t);
      policy->observe(t, done);
      if (dress) {
        diffusion::RewardTransition rt;
        rt.cond = concat(obs, action);
        rt.r_g = r_aux;
        rt.r_e = step_out.reward;
        rt.done = done;
        if (done) {
          rt.cond_next = concat(step_out.observation,
                                std::vector<double>(action_dim, 0.0));
          dress->buffer.push(std::move(rt));
        } else {
          dress->pending = std::move(rt);
          dress->has_pending = true;
        }
      }
      emit("store");

      if (hooks.on_step) {
        StepView view;
        view.step = global_step;
        view.observation = obs;
        view.action = action;
        view.r_env = step_out.reward;
        view.r_aux = r_aux;
        view.r_total = r_total;
        view.done = done;
        hooks.on_step(view);
      }

      ret_env += step_out.reward;
      ret_aux += r_aux;
      ep_len += 1;
      if (step_out.zero_feedback) case1 += 1;

      if (!cfg.update_per_episode && global_step % cfg.update_every == 0)
        update_phase(global_step);
      if (cfg.out_dir.size() && global_step % cfg.eval_every == 0)
        save(global_step);

      obs = std::move(step_out.observation);
    }

    policy->on_episode_end();
    if (cfg.update_per_episode) update_phase(global_step);

    if (ep_len > 0) {
      MetricsRecord r;
      r.step = global_step;
      r.episode_return_env = ret_env;
      r.episode_return_aux = ret_aux;
      r.episode_len = ep_len;
      r.case1_fraction = static_cast<double>(case1) / ep_len;
      if (!cfg.zero_wall_clock) {
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - episode_start)
                        .count();
      }
      records.push_back(r);
    }
  }

  save(global_step);
  return records;
}

}  // namespace drs::run
