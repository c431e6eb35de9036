#include "drs/run/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drs::run {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
  if (pos != v.size())
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return d;
}

long to_long(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long n;
  try {
    n = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
  if (pos != v.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return n;
}

int to_int(const std::string& key, const std::string& v) {
  return static_cast<int>(to_long(key, v));
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(conv(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  return to_list<int>(key, v, to_int);
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  return to_list<double>(key, v, to_double);
}

void apply_run(RunConfig& c, const std::string& k, const std::string& v) {
  if (k == "env") c.env = v;
  else if (k == "algo") c.algo = v;
  else if (k == "dress_enabled") c.dress_enabled = to_bool(k, v);
  else if (k == "beta") c.beta = to_double(k, v);
  else if (k == "diffusion_steps") c.diffusion_steps = to_int(k, v);
  else if (k == "total_steps") c.total_steps = to_long(k, v);
  else if (k == "seed") c.seed = static_cast<uint64_t>(to_long(k, v));
  else if (k == "eval_every") c.eval_every = to_long(k, v);
  else if (k == "out_dir") c.out_dir = v;
  else throw std::invalid_argument("config: unknown key [run] " + k);
}

void apply_env(RunConfig& c, const std::string& k, const std::string& v) {
  auto& w = c.wireless;
  if (k == "n_users") w.n_users = to_int(k, v);
  else if (k == "b_max_hz") w.b_max_hz = to_double(k, v);
  else if (k == "p_max_w") w.p_max_w = to_double(k, v);
  else if (k == "c_max") w.c_max = to_double(k, v);
  else if (k == "m_antennas") w.m_antennas = to_int(k, v);
  else if (k == "alpha_pathloss") w.alpha_pathloss = to_double(k, v);
  else if (k == "noise_power") w.noise_power = to_double(k, v);
  else if (k == "latency_limit") w.latency_limit = to_double(k, v);
  else if (k == "lambda_penalty") w.lambda_penalty = to_double(k, v);
  else if (k == "mu_penalty") w.mu_penalty = to_double(k, v);
  else if (k == "patience_threshold") w.patience_threshold = to_int(k, v);
  else if (k == "initial_patience") w.initial_patience = to_int(k, v);
  else if (k == "episode_length") w.episode_length = to_int(k, v);
  else if (k == "delta_x_max") w.delta_x_max = to_double(k, v);
  else if (k == "cell_diameter_km") w.cell_diameter_km = to_double(k, v);
  else if (k == "demand_min") w.demand_min = to_double(k, v);
  else if (k == "demand_max") w.demand_max = to_double(k, v);
  else if (k == "treq_min") w.treq_min = to_double(k, v);
  else if (k == "treq_max") w.treq_max = to_double(k, v);
  else if (k == "lreq_min_factor") w.lreq_min_factor = to_double(k, v);
  else if (k == "lreq_max_factor") w.lreq_max_factor = to_double(k, v);
  else if (k == "clamp_latency_bonus") w.clamp_latency_bonus = to_bool(k, v);
  else throw std::invalid_argument("config: unknown key [env] " + k);
}

void apply_train(RunConfig& c, const std::string& k, const std::string& v) {
  if (k == "hidden") c.hidden = to_int_list(k, v);
  else if (k == "batch_size") c.batch_size = to_int(k, v);
  else if (k == "buffer_capacity") c.buffer_capacity = to_int(k, v);
  else if (k == "warmup_steps") c.warmup_steps = to_int(k, v);
  else if (k == "gamma") c.gamma = to_double(k, v);
  else if (k == "tau") c.tau = to_double(k, v);
  else if (k == "lr") c.lr = to_double(k, v);
  else if (k == "alpha_ent") c.alpha_ent = to_double(k, v);
  else if (k == "auto_tune_alpha") c.auto_tune_alpha = to_bool(k, v);
  else if (k == "update_every") c.update_every = to_int(k, v);
  else if (k == "update_per_episode") c.update_per_episode = to_bool(k, v);
  else throw std::invalid_argument("config: unknown key [train] " + k);
}

void apply_dress(RunConfig& c, const std::string& k, const std::string& v) {
  if (k == "latent_dim") c.latent_dim = to_int(k, v);
  else if (k == "k_embed_dim") c.k_embed_dim = to_int(k, v);
  else if (k == "beta_schedule_start") c.beta_schedule_start = to_double(k, v);
  else if (k == "beta_schedule_end") c.beta_schedule_end = to_double(k, v);
  else if (k == "reward_scale") c.reward_scale = to_double(k, v);
  else if (k == "reward_bias") c.reward_bias = to_double(k, v);
  else if (k == "shifted_posterior_sampler") c.shifted_posterior_sampler = to_bool(k, v);
  else if (k == "dress_hidden") c.dress_hidden = to_int_list(k, v);
  else if (k == "head_hidden") c.head_hidden = to_int_list(k, v);
  else if (k == "dress_batch_size") c.dress_batch_size = to_int(k, v);
  else throw std::invalid_argument("config: unknown key [dress] " + k);
}

void apply_output(RunConfig& c, const std::string& k, const std::string& v) {
  if (k == "zero_wall_clock") c.zero_wall_clock = to_bool(k, v);
  else if (k == "trace_enabled") c.trace_enabled = to_bool(k, v);
  else throw std::invalid_argument("config: unknown key [output] " + k);
}

}  // namespace

void RunConfig::validate() const {
  if (env != "meclatency" && env != "mountaincar")
    throw std::invalid_argument("RunConfig: unknown env " + env);
  if (algo != "sac" && algo != "td3" && algo != "ddpg" && algo != "reinforce")
    throw std::invalid_argument("RunConfig: unknown algo " + algo);
  if (beta < 0.0) throw std::invalid_argument("RunConfig: beta < 0");
  if (diffusion_steps < 1) throw std::invalid_argument("RunConfig: K < 1");
  if (total_steps < 0) throw std::invalid_argument("RunConfig: total_steps < 0");
  if (batch_size < 1 || buffer_capacity < batch_size)
    throw std::invalid_argument("RunConfig: bad batch/capacity");
  if (warmup_steps < 0) throw std::invalid_argument("RunConfig: warmup < 0");
  if (update_every < 1) throw std::invalid_argument("RunConfig: update_every < 1");
  if (eval_every < 1) throw std::invalid_argument("RunConfig: eval_every < 1");
  if (latent_dim < 1 || k_embed_dim < 1)
    throw std::invalid_argument("RunConfig: bad dress dims");
  wireless.validate();
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: bad section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      map[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key at line " +
                                  std::to_string(lineno));
    map[section][key] = value;
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig run_config_from(const ConfigMap& map) {
  RunConfig c;
  for (const auto& [section, kv] : map) {
    for (const auto& [k, v] : kv) {
      if (section == "run") apply_run(c, k, v);
      else if (section == "env") apply_env(c, k, v);
      else if (section == "train") apply_train(c, k, v);
      else if (section == "dress") apply_dress(c, k, v);
      else if (section == "output") apply_output(c, k, v);
      else if (section == "sweep") continue;  // handled by sweep_config_from
      else throw std::invalid_argument("config: unknown section " + section);
    }
  }
  c.validate();
  return c;
}

SweepConfig sweep_config_from(const ConfigMap& map) {
  SweepConfig s;
  s.base = run_config_from(map);
  auto it = map.find("sweep");
  if (it == map.end()) return s;
  for (const auto& [k, v] : it->second) {
    if (k == "beta_values") s.beta_values = to_double_list(k, v);
    else if (k == "k_values") s.k_values = to_int_list(k, v);
    else if (k == "latency_values") s.latency_values = to_double_list(k, v);
    else if (k == "seeds") {
      s.seeds.clear();
      for (long x : to_int_list(k, v)) s.seeds.push_back(static_cast<uint64_t>(x));
    } else {
      throw std::invalid_argument("config: unknown key [sweep] " + k);
    }
  }
  return s;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  const auto list = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  o << "[run]\n"
    << "env = " << c.env << "\nalgo = " << c.algo
    << "\ndress_enabled = " << (c.dress_enabled ? "true" : "false")
    << "\nbeta = " << c.beta << "\ndiffusion_steps = " << c.diffusion_steps
    << "\ntotal_steps = " << c.total_steps << "\nseed = " << c.seed
    << "\neval_every = " << c.eval_every;
  if (!c.out_dir.empty()) o << "\nout_dir = " << c.out_dir;
  const auto& w = c.wireless;
  o << "\n\n[env]\n"
    << "n_users = " << w.n_users << "\nb_max_hz = " << w.b_max_hz
    << "\np_max_w = " << w.p_max_w << "\nc_max = " << w.c_max
    << "\nm_antennas = " << w.m_antennas
    << "\nalpha_pathloss = " << w.alpha_pathloss
    << "\nnoise_power = " << w.noise_power
    << "\nlatency_limit = " << w.latency_limit
    << "\nlambda_penalty = " << w.lambda_penalty
    << "\nmu_penalty = " << w.mu_penalty
    << "\npatience_threshold = " << w.patience_threshold
    << "\ninitial_patience = " << w.initial_patience
    << "\nepisode_length = " << w.episode_length
    << "\ndelta_x_max = " << w.delta_x_max
    << "\ncell_diameter_km = " << w.cell_diameter_km
    << "\ndemand_min = " << w.demand_min << "\ndemand_max = " << w.demand_max
    << "\ntreq_min = " << w.treq_min << "\ntreq_max = " << w.treq_max
    << "\nlreq_min_factor = " << w.lreq_min_factor
    << "\nlreq_max_factor = " << w.lreq_max_factor
    << "\nclamp_latency_bonus = " << (w.clamp_latency_bonus ? "true" : "false");
  o << "\n\n[train]\n"
    << "hidden = " << list(c.hidden) << "\nbatch_size = " << c.batch_size
    << "\nbuffer_capacity = " << c.buffer_capacity
    << "\nwarmup_steps = " << c.warmup_steps << "\ngamma = " << c.gamma
    << "\ntau = " << c.tau << "\nlr = " << c.lr
    << "\nalpha_ent = " << c.alpha_ent
    << "\nauto_tune_alpha = " << (c.auto_tune_alpha ? "true" : "false")
    << "\nupdate_every = " << c.update_every
    << "\nupdate_per_episode = " << (c.update_per_episode ? "true" : "false");
  o << "\n\n[dress]\n"
    << "latent_dim = " << c.latent_dim << "\nk_embed_dim = " << c.k_embed_dim
    << "\nbeta_schedule_start = " << c.beta_schedule_start
    << "\nbeta_schedule_end = " << c.beta_schedule_end
    << "\nreward_scale = " << c.reward_scale
    << "\nreward_bias = " << c.reward_bias
    << "\nshifted_posterior_sampler = " << (c.shifted_posterior_sampler ? "true" : "false")
    << "\ndress_hidden = " << list(c.dress_hidden)
    << "\nhead_hidden = " << list(c.head_hidden)
    << "\ndress_batch_size = " << c.dress_batch_size;
  o << "\n\n[output]\n"
    << "zero_wall_clock = " << (c.zero_wall_clock ? "true" : "false")
    << "\ntrace_enabled = " << (c.trace_enabled ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace drs::run
