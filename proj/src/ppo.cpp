// Copyright 2026 The pushrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pushrec/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "pushrec/output.hpp"
#include "pushrec/reward.hpp"

namespace pushrec {

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo.gamma: (0, 1]");
  if (!(clip > 0.0)) throw ConfigError("ppo.clip: must be > 0");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw ConfigError("ppo.gae_lambda: [0, 1]");
  }
  if (batch_size < 1) throw ConfigError("ppo.batch_size: must be >= 1");
  if (minibatch_size < 1 || minibatch_size > batch_size) {
    throw ConfigError("ppo.minibatch_size: must be in [1, batch_size]");
  }
  if (epochs < 1) throw ConfigError("ppo.epochs: must be >= 1");
  if (workers < 1) throw ConfigError("ppo.workers: must be >= 1");
  if (learning_rate <= 0.0) throw ConfigError("ppo.learning_rate: must be > 0");
  if (value_clip <= 0.0) throw ConfigError("ppo.value_clip: must be > 0");
  if (checkpoint_interval < 1) {
    throw ConfigError("train.checkpoint_interval: must be >= 1");
  }
  for (int h : hidden) {
    if (h < 1) throw ConfigError("policy.hidden: sizes must be >= 1");
  }
}

std::string default_ppo_config() {
  return R"(# PPO and network parameters
ppo.gamma = 0.95
ppo.clip = 0.3
ppo.learning_rate = 0.0001
ppo.gae_lambda = 1.0
ppo.batch_size = 10000
ppo.minibatch_size = 512
ppo.epochs = 32
ppo.workers = 4
ppo.value_clip = 1000.0
ppo.value_coef = 0.5
ppo.entropy_coef = 0.0
ppo.kl.enabled = true
ppo.kl.coefficient = 0.2
ppo.kl.target = 0.01
policy.hidden = 128 64
policy.log_std_init = -1.2039728043259361
train.checkpoint_interval = 5
)";
}

PpoConfig load_ppo_config(const KeyValueFile& kv) {
  PpoConfig cfg;
  cfg.gamma = kv.get_double("ppo.gamma", cfg.gamma);
  cfg.clip = kv.get_double("ppo.clip", cfg.clip);
  cfg.learning_rate = kv.get_double("ppo.learning_rate", cfg.learning_rate);
  cfg.gae_lambda = kv.get_double("ppo.gae_lambda", cfg.gae_lambda);
  cfg.batch_size = static_cast<int>(kv.get_int("ppo.batch_size", cfg.batch_size));
  cfg.minibatch_size =
      static_cast<int>(kv.get_int("ppo.minibatch_size", cfg.minibatch_size));
  cfg.epochs = static_cast<int>(kv.get_int("ppo.epochs", cfg.epochs));
  cfg.workers = static_cast<int>(kv.get_int("ppo.workers", cfg.workers));
  cfg.value_clip = kv.get_double("ppo.value_clip", cfg.value_clip);
  cfg.value_coef = kv.get_double("ppo.value_coef", cfg.value_coef);
  cfg.entropy_coef = kv.get_double("ppo.entropy_coef", cfg.entropy_coef);
  cfg.kl.enabled = kv.get_bool("ppo.kl.enabled", cfg.kl.enabled);
  cfg.kl.coefficient = kv.get_double("ppo.kl.coefficient", cfg.kl.coefficient);
  cfg.kl.target = kv.get_double("ppo.kl.target", cfg.kl.target);
  if (kv.has("policy.hidden")) {
    cfg.hidden.clear();
    for (double h : kv.get_doubles("policy.hidden")) {
      cfg.hidden.push_back(static_cast<int>(h));
    }
  }
  cfg.log_std_init = kv.get_double("policy.log_std_init", cfg.log_std_init);
  cfg.checkpoint_interval = static_cast<int>(
      kv.get_int("train.checkpoint_interval", cfg.checkpoint_interval));
  cfg.validate();
  return cfg;
}

KeyValueFile ppo_config_to_keyvalue(const PpoConfig& cfg) {
  KeyValueFile kv;
  kv.set_double("ppo.gamma", cfg.gamma);
  kv.set_double("ppo.clip", cfg.clip);
  kv.set_double("ppo.learning_rate", cfg.learning_rate);
  kv.set_double("ppo.gae_lambda", cfg.gae_lambda);
  kv.set_int("ppo.batch_size", cfg.batch_size);
  kv.set_int("ppo.minibatch_size", cfg.minibatch_size);
  kv.set_int("ppo.epochs", cfg.epochs);
  kv.set_int("ppo.workers", cfg.workers);
  kv.set_double("ppo.value_clip", cfg.value_clip);
  kv.set_double("ppo.value_coef", cfg.value_coef);
  kv.set_double("ppo.entropy_coef", cfg.entropy_coef);
  kv.set_bool("ppo.kl.enabled", cfg.kl.enabled);
  kv.set_double("ppo.kl.coefficient", cfg.kl.coefficient);
  kv.set_double("ppo.kl.target", cfg.kl.target);
  std::string hidden;
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    hidden += std::to_string(cfg.hidden[i]);
    if (i + 1 < cfg.hidden.size()) hidden += " ";
  }
  kv.set("policy.hidden", hidden);
  kv.set_double("policy.log_std_init", cfg.log_std_init);
  kv.set_int("train.checkpoint_interval", cfg.checkpoint_interval);
  return kv;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double unclipped = ratio * advantage;
  const double clipped =
      std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage;
  return std::min(unclipped, clipped);
}

ObjectiveStats ppo_objective(const TrajectoryBatch& batch,
                             const std::vector<int>& indices,
                             const AgentParams& params, const PpoConfig& cfg,
                             double kl_coefficient, AgentGrads& grads) {
  const int count = static_cast<int>(indices.size());
  const int act = params.policy.action_size();
  const double inv_count = 1.0 / count;

  const Matrix obs = batch.observations(indices, Eigen::all);
  const Matrix actions = batch.actions(indices, Eigen::all);
  const Matrix old_means = batch.behavior_means(indices, Eigen::all);
  const Vector old_logp = batch.log_probs(indices);
  const Vector adv = batch.advantages(indices);
  const Vector ret = batch.returns(indices);
  const Vector old_values = batch.values(indices);

  ObjectiveStats stats;

  // policy forward
  MlpCache policy_cache;
  const Matrix new_means = mlp_forward(params.policy.mean, obs, &policy_cache);
  const Vector& log_std = params.policy.log_std;
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  const Eigen::ArrayXd inv_var = inv_std.square();

  const Matrix z =
      ((actions - new_means).array().rowwise() * inv_std.transpose()).matrix();
  const Vector new_logp =
      (-0.5 * z.array().square()).rowwise().sum().matrix() -
      Vector::Constant(
          count,
          log_std.sum() + act * 0.5 * std::log(2.0 * std::numbers::pi));
  const Eigen::ArrayXd ratio = (new_logp - old_logp).array().exp();

  // pessimistic surrogate; gradient flows only through the active
  // unclipped branch
  const Eigen::ArrayXd unclipped = ratio * adv.array();
  const Eigen::ArrayXd clipped =
      ratio.min(1.0 + cfg.clip).max(1.0 - cfg.clip) * adv.array();
  const Eigen::ArrayXd surrogate = unclipped.min(clipped);
  stats.policy_loss = -surrogate.mean();
  stats.clip_fraction =
      ((ratio - 1.0).abs() > cfg.clip).cast<double>().mean();

  Eigen::ArrayXd dlogp =
      -(inv_count * ratio * adv.array()) *
      (unclipped <= clipped).cast<double>();

  // d logp / d mean = z / sigma; d logp / d log_std = z^2 - 1
  Matrix mean_grad =
      ((z.array().colwise() * dlogp).rowwise() * inv_std.transpose()).matrix();
  Vector log_std_grad =
      ((z.array().square() - 1.0).colwise() * dlogp)
          .colwise()
          .sum()
          .transpose();

  // exact KL(old || new) with shared behavior log-std
  const Eigen::ArrayXd old_var =
      (2.0 * batch.behavior_log_std.array()).exp();
  const Matrix mean_diff = new_means - old_means;
  const Eigen::ArrayXXd quad =
      mean_diff.array().square().rowwise() * inv_var.transpose();
  const double kl_constant =
      (log_std - batch.behavior_log_std).sum() +
      0.5 * (old_var * inv_var).sum() - 0.5 * act;
  const Eigen::ArrayXd kl = 0.5 * quad.rowwise().sum() + kl_constant;
  stats.kl = kl.mean();

  double loss = stats.policy_loss;
  if (cfg.kl.enabled) {
    loss += kl_coefficient * stats.kl;
    mean_grad.array() +=
        (kl_coefficient * inv_count) *
        (mean_diff.array().rowwise() * inv_var.transpose());
    log_std_grad.array() +=
        (kl_coefficient * inv_count) *
        (count * (1.0 - old_var * inv_var) - quad.colwise().sum().transpose());
  }

  stats.entropy = gaussian_entropy(log_std);
  if (cfg.entropy_coef != 0.0) {
    loss -= cfg.entropy_coef * stats.entropy;
    log_std_grad.array() -= cfg.entropy_coef;
  }

  // clipped value loss
  MlpCache value_cache;
  const Vector new_values =
      mlp_forward(params.value, obs, &value_cache).col(0);
  const Eigen::ArrayXd vdiff = (new_values - ret).array();
  const Eigen::ArrayXd vdelta =
      (new_values - old_values)
          .array()
          .min(cfg.value_clip)
          .max(-cfg.value_clip);
  const Eigen::ArrayXd cdiff = (old_values.array() + vdelta) - ret.array();
  const Eigen::ArrayXd unclipped_sq = vdiff.square();
  const Eigen::ArrayXd clipped_sq = cdiff.square();
  stats.value_loss = cfg.value_coef * unclipped_sq.max(clipped_sq).mean();
  loss += stats.value_loss;

  const Eigen::ArrayXd use_unclipped =
      (unclipped_sq >= clipped_sq).cast<double>();
  const Eigen::ArrayXd inside_clip =
      ((new_values - old_values).array().abs() < cfg.value_clip)
          .cast<double>();
  Vector value_grad =
      (2.0 * cfg.value_coef * inv_count *
       (use_unclipped * vdiff +
        (1.0 - use_unclipped) * inside_clip * cdiff))
          .matrix();

  stats.loss = loss;
  stats.finite = std::isfinite(loss) && mean_grad.allFinite() &&
                 value_grad.allFinite() && log_std_grad.allFinite();
  if (!stats.finite) return stats;

  mlp_backward(params.policy.mean, policy_cache, mean_grad,
               grads.policy_mean);
  grads.log_std += log_std_grad;
  mlp_backward(params.value, value_cache, Matrix(value_grad), grads.value);
  return stats;
}

namespace {

double value_of(const MlpParams& value_net, const Observation& obs) {
  return mlp_forward(value_net, obs.features)[0];
}

void worker_rollout(const AgentParams& snapshot, RolloutWorker& worker,
                    int quota, TrajectoryBatch& sub) {
  const int obs_size = snapshot.policy.mean.input_size();
  const int act_size = snapshot.policy.action_size();
  sub.allocate(quota, obs_size, act_size, kRewardTermCount);
  sub.behavior_log_std = snapshot.policy.log_std;

  for (int t = 0; t < quota; ++t) {
    if (worker.needs_reset) {
      worker.obs = worker.env->reset();
      worker.needs_reset = false;
      worker.episode_reward = 0.0;
      worker.episode_steps = 0;
    }
    const Vector mean =
        mlp_forward(snapshot.policy.mean, worker.obs.features);
    const Vector action =
        gaussian_sample(mean, snapshot.policy.log_std, worker.action_rng);
    const double logp =
        gaussian_logprob(mean, snapshot.policy.log_std, action);
    const double value = value_of(snapshot.value, worker.obs);

    const StepResult result = worker.env->step(action);

    sub.observations.row(t) = worker.obs.features;
    sub.actions.row(t) = action;
    sub.behavior_means.row(t) = mean;
    sub.log_probs[t] = logp;
    sub.rewards[t] = result.reward;
    sub.values[t] = value;
    for (int k = 0; k < kRewardTermCount; ++k) {
      sub.term_sums[k] += result.breakdown.terms[k].weighted;
    }
    worker.episode_reward += result.reward;
    worker.episode_steps += 1;

    if (result.done) {
      if (result.failure) {
        sub.done[t] = 1;
        sub.episodes_failed += 1;
        if (result.diverged) sub.episodes_diverged += 1;
      } else {
        sub.truncated[t] = 1;
        sub.bootstrap_values[t] = value_of(snapshot.value, result.obs);
      }
      sub.episode_durations.push_back(worker.env->time());
      sub.episode_rewards.push_back(worker.episode_reward);
      worker.needs_reset = true;
    } else {
      worker.obs = result.obs;
      if (t + 1 == quota) {
        // batch boundary: episode continues next iteration
        sub.truncated[t] = 1;
        sub.bootstrap_values[t] = value_of(snapshot.value, result.obs);
      }
    }
  }
}

}  // namespace

TrajectoryBatch collect_rollouts(const AgentParams& snapshot,
                                 std::vector<RolloutWorker>& workers,
                                 int target_size) {
  const int worker_count = static_cast<int>(workers.size());
  if (worker_count == 0) throw Error("collect_rollouts: no workers");
  const int quota = (target_size + worker_count - 1) / worker_count;

  std::vector<TrajectoryBatch> subs(worker_count);
  std::vector<std::thread> threads;
  threads.reserve(worker_count);
  for (int w = 0; w < worker_count; ++w) {
    threads.emplace_back([&, w] {
      worker_rollout(snapshot, workers[w], quota, subs[w]);
    });
  }
  for (auto& thread : threads) thread.join();

  TrajectoryBatch batch;
  for (int w = 0; w < worker_count; ++w) batch.concatenate(subs[w]);
  return batch;
}

void MetricsLog::open(const std::string& path,
                      const std::vector<std::string>& term_names,
                      std::uint64_t config_hash, std::uint64_t seed) {
  path_ = path;
  if (std::filesystem::exists(path)) return;  // resume: keep existing rows
  std::ostringstream out;
  out << output_header(config_hash, seed);
  out << "iteration,global_steps,mean_step_reward,mean_episode_reward,"
         "mean_episode_duration_s,episodes,failures";
  for (const auto& name : term_names) out << ",r_" << name;
  out << ",kl,clip_fraction,policy_loss,value_loss,kl_coefficient,"
         "wall_time_s\n";
  atomic_write_file(path, out.str());
}

void MetricsLog::append(const IterationStats& stats) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append metrics: " + path_);
  out << stats.iteration << ',' << stats.global_steps << ','
      << format_double(stats.mean_step_reward) << ','
      << format_double(stats.mean_episode_reward) << ','
      << format_double(stats.mean_episode_duration) << ',' << stats.episodes
      << ',' << stats.failures;
  for (int k = 0; k < stats.term_means.size(); ++k) {
    out << ',' << format_double(stats.term_means[k]);
  }
  out << ',' << format_double(stats.kl) << ','
      << format_double(stats.clip_fraction) << ','
      << format_double(stats.policy_loss) << ','
      << format_double(stats.value_loss) << ','
      << format_double(stats.kl_coefficient) << ','
      << format_double(stats.wall_time) << '\n';
}

int MetricsLog::last_iteration(const std::string& path) {
  if (!std::filesystem::exists(path)) return 0;
  std::ifstream in(path);
  std::string line;
  int last = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || !std::isdigit(line[0])) continue;
    last = std::max(last, std::atoi(line.c_str()));
  }
  return last;
}

Trainer::Trainer(RobotModel nominal, EnvConfig env_cfg, PpoConfig ppo_cfg,
                 std::uint64_t seed)
    : nominal_(std::move(nominal)), env_cfg_(std::move(env_cfg)),
      cfg_(std::move(ppo_cfg)), seed_(seed) {
  cfg_.validate();
  Rng init_rng(mix_seed(seed_, 0x696e6974));
  agent_ = agent_init(observation_size(nominal_.num_joints()),
                      nominal_.num_joints(), cfg_.hidden, cfg_.log_std_init,
                      init_rng);
  auto blocks = agent_blocks(agent_);
  opt_ = optimizer_init(blocks, cfg_.learning_rate);
  trainer_rng_.seed(mix_seed(seed_, 0x74726e72));
  kl_coefficient_ = cfg_.kl.coefficient;

  workers_.resize(cfg_.workers);
  for (int w = 0; w < cfg_.workers; ++w) {
    workers_[w].env =
        std::make_unique<Environment>(nominal_, env_cfg_, seed_ + w);
    workers_[w].action_rng.seed(mix_seed(seed_, 0x61637400 + w));
  }
}

void Trainer::restore(const Checkpoint& ck) {
  agent_ = ck.agent;
  opt_ = ck.opt;
  global_steps_ = static_cast<std::int64_t>(ck.global_step);
  iteration_ = static_cast<int>(ck.global_step /
                                static_cast<std::uint64_t>(cfg_.batch_size));
  if (!ck.trainer_rng.empty()) trainer_rng_.deserialize(ck.trainer_rng);
}

Checkpoint Trainer::make_checkpoint(std::uint64_t config_hash) const {
  Checkpoint ck;
  ck.global_step = static_cast<std::uint64_t>(global_steps_);
  ck.config_hash = config_hash;
  ck.agent = agent_;
  ck.opt = opt_;
  ck.norm = env_cfg_.norm;
  ck.trainer_rng = trainer_rng_.serialize();
  return ck;
}

TrajectoryBatch Trainer::collect() {
  return collect_rollouts(agent_, workers_, cfg_.batch_size);
}

IterationStats Trainer::update(TrajectoryBatch& batch) {
  const auto start = std::chrono::steady_clock::now();
  compute_advantages(batch, cfg_.gamma, cfg_.gae_lambda);
  normalize_advantages(batch);

  std::vector<int> indices(batch.size());
  std::iota(indices.begin(), indices.end(), 0);

  IterationStats stats;
  double policy_loss_sum = 0.0, value_loss_sum = 0.0, clip_sum = 0.0;
  int updates = 0;
  AgentGrads grads = agent_zero_grads(agent_);
  auto params_view = agent_blocks(agent_);

  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    trainer_rng_.shuffle(indices);
    for (int start_idx = 0;
         start_idx + cfg_.minibatch_size <= batch.size();
         start_idx += cfg_.minibatch_size) {
      const std::vector<int> mb(indices.begin() + start_idx,
                                indices.begin() + start_idx +
                                    cfg_.minibatch_size);
      grads.policy_mean = mlp_zero_grads(agent_.policy.mean);
      grads.log_std.setZero();
      grads.value = mlp_zero_grads(agent_.value);
      const ObjectiveStats obj =
          ppo_objective(batch, mb, agent_, cfg_, kl_coefficient_, grads);
      if (!obj.finite) {
        throw DivergenceError("non-finite PPO loss at iteration " +
                              std::to_string(iteration_ + 1) + ", epoch " +
                              std::to_string(epoch));
      }
      const auto grads_view = agent_blocks(grads);
      optimizer_step(opt_, params_view, grads_view);
      policy_loss_sum += obj.policy_loss;
      value_loss_sum += obj.value_loss;
      clip_sum += obj.clip_fraction;
      ++updates;
    }
  }

  // policy shift of the whole update, measured on the full batch
  const Matrix new_means = mlp_forward(agent_.policy.mean, batch.observations);
  stats.kl = gaussian_kl_batch(batch.behavior_means, batch.behavior_log_std,
                               new_means, agent_.policy.log_std)
                 .mean();
  if (cfg_.kl.enabled) {
    if (stats.kl > 2.0 * cfg_.kl.target) {
      kl_coefficient_ = std::min(kl_coefficient_ * 2.0, 100.0);
    } else if (stats.kl < 0.5 * cfg_.kl.target) {
      kl_coefficient_ = std::max(kl_coefficient_ * 0.5, 1.0e-4);
    }
  }

  iteration_ += 1;
  global_steps_ += batch.size();

  stats.iteration = iteration_;
  stats.global_steps = global_steps_;
  stats.mean_step_reward = batch.rewards.mean();
  stats.episodes = static_cast<int>(batch.episode_durations.size());
  stats.failures = batch.episodes_failed;
  if (stats.episodes > 0) {
    stats.mean_episode_duration =
        std::accumulate(batch.episode_durations.begin(),
                        batch.episode_durations.end(), 0.0) /
        stats.episodes;
    stats.mean_episode_reward =
        std::accumulate(batch.episode_rewards.begin(),
                        batch.episode_rewards.end(), 0.0) /
        stats.episodes;
  } else {
    double running = 0.0;
    for (const auto& w : workers_) running += w.env->time();
    stats.mean_episode_duration = running / workers_.size();
    stats.mean_episode_reward = 0.0;
  }
  stats.term_means = batch.term_sums / batch.size();
  stats.clip_fraction = updates > 0 ? clip_sum / updates : 0.0;
  stats.policy_loss = updates > 0 ? policy_loss_sum / updates : 0.0;
  stats.value_loss = updates > 0 ? value_loss_sum / updates : 0.0;
  stats.kl_coefficient = kl_coefficient_;
  stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return stats;
}

void Trainer::run(std::int64_t total_steps, const std::string& out_dir,
                  std::uint64_t config_hash, MetricsLog* metrics,
                  const std::function<void(const IterationStats&)>&
                      on_iteration) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto checkpoint_path = [&](const std::string& tag) {
    return (fs::path(out_dir) / ("checkpoint_" + tag + ".bin")).string();
  };
  const auto write_checkpoint = [&] {
    const Checkpoint ck = make_checkpoint(config_hash);
    char tag[32];
    std::snprintf(tag, sizeof(tag), "%06d", iteration_);
    save_checkpoint(checkpoint_path(tag), ck);
    save_checkpoint(checkpoint_path("latest"), ck);
  };

  if (global_steps_ == 0) write_checkpoint();

  while (global_steps_ < total_steps) {
    const auto start = std::chrono::steady_clock::now();
    TrajectoryBatch batch = collect();
    IterationStats stats = update(batch);
    stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (metrics) metrics->append(stats);
    if (on_iteration) on_iteration(stats);
    if (iteration_ % cfg_.checkpoint_interval == 0 ||
        global_steps_ >= total_steps) {
      write_checkpoint();
    }
  }
}

}  // namespace pushrec
