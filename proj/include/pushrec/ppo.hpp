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

#ifndef PUSHREC_PPO_HPP_
#define PUSHREC_PPO_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pushrec/agent.hpp"
#include "pushrec/batch.hpp"
#include "pushrec/checkpoint.hpp"
#include "pushrec/env.hpp"
#include "pushrec/keyvalue.hpp"

namespace pushrec {

struct KlPenaltyConfig {
  bool enabled = true;
  double coefficient = 0.2;  // adapted around the target after each update
  double target = 0.01;
};

struct PpoConfig {
  double gamma = 0.95;
  double clip = 0.3;
  double learning_rate = 1.0e-4;
  double gae_lambda = 1.0;
  int batch_size = 10000;
  int minibatch_size = 512;
  int epochs = 32;
  int workers = 4;
  double value_clip = 1000.0;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  KlPenaltyConfig kl;
  std::vector<int> hidden = {128, 64};
  double log_std_init = -1.2039728043259361;  // log 0.3
  int checkpoint_interval = 5;                // iterations

  void validate() const;
};

std::string default_ppo_config();
PpoConfig load_ppo_config(const KeyValueFile& kv);
KeyValueFile ppo_config_to_keyvalue(const PpoConfig& cfg);

struct ObjectiveStats {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double kl = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  bool finite = true;
};

// clipped-surrogate + clipped-value loss (+ optional KL penalty) with exact
// gradients over the selected minibatch rows; accumulates into `grads`
ObjectiveStats ppo_objective(const TrajectoryBatch& batch,
                             const std::vector<int>& indices,
                             const AgentParams& params, const PpoConfig& cfg,
                             double kl_coefficient, AgentGrads& grads);

// pessimistic per-sample surrogate min(rho A, clip(rho) A)
double clipped_surrogate(double ratio, double advantage, double clip);

// one rollout worker: environment plus its action-sampling stream
struct RolloutWorker {
  std::unique_ptr<Environment> env;
  Rng action_rng;
  Observation obs;
  bool needs_reset = true;
  double episode_reward = 0.0;
  int episode_steps = 0;
};

// Steps every worker under the same policy snapshot until the concatenated
// batch holds at least `target_size` transitions. Sub-batches concatenate
// in worker-index order; a worker whose environment diverges records the
// episode as failed and resets.
TrajectoryBatch collect_rollouts(const AgentParams& snapshot,
                                 std::vector<RolloutWorker>& workers,
                                 int target_size);

struct IterationStats {
  int iteration = 0;
  std::int64_t global_steps = 0;
  double mean_step_reward = 0.0;
  double mean_episode_reward = 0.0;
  double mean_episode_duration = 0.0;
  int episodes = 0;
  int failures = 0;
  Vector term_means;
  double kl = 0.0;
  double clip_fraction = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double kl_coefficient = 0.0;
  double wall_time = 0.0;
};

class MetricsLog {
 public:
  MetricsLog() = default;
  // appends to an existing log; `term_names` defines the per-term columns
  void open(const std::string& path, const std::vector<std::string>& term_names,
            std::uint64_t config_hash, std::uint64_t seed);
  void append(const IterationStats& stats);
  // highest iteration recorded in an existing file, 0 if none
  static int last_iteration(const std::string& path);

 private:
  std::string path_;
};

class Trainer {
 public:
  Trainer(RobotModel nominal, EnvConfig env_cfg, PpoConfig ppo_cfg,
          std::uint64_t seed);

  void restore(const Checkpoint& ck);
  Checkpoint make_checkpoint(std::uint64_t config_hash) const;

  TrajectoryBatch collect();
  IterationStats update(TrajectoryBatch& batch);

  // full loop: collect/update until `total_steps`, checkpointing into
  // `out_dir` and appending metrics; `on_iteration` may be empty
  void run(std::int64_t total_steps, const std::string& out_dir,
           std::uint64_t config_hash, MetricsLog* metrics,
           const std::function<void(const IterationStats&)>& on_iteration = {});

  const AgentParams& agent() const { return agent_; }
  AgentParams& agent() { return agent_; }
  std::int64_t global_steps() const { return global_steps_; }
  int iteration() const { return iteration_; }
  double kl_coefficient() const { return kl_coefficient_; }

 private:
  RobotModel nominal_;
  EnvConfig env_cfg_;
  PpoConfig cfg_;
  std::uint64_t seed_ = 0;
  AgentParams agent_;
  OptimizerState opt_;
  Rng trainer_rng_;
  std::vector<RolloutWorker> workers_;
  std::int64_t global_steps_ = 0;
  int iteration_ = 0;
  double kl_coefficient_ = 0.0;
};

}  // namespace pushrec

#endif  // PUSHREC_PPO_HPP_
