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

#include "pushrec/batch.hpp"

#include <cmath>
#include <limits>

namespace pushrec {

void TrajectoryBatch::allocate(int steps, int obs_size, int act_size,
                               int term_count) {
  observations.resize(steps, obs_size);
  actions.resize(steps, act_size);
  behavior_means.resize(steps, act_size);
  log_probs.resize(steps);
  rewards.resize(steps);
  values.resize(steps);
  done.assign(steps, 0);
  truncated.assign(steps, 0);
  bootstrap_values =
      Vector::Constant(steps, std::numeric_limits<double>::quiet_NaN());
  term_sums = Vector::Zero(term_count);
}

void TrajectoryBatch::concatenate(const TrajectoryBatch& other) {
  if (size() == 0) {
    *this = other;
    return;
  }
  const int old_size = size();
  const int added = other.size();
  observations.conservativeResize(old_size + added, Eigen::NoChange);
  actions.conservativeResize(old_size + added, Eigen::NoChange);
  behavior_means.conservativeResize(old_size + added, Eigen::NoChange);
  log_probs.conservativeResize(old_size + added);
  rewards.conservativeResize(old_size + added);
  values.conservativeResize(old_size + added);
  bootstrap_values.conservativeResize(old_size + added);

  observations.bottomRows(added) = other.observations;
  actions.bottomRows(added) = other.actions;
  behavior_means.bottomRows(added) = other.behavior_means;
  log_probs.tail(added) = other.log_probs;
  rewards.tail(added) = other.rewards;
  values.tail(added) = other.values;
  bootstrap_values.tail(added) = other.bootstrap_values;
  done.insert(done.end(), other.done.begin(), other.done.end());
  truncated.insert(truncated.end(), other.truncated.begin(),
                   other.truncated.end());

  episode_durations.insert(episode_durations.end(),
                           other.episode_durations.begin(),
                           other.episode_durations.end());
  episode_rewards.insert(episode_rewards.end(), other.episode_rewards.begin(),
                         other.episode_rewards.end());
  episodes_failed += other.episodes_failed;
  episodes_diverged += other.episodes_diverged;
  term_sums += other.term_sums;
}

void compute_advantages(TrajectoryBatch& batch, double gamma, double lambda) {
  const int steps = batch.size();
  batch.advantages.resize(steps);
  batch.returns.resize(steps);
  double tail = 0.0;
  for (int t = steps - 1; t >= 0; --t) {
    const bool segment_end = batch.done[t] || batch.truncated[t];
    double delta;
    if (batch.done[t]) {
      delta = batch.rewards[t] - batch.values[t];
    } else if (batch.truncated[t]) {
      if (!std::isfinite(batch.bootstrap_values[t])) {
        throw Error("compute_advantages: truncated step " + std::to_string(t) +
                    " has no bootstrap value");
      }
      delta = batch.rewards[t] + gamma * batch.bootstrap_values[t] -
              batch.values[t];
    } else {
      if (t + 1 == steps) {
        throw Error(
            "compute_advantages: last step runs past the batch without a "
            "bootstrap");
      }
      delta = batch.rewards[t] + gamma * batch.values[t + 1] - batch.values[t];
    }
    const double advantage =
        delta + (segment_end ? 0.0 : gamma * lambda * tail);
    batch.advantages[t] = advantage;
    batch.returns[t] = advantage + batch.values[t];
    tail = advantage;
  }
}

void normalize_advantages(TrajectoryBatch& batch) {
  const int steps = batch.size();
  if (steps < 2) return;
  const double mean = batch.advantages.mean();
  const double var =
      (batch.advantages.array() - mean).square().sum() / steps;
  const double stddev = std::sqrt(var);
  batch.advantages =
      (batch.advantages.array() - mean) / (stddev + 1.0e-12);
}

}  // namespace pushrec
