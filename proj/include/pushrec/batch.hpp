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

#ifndef PUSHREC_BATCH_HPP_
#define PUSHREC_BATCH_HPP_

#include <cstdint>
#include <vector>

#include "pushrec/types.hpp"

namespace pushrec {

// On-policy rollout storage. Episode segments end in a failure terminal
// (`done`), a truncation (`truncated`, value-bootstrapped), or the batch
// boundary, which is recorded as a truncation.
struct TrajectoryBatch {
  Matrix observations;    // T x obs
  Matrix actions;         // T x act, raw policy samples
  Matrix behavior_means;  // T x act, mean outputs of the behavior policy
  Vector behavior_log_std;
  Vector log_probs;  // under the behavior policy
  Vector rewards;
  Vector values;
  std::vector<std::uint8_t> done;
  std::vector<std::uint8_t> truncated;
  Vector bootstrap_values;  // NaN unless truncated at that step
  Vector advantages;
  Vector returns;

  // episode bookkeeping over the collection window
  std::vector<double> episode_durations;  // s, completed episodes
  std::vector<double> episode_rewards;
  int episodes_failed = 0;
  int episodes_diverged = 0;
  Vector term_sums;  // per reward term, summed weighted contributions

  int size() const { return static_cast<int>(rewards.size()); }

  void allocate(int steps, int obs_size, int act_size, int term_count);
  void concatenate(const TrajectoryBatch& other);
};

// GAE over episode segments:
//   delta_t = r_t + gamma V_{t+1} (1 - done) - V_t
//   A_t     = delta_t + gamma lambda (1 - done) A_{t+1},
// truncated steps bootstrap with the stored next-state value; failure ends
// bootstrap with zero; returns_t = A_t + V_t. With lambda = 1 this is the
// discounted Monte-Carlo return minus the value baseline.
// Throws Error when a segment lacks its bootstrap value.
void compute_advantages(TrajectoryBatch& batch, double gamma, double lambda);

// in-place batch normalization to zero mean, unit standard deviation
void normalize_advantages(TrajectoryBatch& batch);

}  // namespace pushrec

#endif  // PUSHREC_BATCH_HPP_
