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

#include "pushrec/agent.hpp"

namespace pushrec {

AgentParams agent_init(int observation_size, int action_size,
                       const std::vector<int>& hidden, double log_std_init,
                       Rng& rng) {
  std::vector<int> policy_sizes{observation_size};
  policy_sizes.insert(policy_sizes.end(), hidden.begin(), hidden.end());
  policy_sizes.push_back(action_size);
  std::vector<int> value_sizes{observation_size};
  value_sizes.insert(value_sizes.end(), hidden.begin(), hidden.end());
  value_sizes.push_back(1);

  AgentParams params;
  params.policy = policy_init(policy_sizes, rng, log_std_init);
  params.value = mlp_init(value_sizes, rng);
  return params;
}

AgentGrads agent_zero_grads(const AgentParams& params) {
  AgentGrads grads;
  grads.policy_mean = mlp_zero_grads(params.policy.mean);
  grads.log_std = Vector::Zero(params.policy.log_std.size());
  grads.value = mlp_zero_grads(params.value);
  return grads;
}

namespace {

void append_mlp(std::vector<ParamBlock>& blocks, MlpParams& mlp) {
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    blocks.emplace_back(mlp.weights[l].data(), mlp.weights[l].size());
    blocks.emplace_back(mlp.biases[l].data(), mlp.biases[l].size());
  }
}

void append_mlp(std::vector<ConstParamBlock>& blocks, const MlpGrads& mlp) {
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    blocks.emplace_back(mlp.weights[l].data(), mlp.weights[l].size());
    blocks.emplace_back(mlp.biases[l].data(), mlp.biases[l].size());
  }
}

}  // namespace

std::vector<ParamBlock> agent_blocks(AgentParams& params) {
  std::vector<ParamBlock> blocks;
  append_mlp(blocks, params.policy.mean);
  blocks.emplace_back(params.policy.log_std.data(),
                      params.policy.log_std.size());
  append_mlp(blocks, params.value);
  return blocks;
}

std::vector<ConstParamBlock> agent_blocks(const AgentGrads& grads) {
  std::vector<ConstParamBlock> blocks;
  append_mlp(blocks, grads.policy_mean);
  blocks.emplace_back(grads.log_std.data(), grads.log_std.size());
  append_mlp(blocks, grads.value);
  return blocks;
}

}  // namespace pushrec
