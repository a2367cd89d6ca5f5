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

#ifndef PUSHREC_AGENT_HPP_
#define PUSHREC_AGENT_HPP_

#include <vector>

#include "pushrec/adam.hpp"
#include "pushrec/mlp.hpp"
#include "pushrec/policy.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// policy and value networks; the two share no layers
struct AgentParams {
  GaussianPolicyParams policy;
  MlpParams value;
};

struct AgentGrads {
  MlpGrads policy_mean;
  Vector log_std;
  MlpGrads value;
};

AgentParams agent_init(int observation_size, int action_size,
                       const std::vector<int>& hidden, double log_std_init,
                       Rng& rng);

AgentGrads agent_zero_grads(const AgentParams& params);

// flat views in a fixed order: policy layers, log_std, value layers
std::vector<ParamBlock> agent_blocks(AgentParams& params);
std::vector<ConstParamBlock> agent_blocks(const AgentGrads& grads);

}  // namespace pushrec

#endif  // PUSHREC_AGENT_HPP_
