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

#ifndef PUSHREC_REWARD_HPP_
#define PUSHREC_REWARD_HPP_

#include <string>
#include <vector>

#include "pushrec/dynamics.hpp"
#include "pushrec/keyvalue.hpp"
#include "pushrec/model.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// Reward terms. Kernelized terms map the distance to their target through
// the RBF kernel; Boolean terms contribute 0 or 1. Paired foot terms carry
// the table weight once per foot. DS = both feet in contact; any other
// support state uses the SS mask.
enum RewardTerm {
  kRewardTorques = 0,
  kRewardJointVelocities,
  kRewardPostural,
  kRewardComZVelocity,
  kRewardComXVelocity,
  kRewardFootForceLeft,
  kRewardFootForceRight,
  kRewardMomentum,
  kRewardFootCopLeft,
  kRewardFootCopRight,
  kRewardFootOrientationLeft,
  kRewardFootOrientationRight,
  kRewardComProjection,
  kRewardFeetContact,
  kRewardLinksContact,
  kRewardTermCount
};

struct RewardTermSpec {
  std::string name;
  double weight = 0.0;
  double cutoff = 0.0;  // > 0 for kernelized terms, 0 for Boolean terms
  bool in_ss = true;
  bool in_ds = true;
};

struct RewardSpec {
  std::vector<RewardTermSpec> terms;  // indexed by RewardTerm
  double epsilon = 0.01;              // kernel value at the cutoff distance
  double hull_margin = 0.025;         // support shrink per side, m
  double foot_force_target = 0.0;     // N, half the nominal weight

  bool kernelized(int term) const { return terms[term].cutoff > 0.0; }
};

struct RewardTermValue {
  double raw = 0.0;     // measured value (distance for vector terms)
  double kernel = 0.0;  // kernel output or Boolean indicator
  double weighted = 0.0;
  bool active = false;
};

struct RewardBreakdown {
  std::vector<RewardTermValue> terms;
  double total = 0.0;
  bool double_support = false;
  bool terminal_contact = false;  // a non-foot link touched the ground
};

// Table defaults; `nominal_weight` is m g of the un-randomized model
RewardSpec default_reward_spec(double nominal_weight);

// apply `reward.*` overrides from an environment config
RewardSpec reward_spec_from_config(const KeyValueFile& kv,
                                   double nominal_weight);

// reward for the transition `before -> after` under `action`;
// `substep_torques` holds one row per physics substep of the control period
RewardBreakdown compute_reward(const RobotModel& model, const SimState& before,
                               const Vector& action, const SimState& after,
                               const Matrix& substep_torques,
                               const RewardSpec& spec);

}  // namespace pushrec

#endif  // PUSHREC_REWARD_HPP_
