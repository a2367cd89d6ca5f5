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

#ifndef PUSHREC_OBSERVATION_HPP_
#define PUSHREC_OBSERVATION_HPP_

#include "pushrec/dynamics.hpp"
#include "pushrec/keyvalue.hpp"
#include "pushrec/model.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// Feature layout, n_j = number of joints (28 features for n_j = 8):
//   [0,        n_j)      joint positions, joint limits -> [-1, 1]
//   [n_j,      2 n_j)    joint velocities, [-pi, pi] rad/s -> [-1, 1]
//   [2 n_j]              base height, height range -> [-1, 1]
//   [2 n_j+1]            base pitch, pitch range -> [-1, 1]
//   [2 n_j+2,  2 n_j+4)  per-foot contact flag, {0, 1}
//   [2 n_j+4,  2 n_j+6)  per-foot vertical CoP force, [0, m g] -> [-1, 1]
//   [2 n_j+6,  2 n_j+10) feet (x, z) relative to the base frame, scaled by
//                        the position bound and clamped to the unit disc
//   [2 n_j+10, 2 n_j+12) CoM velocity, scaled by the speed bound and
//                        clamped to the unit disc
struct NormalizationConfig {
  double joint_velocity_bound = 3.14159265358979312;  // rad/s
  double height_lb = 0.0, height_ub = 0.78;           // m
  double pitch_lb = -6.28318530717958623;             // rad
  double pitch_ub = 6.28318530717958623;
  double cop_force_ub = 0.0;        // N; m g of the nominal model
  double feet_position_bound = 0.78;  // m
  double com_velocity_bound = 3.0;    // m/s
};

struct Observation {
  Vector features;

  int size() const { return static_cast<int>(features.size()); }
};

inline int observation_size(int num_joints) { return 2 * num_joints + 12; }

NormalizationConfig normalization_from_config(const KeyValueFile& kv,
                                              double nominal_weight);

Observation observe(const RobotModel& model, const SimState& state,
                    const NormalizationConfig& norm);

}  // namespace pushrec

#endif  // PUSHREC_OBSERVATION_HPP_
