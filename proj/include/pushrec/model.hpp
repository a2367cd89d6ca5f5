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

#ifndef PUSHREC_MODEL_HPP_
#define PUSHREC_MODEL_HPP_

#include <string>
#include <vector>

#include "pushrec/keyvalue.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// Planar articulated biped: a kinematic tree of rigid links rooted at the
// floating base (x, z, pitch). Joint j attaches link j+1 to its parent.

struct LinkSpec {
  std::string name;
  double mass = 0.0;     // kg
  double inertia = 0.0;  // about the CoM, kg m^2
  double length = 0.0;   // m, frame origin to distal end
  Vec2 com = Vec2::Zero();  // CoM in the link frame
  Vec2 tip = Vec2::Zero();  // distal end in the link frame
};

struct JointSpec {
  std::string name;
  int parent = -1;            // parent link index
  int child = -1;             // child link index (== joint index + 1)
  Vec2 anchor = Vec2::Zero();  // joint position in the parent frame
  double lb = 0.0, ub = 0.0;   // position limits, rad
  double velocity_limit = 0.0;  // rad/s
  double kp = 0.0, ki = 0.0, kd = 0.0;  // PID gains
};

struct FootGeometry {
  int link = -1;       // foot link index
  double heel = 0.0;   // heel x offset in the foot frame, m
  double toe = 0.0;    // toe x offset, m
  double sole_drop = 0.0;  // sole depth below the ankle, m
};

struct ContactParams {
  double normal_stiffness = 2.0e5;      // N/m
  double normal_damping = 2.0e3;        // N s/m
  double tangential_stiffness = 1.0e3;  // N s/m
  double friction = 1.0;                // Coulomb coefficient
};

struct RobotModel {
  std::string name;
  std::vector<LinkSpec> links;    // links[0] is the floating base
  std::vector<JointSpec> joints;  // joints[j] drives links[j + 1]
  std::vector<FootGeometry> feet;  // left, right
  ContactParams contact;
  double gravity = 9.81;
  double total_mass = 0.0;
  double actuation_delay = 0.0;  // s, position references reach PIDs late
  double integral_limit = 0.5;   // rad s, PID anti-windup bound

  Vector reference_posture;   // s0, rad
  double standing_height = 0.0;  // base z with soles touching at s0

  // per-joint optional torque saturation; empty disables clamping
  Vector torque_limit;

  // per-link ground-collision probe points (link frame), feet excluded;
  // used by the non-foot-contact termination predicate
  std::vector<std::vector<Vec2>> collision_points;

  int num_joints() const { return static_cast<int>(joints.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
  int dof() const { return 3 + num_joints(); }

  // ancestor joint chain (root to leaf order) per link
  std::vector<std::vector<int>> ancestors;

  bool is_foot_link(int link) const {
    for (const auto& f : feet) {
      if (f.link == link) return true;
    }
    return false;
  }

  int link_index(const std::string& link_name) const;
  int joint_index(const std::string& joint_name) const;
};

// built-in 8-joint model, total mass 33 kg
std::string default_model_config();

// parse + validate; throws ConfigError naming the offending field
RobotModel build_model(const KeyValueFile& spec);
RobotModel build_default_model();

// flat serialization that round-trips through build_model
KeyValueFile model_to_config(const RobotModel& model);

}  // namespace pushrec

#endif  // PUSHREC_MODEL_HPP_
