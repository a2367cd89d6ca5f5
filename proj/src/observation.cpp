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

#include "pushrec/observation.hpp"

#include <cmath>

#include "pushrec/kernel.hpp"

namespace pushrec {

namespace {

// scale a planar vector by `bound`, clamping its magnitude to the unit disc;
// keeps the direction informative where a per-component affine map would
// saturate
Vec2 radial_normalize(const Vec2& v, double bound) {
  Vec2 unit = v / bound;
  const double mag = unit.norm();
  if (mag > 1.0) unit /= mag;
  return unit;
}

}  // namespace

NormalizationConfig normalization_from_config(const KeyValueFile& kv,
                                              double nominal_weight) {
  NormalizationConfig norm;
  norm.joint_velocity_bound =
      kv.get_double("obs.joint_velocity_bound", norm.joint_velocity_bound);
  if (kv.has("obs.height_range")) {
    const auto r = kv.get_doubles("obs.height_range");
    if (r.size() != 2) throw ConfigError("obs.height_range: expected `lb ub`");
    norm.height_lb = r[0];
    norm.height_ub = r[1];
  }
  if (kv.has("obs.pitch_range")) {
    const auto r = kv.get_doubles("obs.pitch_range");
    if (r.size() != 2) throw ConfigError("obs.pitch_range: expected `lb ub`");
    norm.pitch_lb = r[0];
    norm.pitch_ub = r[1];
  }
  norm.cop_force_ub = kv.get_double("obs.cop_force_bound", nominal_weight);
  norm.feet_position_bound =
      kv.get_double("obs.feet_position_bound", norm.feet_position_bound);
  norm.com_velocity_bound =
      kv.get_double("obs.com_velocity_bound", norm.com_velocity_bound);
  if (!(norm.height_lb < norm.height_ub) || !(norm.pitch_lb < norm.pitch_ub) ||
      norm.cop_force_ub <= 0.0 || norm.feet_position_bound <= 0.0 ||
      norm.com_velocity_bound <= 0.0 || norm.joint_velocity_bound <= 0.0) {
    throw ConfigError("observation normalization: degenerate range");
  }
  return norm;
}

Observation observe(const RobotModel& model, const SimState& state,
                    const NormalizationConfig& norm) {
  const int nj = model.num_joints();
  Observation obs;
  obs.features.resize(observation_size(nj));
  Vector& o = obs.features;

  for (int j = 0; j < nj; ++j) {
    o[j] = normalize(state.q[3 + j], model.joints[j].lb, model.joints[j].ub);
    o[nj + j] = normalize(state.nu[3 + j], -norm.joint_velocity_bound,
                          norm.joint_velocity_bound);
  }
  o[2 * nj] = normalize(state.q[1], norm.height_lb, norm.height_ub);
  o[2 * nj + 1] = normalize(state.q[2], norm.pitch_lb, norm.pitch_ub);

  const SupportGeometry geom = support_geometry(state);
  o[2 * nj + 2] = geom.in_contact[0] ? 1.0 : 0.0;
  o[2 * nj + 3] = geom.in_contact[1] ? 1.0 : 0.0;
  o[2 * nj + 4] = normalize(geom.vertical_force[0], 0.0, norm.cop_force_ub);
  o[2 * nj + 5] = normalize(geom.vertical_force[1], 0.0, norm.cop_force_ub);

  // feet relative to the base frame
  const Kinematics kin = forward_kinematics(model, state.q);
  const Eigen::Matrix2d base_rot_t = rotation2(state.q[2]).transpose();
  for (int f = 0; f < 2; ++f) {
    const Vec2 rel = base_rot_t * (kin.pos[model.feet[f].link] - kin.pos[0]);
    const Vec2 scaled = radial_normalize(rel, norm.feet_position_bound);
    o[2 * nj + 6 + 2 * f] = scaled.x();
    o[2 * nj + 7 + 2 * f] = scaled.y();
  }

  const CentroidalQuantities cq = centroidal(model, state.q, state.nu);
  const Vec2 vel = radial_normalize(cq.com_velocity, norm.com_velocity_bound);
  o[2 * nj + 10] = vel.x();
  o[2 * nj + 11] = vel.y();
  return obs;
}

}  // namespace pushrec
