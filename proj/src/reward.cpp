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

#include "pushrec/reward.hpp"

#include <cmath>

#include "pushrec/kernel.hpp"

namespace pushrec {

namespace {

constexpr double kDegree = 0.017453292519943295;

RewardTermSpec term(const char* name, double weight, double cutoff, bool ss,
                    bool ds) {
  return RewardTermSpec{name, weight, cutoff, ss, ds};
}

}  // namespace

RewardSpec default_reward_spec(double nominal_weight) {
  RewardSpec spec;
  spec.foot_force_target = 0.5 * nominal_weight;
  spec.terms.resize(kRewardTermCount);
  spec.terms[kRewardTorques] = term("torques", 5.0, 10.0, true, true);
  spec.terms[kRewardJointVelocities] =
      term("joint_velocities", 2.0, 1.0, true, true);
  spec.terms[kRewardPostural] =
      term("postural", 10.0, 7.5 * kDegree, false, true);
  spec.terms[kRewardComZVelocity] =
      term("com_z_velocity", 2.0, 1.0, true, true);
  spec.terms[kRewardComXVelocity] =
      term("com_x_velocity", 2.0, 0.5, false, true);
  spec.terms[kRewardFootForceLeft] =
      term("foot_force_l", 4.0, spec.foot_force_target, true, true);
  spec.terms[kRewardFootForceRight] =
      term("foot_force_r", 4.0, spec.foot_force_target, true, true);
  spec.terms[kRewardMomentum] = term("momentum", 1.0, 50.0, true, true);
  spec.terms[kRewardFootCopLeft] = term("foot_cop_l", 20.0, 0.3, true, true);
  spec.terms[kRewardFootCopRight] = term("foot_cop_r", 20.0, 0.3, true, true);
  spec.terms[kRewardFootOrientationLeft] =
      term("foot_orientation_l", 3.0, 0.01, true, true);
  spec.terms[kRewardFootOrientationRight] =
      term("foot_orientation_r", 3.0, 0.01, true, true);
  spec.terms[kRewardComProjection] =
      term("com_projection", 10.0, 0.0, false, true);
  spec.terms[kRewardFeetContact] = term("feet_contact", 2.0, 0.0, true, true);
  spec.terms[kRewardLinksContact] =
      term("links_contact", -10.0, 0.0, true, true);
  return spec;
}

RewardSpec reward_spec_from_config(const KeyValueFile& kv,
                                   double nominal_weight) {
  RewardSpec spec = default_reward_spec(nominal_weight);
  spec.epsilon = kv.get_double("reward.epsilon", spec.epsilon);
  spec.hull_margin = kv.get_double("reward.hull_margin", spec.hull_margin);
  spec.foot_force_target =
      kv.get_double("reward.foot_force_target", spec.foot_force_target);
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw ConfigError("reward.epsilon: must lie in (0, 1)");
  }
  for (auto& t : spec.terms) {
    const std::string base = "reward." + t.name;
    t.weight = kv.get_double(base + ".weight", t.weight);
    t.cutoff = kv.get_double(base + ".cutoff", t.cutoff);
    t.in_ss = kv.get_bool(base + ".ss", t.in_ss);
    t.in_ds = kv.get_bool(base + ".ds", t.in_ds);
    if (t.cutoff < 0.0) {
      throw ConfigError(base + ".cutoff: must be >= 0");
    }
  }
  return spec;
}

RewardBreakdown compute_reward(const RobotModel& model, const SimState& before,
                               const Vector& action, const SimState& after,
                               const Matrix& substep_torques,
                               const RewardSpec& spec) {
  (void)before;
  const int nj = model.num_joints();
  if (action.size() != nj) throw ShapeError("compute_reward: action size");
  if (substep_torques.cols() != nj) {
    throw ShapeError("compute_reward: torque columns");
  }

  RewardBreakdown out;
  out.terms.resize(kRewardTermCount);

  const SupportGeometry geom = support_geometry(after);
  out.double_support = geom.in_contact[0] && geom.in_contact[1];
  const CentroidalQuantities cq = centroidal(model, after.q, after.nu);
  const Kinematics kin = forward_kinematics(model, after.q);
  out.terminal_contact = non_foot_ground_contact(model, after.q);

  // raw measurement and target distance per term; CoP terms are skipped
  // for an unloaded foot (undefined CoP)
  auto eval = [&](int idx, double raw, double distance, bool defined) {
    RewardTermValue& v = out.terms[idx];
    const RewardTermSpec& t = spec.terms[idx];
    v.active = (out.double_support ? t.in_ds : t.in_ss) && defined;
    v.raw = raw;
    if (!v.active) return;
    v.kernel = rbf_kernel(distance, t.cutoff, spec.epsilon);
    v.weighted = t.weight * v.kernel;
  };
  auto eval_bool = [&](int idx, bool condition) {
    RewardTermValue& v = out.terms[idx];
    const RewardTermSpec& t = spec.terms[idx];
    v.active = out.double_support ? t.in_ds : t.in_ss;
    v.raw = condition ? 1.0 : 0.0;
    if (!v.active) return;
    v.kernel = v.raw;
    v.weighted = t.weight * v.kernel;
  };

  const double mean_torque =
      substep_torques.size() > 0 ? substep_torques.mean() : 0.0;
  eval(kRewardTorques, mean_torque, std::abs(mean_torque), true);

  const double action_norm = action.norm();
  eval(kRewardJointVelocities, action_norm, action_norm, true);

  const double posture_distance =
      (after.q.segment(3, nj) - model.reference_posture).norm();
  eval(kRewardPostural, posture_distance, posture_distance, true);

  eval(kRewardComZVelocity, cq.com_velocity.y(),
       std::abs(cq.com_velocity.y()), true);

  // horizontal target points from the CoM projection toward the hull
  // center, amplified by the LIP frequency sqrt(g / com height)
  if (geom.any_contact) {
    const double hull_center = 0.5 * (geom.x_min + geom.x_max);
    const double omega0 =
        std::sqrt(model.gravity / std::max(cq.com.y(), 1.0e-3));
    const double target = omega0 * (hull_center - cq.com.x());
    eval(kRewardComXVelocity, cq.com_velocity.x(),
         std::abs(cq.com_velocity.x() - target), true);
  } else {
    eval(kRewardComXVelocity, cq.com_velocity.x(), 0.0, false);
  }

  eval(kRewardFootForceLeft, geom.vertical_force[0],
       std::abs(geom.vertical_force[0] - spec.foot_force_target), true);
  eval(kRewardFootForceRight, geom.vertical_force[1],
       std::abs(geom.vertical_force[1] - spec.foot_force_target), true);

  const double momentum = cq.linear_momentum.squaredNorm() +
                          cq.angular_momentum * cq.angular_momentum;
  eval(kRewardMomentum, momentum, momentum, true);

  for (int f = 0; f < 2; ++f) {
    const int idx = f == 0 ? kRewardFootCopLeft : kRewardFootCopRight;
    eval(idx, geom.cop_x[f], std::abs(geom.cop_x[f] - geom.sole_center_x[f]),
         geom.cop_defined[f]);
  }
  for (int f = 0; f < 2; ++f) {
    const int idx =
        f == 0 ? kRewardFootOrientationLeft : kRewardFootOrientationRight;
    const double sole_alignment = std::cos(kin.angle[model.feet[f].link]);
    eval(idx, sole_alignment, std::abs(sole_alignment - 1.0), true);
  }

  const bool com_inside =
      geom.any_contact &&
      cq.com.x() >= geom.x_min + spec.hull_margin &&
      cq.com.x() <= geom.x_max - spec.hull_margin;
  eval_bool(kRewardComProjection, com_inside);
  eval_bool(kRewardFeetContact, geom.in_contact[0] && geom.in_contact[1]);
  eval_bool(kRewardLinksContact, out.terminal_contact);

  for (const RewardTermValue& v : out.terms) out.total += v.weighted;
  return out;
}

}  // namespace pushrec
