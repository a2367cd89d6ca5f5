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

#include "pushrec/model.hpp"

#include <algorithm>
#include <cmath>

#include "pushrec/dynamics.hpp"

namespace pushrec {

std::string default_model_config() {
  return R"(# planar 8-joint biped, total mass 33 kg
model.name = planar-biped-8
gravity = 9.81

links.order = pelvis torso arm thigh_l shank_l foot_l thigh_r shank_r foot_r
joints.order = torso_pitch shoulder_pitch hip_l knee_l ankle_l hip_r knee_r ankle_r
feet.links = foot_l foot_r

link.pelvis.mass = 5.4
link.pelvis.inertia = 0.019
link.pelvis.length = 0.10
link.pelvis.com = 0.0 0.05
link.pelvis.tip = 0.0 0.10

link.torso.mass = 11.5
link.torso.inertia = 0.20
link.torso.length = 0.45
link.torso.com = 0.0 0.22
link.torso.tip = 0.0 0.45

link.arm.mass = 3.5
link.arm.inertia = 0.073
link.arm.length = 0.50
link.arm.com = 0.0 -0.22
link.arm.tip = 0.0 -0.50

link.thigh_l.mass = 3.5
link.thigh_l.inertia = 0.026
link.thigh_l.length = 0.30
link.thigh_l.com = 0.0 -0.15
link.thigh_l.tip = 0.0 -0.30

link.shank_l.mass = 2.0
link.shank_l.inertia = 0.015
link.shank_l.length = 0.30
link.shank_l.com = 0.0 -0.14
link.shank_l.tip = 0.0 -0.30

link.foot_l.mass = 0.8
link.foot_l.inertia = 0.003
link.foot_l.length = 0.20
link.foot_l.com = 0.03 -0.02
link.foot_l.tip = 0.14 -0.04

link.thigh_r.mass = 3.5
link.thigh_r.inertia = 0.026
link.thigh_r.length = 0.30
link.thigh_r.com = 0.0 -0.15
link.thigh_r.tip = 0.0 -0.30

link.shank_r.mass = 2.0
link.shank_r.inertia = 0.015
link.shank_r.length = 0.30
link.shank_r.com = 0.0 -0.14
link.shank_r.tip = 0.0 -0.30

link.foot_r.mass = 0.8
link.foot_r.inertia = 0.003
link.foot_r.length = 0.20
link.foot_r.com = 0.03 -0.02
link.foot_r.tip = 0.14 -0.04

joint.torso_pitch.parent = pelvis
joint.torso_pitch.child = torso
joint.torso_pitch.anchor = 0.0 0.10
joint.torso_pitch.limits = -0.8 0.8
joint.torso_pitch.velocity_limit = 6.0
joint.torso_pitch.pid = 2400.0 200.0 90.0

joint.shoulder_pitch.parent = torso
joint.shoulder_pitch.child = arm
joint.shoulder_pitch.anchor = 0.0 0.40
joint.shoulder_pitch.limits = -2.5 2.5
joint.shoulder_pitch.velocity_limit = 10.0
joint.shoulder_pitch.pid = 600.0 40.0 16.0

joint.hip_l.parent = pelvis
joint.hip_l.child = thigh_l
joint.hip_l.anchor = 0.0 0.0
joint.hip_l.limits = -1.2 1.8
joint.hip_l.velocity_limit = 10.0
joint.hip_l.pid = 3500.0 2000.0 80.0

joint.knee_l.parent = thigh_l
joint.knee_l.child = shank_l
joint.knee_l.anchor = 0.0 -0.30
joint.knee_l.limits = -2.2 0.02
joint.knee_l.velocity_limit = 12.0
joint.knee_l.pid = 2500.0 800.0 40.0

joint.ankle_l.parent = shank_l
joint.ankle_l.child = foot_l
joint.ankle_l.anchor = 0.0 -0.30
joint.ankle_l.limits = -0.9 0.9
joint.ankle_l.velocity_limit = 12.0
joint.ankle_l.pid = 2500.0 1500.0 25.0

joint.hip_r.parent = pelvis
joint.hip_r.child = thigh_r
joint.hip_r.anchor = 0.0 0.0
joint.hip_r.limits = -1.2 1.8
joint.hip_r.velocity_limit = 10.0
joint.hip_r.pid = 3500.0 2000.0 80.0

joint.knee_r.parent = thigh_r
joint.knee_r.child = shank_r
joint.knee_r.anchor = 0.0 -0.30
joint.knee_r.limits = -2.2 0.02
joint.knee_r.velocity_limit = 12.0
joint.knee_r.pid = 2500.0 800.0 40.0

joint.ankle_r.parent = shank_r
joint.ankle_r.child = foot_r
joint.ankle_r.anchor = 0.0 -0.30
joint.ankle_r.limits = -0.9 0.9
joint.ankle_r.velocity_limit = 12.0
joint.ankle_r.pid = 2500.0 1500.0 25.0

# reference standing posture
posture.torso_pitch = 0.0
posture.shoulder_pitch = 0.0
posture.hip_l = 0.2
posture.knee_l = -0.4
posture.ankle_l = 0.2
posture.hip_r = 0.2
posture.knee_r = -0.4
posture.ankle_r = 0.2

feet.heel = -0.06
feet.toe = 0.14
feet.sole_drop = 0.04

contact.normal_stiffness = 2e5
contact.normal_damping = 2e3
contact.tangential_stiffness = 1e3
contact.friction = 1.0

actuation.integral_limit = 0.5
)";
}

namespace {

Vec2 get_vec2(const KeyValueFile& kv, const std::string& key) {
  const auto v = kv.get_doubles(key);
  if (v.size() != 2) {
    throw ConfigError("key `" + key + "`: expected two numbers");
  }
  return Vec2(v[0], v[1]);
}

void check_positive(double value, const std::string& field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError("invalid parameter `" + field + "`: must be > 0, got " +
                      format_double(value));
  }
}

}  // namespace

int RobotModel::link_index(const std::string& link_name) const {
  for (int i = 0; i < num_links(); ++i) {
    if (links[i].name == link_name) return i;
  }
  throw ConfigError("unknown link `" + link_name + "`");
}

int RobotModel::joint_index(const std::string& joint_name) const {
  for (int i = 0; i < num_joints(); ++i) {
    if (joints[i].name == joint_name) return i;
  }
  throw ConfigError("unknown joint `" + joint_name + "`");
}

RobotModel build_model(const KeyValueFile& spec) {
  RobotModel model;
  model.name = spec.get_string("model.name", "unnamed");
  model.gravity = spec.get_double("gravity", 9.81);
  if (!std::isfinite(model.gravity) || model.gravity < 0.0) {
    throw ConfigError("invalid parameter `gravity`: must be >= 0");
  }

  const auto link_names = spec.get_strings("links.order");
  const auto joint_names = spec.get_strings("joints.order");
  if (link_names.empty()) throw ConfigError("links.order: no links");
  if (joint_names.size() + 1 != link_names.size()) {
    throw ConfigError("joints.order: expected " +
                      std::to_string(link_names.size() - 1) + " joints for " +
                      std::to_string(link_names.size()) + " links");
  }

  for (const auto& lname : link_names) {
    LinkSpec link;
    link.name = lname;
    const std::string base = "link." + lname;
    link.mass = spec.get_double(base + ".mass");
    link.inertia = spec.get_double(base + ".inertia");
    link.length = spec.get_double(base + ".length");
    link.com = get_vec2(spec, base + ".com");
    link.tip = get_vec2(spec, base + ".tip");
    check_positive(link.mass, base + ".mass");
    check_positive(link.inertia, base + ".inertia");
    check_positive(link.length, base + ".length");
    model.links.push_back(link);
    model.total_mass += link.mass;
  }

  for (int j = 0; j < static_cast<int>(joint_names.size()); ++j) {
    const std::string& jname = joint_names[j];
    const std::string base = "joint." + jname;
    JointSpec joint;
    joint.name = jname;
    joint.parent = model.link_index(spec.get_string(base + ".parent"));
    joint.child = model.link_index(spec.get_string(base + ".child"));
    if (joint.child != j + 1) {
      throw ConfigError(base + ".child: joint " + std::to_string(j) +
                        " must drive link " + std::to_string(j + 1) + " (`" +
                        link_names[j + 1] + "`)");
    }
    if (joint.parent >= joint.child) {
      throw ConfigError(base + ".parent: parent must precede child");
    }
    joint.anchor = get_vec2(spec, base + ".anchor");
    const auto limits = spec.get_doubles(base + ".limits");
    if (limits.size() != 2) {
      throw ConfigError(base + ".limits: expected `lb ub`");
    }
    joint.lb = limits[0];
    joint.ub = limits[1];
    if (!(joint.lb < joint.ub)) {
      throw ConfigError(base + ".limits: require lb < ub, got " +
                        format_double(joint.lb) + " .. " +
                        format_double(joint.ub));
    }
    joint.velocity_limit = spec.get_double(base + ".velocity_limit");
    check_positive(joint.velocity_limit, base + ".velocity_limit");
    const auto pid = spec.get_doubles(base + ".pid");
    if (pid.size() != 3) throw ConfigError(base + ".pid: expected `kp ki kd`");
    joint.kp = pid[0];
    joint.ki = pid[1];
    joint.kd = pid[2];
    model.joints.push_back(joint);
  }

  const auto foot_links = spec.get_strings("feet.links");
  if (foot_links.size() != 2) {
    throw ConfigError("feet.links: expected two foot links (left right)");
  }
  const double heel = spec.get_double("feet.heel");
  const double toe = spec.get_double("feet.toe");
  const double sole_drop = spec.get_double("feet.sole_drop");
  if (!(heel < toe)) throw ConfigError("feet.heel: must be < feet.toe");
  check_positive(sole_drop, "feet.sole_drop");
  for (const auto& fname : foot_links) {
    FootGeometry foot;
    foot.link = model.link_index(fname);
    foot.heel = heel;
    foot.toe = toe;
    foot.sole_drop = sole_drop;
    model.feet.push_back(foot);
  }

  model.contact.normal_stiffness = spec.get_double("contact.normal_stiffness");
  model.contact.normal_damping = spec.get_double("contact.normal_damping");
  model.contact.tangential_stiffness =
      spec.get_double("contact.tangential_stiffness");
  model.contact.friction = spec.get_double("contact.friction");
  check_positive(model.contact.normal_stiffness, "contact.normal_stiffness");
  check_positive(model.contact.friction, "contact.friction");
  if (model.contact.normal_damping < 0.0 ||
      model.contact.tangential_stiffness < 0.0) {
    throw ConfigError("contact damping/tangential stiffness must be >= 0");
  }

  model.reference_posture.resize(model.num_joints());
  for (int j = 0; j < model.num_joints(); ++j) {
    const double s0 = spec.get_double("posture." + model.joints[j].name);
    if (s0 < model.joints[j].lb || s0 > model.joints[j].ub) {
      throw ConfigError("posture." + model.joints[j].name +
                        ": outside joint limits");
    }
    model.reference_posture[j] = s0;
  }

  model.actuation_delay = spec.get_double("actuation.delay", 0.0);
  if (model.actuation_delay < 0.0) {
    throw ConfigError("actuation.delay: must be >= 0");
  }
  model.integral_limit = spec.get_double("actuation.integral_limit", 0.5);
  if (model.integral_limit <= 0.0) {
    throw ConfigError("actuation.integral_limit: must be > 0");
  }

  if (spec.has("actuation.torque_limit")) {
    const auto lim = spec.get_doubles("actuation.torque_limit");
    if (static_cast<int>(lim.size()) != model.num_joints()) {
      throw ConfigError("actuation.torque_limit: expected one value per joint");
    }
    model.torque_limit = Eigen::Map<const Vector>(lim.data(), lim.size());
  }

  // ancestor chains
  model.ancestors.resize(model.num_links());
  for (int l = 1; l < model.num_links(); ++l) {
    const int j = l - 1;
    model.ancestors[l] = model.ancestors[model.joints[j].parent];
    model.ancestors[l].push_back(j);
  }

  // ground-collision probes: origin and tip of every non-foot link
  model.collision_points.resize(model.num_links());
  for (int l = 0; l < model.num_links(); ++l) {
    if (model.is_foot_link(l)) continue;
    model.collision_points[l] = {Vec2::Zero(), model.links[l].tip};
  }

  // standing pose: base z placing the lowest sole point on the ground
  model.standing_height = standing_base_height(model, model.reference_posture);

  return model;
}

RobotModel build_default_model() {
  return build_model(KeyValueFile::parse(default_model_config(), "<default>"));
}

KeyValueFile model_to_config(const RobotModel& model) {
  KeyValueFile kv;
  kv.set("model.name", model.name);
  kv.set_double("gravity", model.gravity);

  std::string names;
  for (const auto& link : model.links) names += link.name + " ";
  kv.set("links.order", names.substr(0, names.size() - 1));
  names.clear();
  for (const auto& joint : model.joints) names += joint.name + " ";
  kv.set("joints.order", names.substr(0, names.size() - 1));
  kv.set("feet.links", model.links[model.feet[0].link].name + " " +
                           model.links[model.feet[1].link].name);

  for (const auto& link : model.links) {
    const std::string base = "link." + link.name;
    kv.set_double(base + ".mass", link.mass);
    kv.set_double(base + ".inertia", link.inertia);
    kv.set_double(base + ".length", link.length);
    kv.set(base + ".com", format_double(link.com.x()) + " " +
                              format_double(link.com.y()));
    kv.set(base + ".tip", format_double(link.tip.x()) + " " +
                              format_double(link.tip.y()));
  }
  for (const auto& joint : model.joints) {
    const std::string base = "joint." + joint.name;
    kv.set(base + ".parent", model.links[joint.parent].name);
    kv.set(base + ".child", model.links[joint.child].name);
    kv.set(base + ".anchor", format_double(joint.anchor.x()) + " " +
                                 format_double(joint.anchor.y()));
    kv.set(base + ".limits",
           format_double(joint.lb) + " " + format_double(joint.ub));
    kv.set_double(base + ".velocity_limit", joint.velocity_limit);
    kv.set(base + ".pid", format_double(joint.kp) + " " +
                              format_double(joint.ki) + " " +
                              format_double(joint.kd));
  }
  for (int j = 0; j < model.num_joints(); ++j) {
    kv.set_double("posture." + model.joints[j].name,
                  model.reference_posture[j]);
  }
  kv.set_double("feet.heel", model.feet[0].heel);
  kv.set_double("feet.toe", model.feet[0].toe);
  kv.set_double("feet.sole_drop", model.feet[0].sole_drop);
  kv.set_double("contact.normal_stiffness", model.contact.normal_stiffness);
  kv.set_double("contact.normal_damping", model.contact.normal_damping);
  kv.set_double("contact.tangential_stiffness",
                model.contact.tangential_stiffness);
  kv.set_double("contact.friction", model.contact.friction);
  kv.set_double("actuation.delay", model.actuation_delay);
  kv.set_double("actuation.integral_limit", model.integral_limit);
  if (model.torque_limit.size() > 0) {
    std::string lim;
    for (int j = 0; j < model.torque_limit.size(); ++j) {
      lim += format_double(model.torque_limit[j]);
      if (j + 1 < model.torque_limit.size()) lim += " ";
    }
    kv.set("actuation.torque_limit", lim);
  }
  return kv;
}

}  // namespace pushrec
