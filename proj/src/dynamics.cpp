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

#include "pushrec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pushrec {

namespace {

void check_dims(const RobotModel& model, const Vector& q, const Vector& nu) {
  if (q.size() != model.dof() || nu.size() != model.dof()) {
    throw ShapeError("state dimension mismatch: expected " +
                     std::to_string(model.dof()));
  }
}

// columns of the point Jacobian for a point on `link`, written into a
// preallocated 2 x dof matrix
void fill_point_jacobian(const RobotModel& model, const Kinematics& kin,
                         int link, const Vec2& point, Matrix& jac) {
  jac.setZero();
  const Eigen::Matrix2d base_rot = rotation2(kin.angle[0]);
  jac.col(0) = base_rot.col(0);
  jac.col(1) = base_rot.col(1);
  jac.col(2) = zcross(point - kin.pos[0]);
  for (int j : model.ancestors[link]) {
    jac.col(3 + j) = zcross(point - kin.pos[j + 1]);
  }
}

}  // namespace

Kinematics forward_kinematics(const RobotModel& model, const Vector& q,
                              const Vector& nu) {
  check_dims(model, q, nu);
  const int nl = model.num_links();
  Kinematics kin;
  kin.pos.resize(nl);
  kin.angle.resize(nl);
  kin.com.resize(nl);
  kin.vel_origin.resize(nl);
  kin.vel_com.resize(nl);
  kin.omega.resize(nl);

  kin.pos[0] = Vec2(q[0], q[1]);
  kin.angle[0] = q[2];
  kin.vel_origin[0] = rotation2(q[2]) * Vec2(nu[0], nu[1]);
  kin.omega[0] = nu[2];

  for (int j = 0; j < model.num_joints(); ++j) {
    const JointSpec& joint = model.joints[j];
    const int p = joint.parent, c = joint.child;
    const Vec2 anchor_world =
        kin.pos[p] + rotation2(kin.angle[p]) * joint.anchor;
    kin.pos[c] = anchor_world;
    kin.angle[c] = kin.angle[p] + q[3 + j];
    kin.vel_origin[c] =
        kin.vel_origin[p] + kin.omega[p] * zcross(anchor_world - kin.pos[p]);
    kin.omega[c] = kin.omega[p] + nu[3 + j];
  }
  for (int l = 0; l < nl; ++l) {
    kin.com[l] = kin.pos[l] + rotation2(kin.angle[l]) * model.links[l].com;
    kin.vel_com[l] =
        kin.vel_origin[l] + kin.omega[l] * zcross(kin.com[l] - kin.pos[l]);
  }
  return kin;
}

Kinematics forward_kinematics(const RobotModel& model, const Vector& q) {
  return forward_kinematics(model, q, Vector::Zero(model.dof()));
}

Matrix point_jacobian(const RobotModel& model, const Kinematics& kin, int link,
                      const Vec2& point_world) {
  Matrix jac(2, model.dof());
  fill_point_jacobian(model, kin, link, point_world, jac);
  return jac;
}

Matrix mass_matrix(const RobotModel& model, const Vector& q) {
  const Kinematics kin = forward_kinematics(model, q);
  const int n = model.dof();
  Matrix mass = Matrix::Zero(n, n);
  Matrix jac(2, n);
  for (int l = 0; l < model.num_links(); ++l) {
    const LinkSpec& link = model.links[l];
    fill_point_jacobian(model, kin, l, kin.com[l], jac);
    mass.noalias() += link.mass * jac.transpose() * jac;
    // angular rows are 0/1 selectors over the ancestor chain
    mass(2, 2) += link.inertia;
    for (int a : model.ancestors[l]) {
      mass(2, 3 + a) += link.inertia;
      mass(3 + a, 2) += link.inertia;
      for (int b : model.ancestors[l]) {
        mass(3 + a, 3 + b) += link.inertia;
      }
    }
  }
  return mass;
}

Vector bias_forces(const RobotModel& model, const Vector& q,
                   const Vector& nu) {
  const Kinematics kin = forward_kinematics(model, q, nu);
  const int n = model.dof();
  const int nl = model.num_links();

  // link accelerations under zero generalized acceleration; all angular
  // accelerations vanish in the plane
  std::vector<Vec2> acc_origin(nl);
  acc_origin[0] = kin.omega[0] * zcross(kin.vel_origin[0]);
  for (int j = 0; j < model.num_joints(); ++j) {
    const int p = model.joints[j].parent, c = model.joints[j].child;
    acc_origin[c] = acc_origin[p] +
                    kin.omega[p] * zcross(kin.vel_origin[c] -
                                          kin.vel_origin[p]);
  }

  const Vec2 gravity_up(0.0, model.gravity);
  Vector h = Vector::Zero(n);
  Matrix jac(2, n);
  for (int l = 0; l < nl; ++l) {
    const Vec2 acc_com =
        acc_origin[l] +
        kin.omega[l] * zcross(kin.vel_com[l] - kin.vel_origin[l]);
    fill_point_jacobian(model, kin, l, kin.com[l], jac);
    h.noalias() +=
        jac.transpose() * (model.links[l].mass * (acc_com + gravity_up));
  }
  return h;
}

double kinetic_energy(const RobotModel& model, const Vector& q,
                      const Vector& nu) {
  return 0.5 * nu.dot(mass_matrix(model, q) * nu);
}

double potential_energy(const RobotModel& model, const Vector& q) {
  const Kinematics kin = forward_kinematics(model, q);
  double energy = 0.0;
  for (int l = 0; l < model.num_links(); ++l) {
    energy += model.links[l].mass * model.gravity * kin.com[l].y();
  }
  return energy;
}

CentroidalQuantities centroidal(const RobotModel& model, const Vector& q,
                                const Vector& nu) {
  const Kinematics kin = forward_kinematics(model, q, nu);
  CentroidalQuantities out;
  for (int l = 0; l < model.num_links(); ++l) {
    const double m = model.links[l].mass;
    out.com += m * kin.com[l];
    out.linear_momentum += m * kin.vel_com[l];
  }
  out.com /= model.total_mass;
  out.com_velocity = out.linear_momentum / model.total_mass;
  for (int l = 0; l < model.num_links(); ++l) {
    out.angular_momentum +=
        model.links[l].inertia * kin.omega[l] +
        model.links[l].mass *
            cross2(kin.com[l] - out.com, kin.vel_com[l]);
  }
  return out;
}

std::array<Vec2, 4> sole_points(const RobotModel& model,
                                const Kinematics& kin) {
  std::array<Vec2, 4> points;
  for (int f = 0; f < 2; ++f) {
    const FootGeometry& foot = model.feet[f];
    const Eigen::Matrix2d rot = rotation2(kin.angle[foot.link]);
    points[2 * f] =
        kin.pos[foot.link] + rot * Vec2(foot.heel, -foot.sole_drop);
    points[2 * f + 1] =
        kin.pos[foot.link] + rot * Vec2(foot.toe, -foot.sole_drop);
  }
  return points;
}

std::vector<ContactPoint> contact_forces(const RobotModel& model,
                                         const Vector& q, const Vector& nu) {
  const Kinematics kin = forward_kinematics(model, q, nu);
  const auto points = sole_points(model, kin);
  const ContactParams& cp = model.contact;

  std::vector<ContactPoint> out(4);
  for (int i = 0; i < 4; ++i) {
    const int foot_link = model.feet[i / 2].link;
    ContactPoint& c = out[i];
    c.position = points[i];
    c.velocity = kin.vel_origin[foot_link] +
                 kin.omega[foot_link] *
                     zcross(points[i] - kin.pos[foot_link]);
    const double depth = -c.position.y();
    c.in_contact = depth > 0.0;
    if (!c.in_contact) continue;
    const double depth_rate = -c.velocity.y();
    c.normal_force = std::max(
        0.0, cp.normal_stiffness * depth + cp.normal_damping * depth_rate);
    const double tangential = -cp.tangential_stiffness * c.velocity.x();
    const double limit = cp.friction * c.normal_force;
    c.tangential_force = std::clamp(tangential, -limit, limit);
  }
  return out;
}

SupportGeometry support_geometry(const SimState& state) {
  SupportGeometry geom;
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < 2; ++f) {
    const ContactPoint& heel = state.contacts[2 * f];
    const ContactPoint& toe = state.contacts[2 * f + 1];
    geom.sole_center_x[f] = 0.5 * (heel.position.x() + toe.position.x());
    geom.in_contact[f] = heel.in_contact || toe.in_contact;
    const double total = heel.normal_force + toe.normal_force;
    geom.vertical_force[f] = total;
    if (total > 0.0) {
      geom.cop_defined[f] = true;
      geom.cop_x[f] = (heel.normal_force * heel.position.x() +
                       toe.normal_force * toe.position.x()) /
                      total;
    }
    for (const ContactPoint* c : {&heel, &toe}) {
      if (c->in_contact) {
        x_min = std::min(x_min, c->position.x());
        x_max = std::max(x_max, c->position.x());
      }
    }
  }
  geom.any_contact = geom.in_contact[0] || geom.in_contact[1];
  if (geom.any_contact) {
    geom.x_min = x_min;
    geom.x_max = x_max;
  }
  return geom;
}

Vector pid_torques(const RobotModel& model, SimState& state, double dt) {
  const int nj = model.num_joints();
  Vector torques(nj);
  for (int j = 0; j < nj; ++j) {
    const JointSpec& joint = model.joints[j];
    const double error = state.active_refs[j] - state.q[3 + j];
    state.pid.integral[j] = std::clamp(state.pid.integral[j] + error * dt,
                                       -model.integral_limit,
                                       model.integral_limit);
    const double error_rate = (error - state.pid.prev_error[j]) / dt;
    state.pid.prev_error[j] = error;
    torques[j] =
        joint.kp * error + joint.ki * state.pid.integral[j] +
        joint.kd * error_rate;
    if (model.torque_limit.size() > 0) {
      torques[j] = std::clamp(torques[j], -model.torque_limit[j],
                              model.torque_limit[j]);
    }
  }
  return torques;
}

void enqueue_references(SimState& state, const Vector& refs,
                        double release_time) {
  TimedRefs entry{release_time, refs};
  auto it = std::upper_bound(
      state.ref_queue.begin(), state.ref_queue.end(), entry,
      [](const TimedRefs& a, const TimedRefs& b) {
        return a.release_time < b.release_time;
      });
  state.ref_queue.insert(it, std::move(entry));
}

namespace {

// switching the tracked reference must not produce a derivative kick: the
// PID derivative acts on the measurement, so the reference step is folded
// into the stored previous error
void release_references(SimState& state, double now) {
  while (!state.ref_queue.empty() &&
         state.ref_queue.front().release_time <= now + 1.0e-9) {
    const Vector& next = state.ref_queue.front().refs;
    state.pid.prev_error += next - state.active_refs;
    state.active_refs = next;
    state.ref_queue.pop_front();
  }
}

}  // namespace

void step(const RobotModel& model, SimState& state, double dt,
          std::span<const ExternalForce> external) {
  check_dims(model, state.q, state.nu);
  const int n = model.dof();
  const int nj = model.num_joints();
  const ContactParams& cp = model.contact;

  release_references(state, state.sim_time);

  // PID with the derivative acting on the measurement. The kd term is
  // integrated implicitly (joint damping on the velocity solve): explicit
  // rate feedback at 1 kHz is unstable for the light pelvis and foot
  // links. With a torque limit configured the textbook explicit form is
  // used instead so the clamp applies to the full torque.
  const bool explicit_pid = model.torque_limit.size() > 0;
  Vector torques(nj);
  if (explicit_pid) {
    torques = pid_torques(model, state, dt);
  } else {
    for (int j = 0; j < nj; ++j) {
      const double error = state.active_refs[j] - state.q[3 + j];
      state.pid.integral[j] = std::clamp(state.pid.integral[j] + error * dt,
                                         -model.integral_limit,
                                         model.integral_limit);
      state.pid.prev_error[j] = error;
      torques[j] = model.joints[j].kp * error +
                   model.joints[j].ki * state.pid.integral[j];
    }
  }

  const Kinematics kin = forward_kinematics(model, state.q, state.nu);
  const auto points = sole_points(model, kin);

  // contact damping is integrated implicitly in the velocity solve; the
  // explicit spring-damper of contact_forces is unstable for the light
  // foot-rocking mode at dt = 1 ms
  struct Probe {
    double depth = 0.0;
    Matrix jac;          // 2 x n at the contact point
    bool active = false;  // normal force > 0
    bool sticking = false;  // tangential damper below the Coulomb bound
    double normal = 0.0;
    double tangential = 0.0;
  };
  std::array<Probe, 4> probes;
  for (int i = 0; i < 4; ++i) {
    probes[i].depth = -points[i].y();
    probes[i].active = probes[i].depth > 0.0;
    probes[i].sticking = probes[i].active;
    if (probes[i].active) {
      probes[i].jac.resize(2, n);
      fill_point_jacobian(model, kin, model.feet[i / 2].link, points[i],
                          probes[i].jac);
    }
  }

  Vector applied = Vector::Zero(n);
  applied.segment(3, nj) = torques;
  Matrix jac(2, n);
  for (const ExternalForce& f : external) {
    const Vec2 point =
        kin.pos[f.link] + rotation2(kin.angle[f.link]) * f.point_local;
    fill_point_jacobian(model, kin, f.link, point, jac);
    applied.noalias() += jac.transpose() * f.force;
  }

  const Matrix mass = mass_matrix(model, state.q);
  const Vector bias = bias_forces(model, state.q, state.nu);
  const Vector momentum = mass * state.nu;

  Vector next_nu = state.nu;
  for (int pass = 0; pass < 10; ++pass) {
    Matrix lhs = mass;
    Vector rhs = momentum + dt * (applied - bias);
    if (!explicit_pid) {
      for (int j = 0; j < nj; ++j) {
        lhs(3 + j, 3 + j) += dt * model.joints[j].kd;
      }
    }
    for (const Probe& p : probes) {
      if (!p.active) continue;
      rhs.noalias() +=
          dt * cp.normal_stiffness * p.depth * p.jac.row(1).transpose();
      lhs.noalias() += dt * cp.normal_damping * p.jac.row(1).transpose() *
                       p.jac.row(1);
      if (p.sticking) {
        lhs.noalias() += dt * cp.tangential_stiffness *
                         p.jac.row(0).transpose() * p.jac.row(0);
      } else {
        rhs.noalias() += dt * p.tangential * p.jac.row(0).transpose();
      }
    }
    next_nu = lhs.ldlt().solve(rhs);

    bool consistent = true;
    for (Probe& p : probes) {
      if (p.depth <= 0.0) continue;
      const Vec2 velocity = p.jac * next_nu;
      const double normal =
          cp.normal_stiffness * p.depth - cp.normal_damping * velocity.y();
      if (p.active && normal < 0.0) {
        p.active = false;
        p.normal = p.tangential = 0.0;
        consistent = false;
        continue;
      }
      if (!p.active) continue;
      p.normal = std::max(0.0, normal);
      const double limit = cp.friction * p.normal;
      const double viscous = -cp.tangential_stiffness * velocity.x();
      if (p.sticking && std::abs(viscous) > limit) {
        p.sticking = false;
        p.tangential = std::clamp(viscous, -limit, limit);
        consistent = false;
      } else if (p.sticking) {
        p.tangential = viscous;
      } else {
        // saturated: keep the Coulomb bound aligned with the slip direction
        const double saturated = std::clamp(viscous, -limit, limit);
        if (std::abs(saturated - p.tangential) > 1.0e-9) {
          p.tangential = saturated;
          consistent = false;
        }
      }
    }
    if (consistent) break;
  }

  if (!explicit_pid) {
    for (int j = 0; j < nj; ++j) {
      torques[j] -= model.joints[j].kd * next_nu[3 + j];
    }
  }
  state.last_torques = torques;

  state.contacts.resize(4);
  for (int i = 0; i < 4; ++i) {
    ContactPoint& c = state.contacts[i];
    c.position = points[i];
    const int foot_link = model.feet[i / 2].link;
    c.velocity = kin.vel_origin[foot_link] +
                 kin.omega[foot_link] * zcross(points[i] - kin.pos[foot_link]);
    c.in_contact = probes[i].depth > 0.0;
    c.normal_force = probes[i].active ? probes[i].normal : 0.0;
    c.tangential_force = probes[i].active ? probes[i].tangential : 0.0;
  }

  // velocity first, then position with the updated velocity
  state.nu = next_nu;
  Vector qdot(n);
  qdot.head(2) = rotation2(state.q[2]) * state.nu.head(2);
  qdot.tail(n - 2) = state.nu.tail(n - 2);
  state.q += dt * qdot;

  state.substeps += 1;
  state.sim_time = static_cast<double>(state.substeps) * dt;

  if (!state.q.allFinite() || !state.nu.allFinite()) {
    throw DivergenceError("non-finite state after " +
                          std::to_string(state.substeps) + " substeps (t = " +
                          std::to_string(state.sim_time) + " s)");
  }
}

SimState make_state(const RobotModel& model, const Vector& q,
                    const Vector& nu) {
  check_dims(model, q, nu);
  SimState state;
  state.q = q;
  state.nu = nu;
  state.active_refs = q.segment(3, model.num_joints());
  state.pid.integral = Vector::Zero(model.num_joints());
  state.pid.prev_error = Vector::Zero(model.num_joints());
  state.last_torques = Vector::Zero(model.num_joints());
  state.contacts = contact_forces(model, q, nu);
  return state;
}

double standing_base_height(const RobotModel& model, const Vector& s) {
  Vector q = Vector::Zero(model.dof());
  q.segment(3, model.num_joints()) = s;
  const Kinematics kin = forward_kinematics(model, q);
  const auto points = sole_points(model, kin);
  double lowest = std::numeric_limits<double>::infinity();
  for (const Vec2& p : points) lowest = std::min(lowest, p.y());
  return -lowest;
}

bool non_foot_ground_contact(const RobotModel& model, const Vector& q) {
  const Kinematics kin = forward_kinematics(model, q);
  for (int l = 0; l < model.num_links(); ++l) {
    for (const Vec2& probe : model.collision_points[l]) {
      const Vec2 world = kin.pos[l] + rotation2(kin.angle[l]) * probe;
      if (world.y() < 0.0) return true;
    }
  }
  return false;
}

}  // namespace pushrec
