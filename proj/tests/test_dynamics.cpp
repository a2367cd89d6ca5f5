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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pushrec/dynamics.hpp"
#include "pushrec/model.hpp"
#include "pushrec/rng.hpp"

using namespace pushrec;

namespace {

RobotModel default_model() { return build_default_model(); }

Vector random_q(const RobotModel& model, Rng& rng, double scale = 1.0) {
  Vector q(model.dof());
  q[0] = rng.uniform(-scale, scale);
  q[1] = rng.uniform(0.3, 0.3 + scale);
  q[2] = rng.uniform(-scale, scale);
  for (int j = 0; j < model.num_joints(); ++j) {
    q[3 + j] = rng.uniform(model.joints[j].lb, model.joints[j].ub);
  }
  return q;
}

Vector random_nu(const RobotModel& model, Rng& rng, double scale = 2.0) {
  Vector nu(model.dof());
  for (int i = 0; i < model.dof(); ++i) nu[i] = rng.uniform(-scale, scale);
  return nu;
}

Vector coordinate_rates(const Vector& q, const Vector& nu) {
  Vector qdot = nu;
  qdot.head(2) = rotation2(q[2]) * nu.head(2);
  return qdot;
}

// independent per-link velocity oracle: hand-rolled pose/velocity
// propagation, no Jacobians
struct LinkMotion {
  Vec2 com_velocity;
  double omega;
};

std::vector<LinkMotion> link_motion_oracle(const RobotModel& model,
                                           const Vector& q,
                                           const Vector& nu) {
  const int nl = model.num_links();
  std::vector<Vec2> pos(nl), vel(nl);
  std::vector<double> ang(nl), omega(nl);
  pos[0] = Vec2(q[0], q[1]);
  ang[0] = q[2];
  vel[0] = rotation2(q[2]) * Vec2(nu[0], nu[1]);
  omega[0] = nu[2];
  for (int j = 0; j < model.num_joints(); ++j) {
    const int p = model.joints[j].parent, c = model.joints[j].child;
    const Vec2 arm = rotation2(ang[p]) * model.joints[j].anchor;
    pos[c] = pos[p] + arm;
    vel[c] = vel[p] + omega[p] * Vec2(-arm.y(), arm.x());
    ang[c] = ang[p] + q[3 + j];
    omega[c] = omega[p] + nu[3 + j];
  }
  std::vector<LinkMotion> out(nl);
  for (int l = 0; l < nl; ++l) {
    const Vec2 arm = rotation2(ang[l]) * model.links[l].com;
    out[l].com_velocity = vel[l] + omega[l] * Vec2(-arm.y(), arm.x());
    out[l].omega = omega[l];
  }
  return out;
}

double per_link_energy(const RobotModel& model, const Vector& q,
                       const Vector& nu) {
  const auto motion = link_motion_oracle(model, q, nu);
  double energy = 0.0;
  for (int l = 0; l < model.num_links(); ++l) {
    energy += 0.5 * model.links[l].mass * motion[l].com_velocity.squaredNorm() +
              0.5 * model.links[l].inertia * motion[l].omega * motion[l].omega;
  }
  return energy;
}

// double pendulum hanging from a block so heavy that its pivot is
// effectively inertial; contact holds the block on the ground
RobotModel pendulum_model() {
  const std::string cfg = R"(
model.name = anchored-double-pendulum
gravity = 9.81
links.order = pelvis foot_l foot_r rod1 rod2
joints.order = ankle_l ankle_r pivot1 pivot2
feet.links = foot_l foot_r
link.pelvis.mass = 20000.0
link.pelvis.inertia = 20000.0
link.pelvis.length = 1.2
link.pelvis.com = 0.0 0.3
link.pelvis.tip = 0.0 1.2
link.foot_l.mass = 5000.0
link.foot_l.inertia = 10000.0
link.foot_l.length = 1.0
link.foot_l.com = 0.0 -0.05
link.foot_l.tip = 0.5 -0.1
link.foot_r.mass = 5000.0
link.foot_r.inertia = 10000.0
link.foot_r.length = 1.0
link.foot_r.com = 0.0 -0.05
link.foot_r.tip = 0.5 -0.1
link.rod1.mass = 2.0
link.rod1.inertia = 0.0417
link.rod1.length = 0.5
link.rod1.com = 0.0 -0.25
link.rod1.tip = 0.0 -0.5
link.rod2.mass = 2.0
link.rod2.inertia = 0.0417
link.rod2.length = 0.5
link.rod2.com = 0.0 -0.25
link.rod2.tip = 0.0 -0.5
joint.ankle_l.parent = pelvis
joint.ankle_l.child = foot_l
joint.ankle_l.anchor = 0.0 0.0
joint.ankle_l.limits = -6.3 6.3
joint.ankle_l.velocity_limit = 50.0
joint.ankle_l.pid = 0 0 10000000.0
joint.ankle_r.parent = pelvis
joint.ankle_r.child = foot_r
joint.ankle_r.anchor = 0.0 0.0
joint.ankle_r.limits = -6.3 6.3
joint.ankle_r.velocity_limit = 50.0
joint.ankle_r.pid = 0 0 10000000.0
joint.pivot1.parent = pelvis
joint.pivot1.child = rod1
joint.pivot1.anchor = 0.0 1.2
joint.pivot1.limits = -6.3 6.3
joint.pivot1.velocity_limit = 50.0
joint.pivot1.pid = 0 0 0
joint.pivot2.parent = rod1
joint.pivot2.child = rod2
joint.pivot2.anchor = 0.0 -0.5
joint.pivot2.limits = -6.3 6.3
joint.pivot2.velocity_limit = 50.0
joint.pivot2.pid = 0 0 0
posture.ankle_l = 0.0
posture.ankle_r = 0.0
posture.pivot1 = 0.0
posture.pivot2 = 0.0
feet.heel = -0.5
feet.toe = 0.5
feet.sole_drop = 0.1
contact.normal_stiffness = 1e9
contact.normal_damping = 1e6
contact.tangential_stiffness = 1e6
contact.friction = 3.0
)";
  return build_model(KeyValueFile::parse(cfg, "pendulum"));
}

// single free body: one heavy link with massless ankle stubs
RobotModel single_body_model() {
  const std::string cfg = R"(
model.name = block
gravity = 9.81
links.order = pelvis foot_l foot_r
joints.order = ankle_l ankle_r
feet.links = foot_l foot_r
link.pelvis.mass = 10.0
link.pelvis.inertia = 0.5
link.pelvis.length = 0.2
link.pelvis.com = 0.0 0.0
link.pelvis.tip = 0.0 0.2
link.foot_l.mass = 1e-9
link.foot_l.inertia = 1e-12
link.foot_l.length = 0.2
link.foot_l.com = 0.0 0.0
link.foot_l.tip = 0.14 -0.04
link.foot_r.mass = 1e-9
link.foot_r.inertia = 1e-12
link.foot_r.length = 0.2
link.foot_r.com = 0.0 0.0
link.foot_r.tip = 0.14 -0.04
joint.ankle_l.parent = pelvis
joint.ankle_l.child = foot_l
joint.ankle_l.anchor = 0.0 0.0
joint.ankle_l.limits = -0.9 0.9
joint.ankle_l.velocity_limit = 12.0
joint.ankle_l.pid = 0 0 0
joint.ankle_r.parent = pelvis
joint.ankle_r.child = foot_r
joint.ankle_r.anchor = 0.0 0.0
joint.ankle_r.limits = -0.9 0.9
joint.ankle_r.velocity_limit = 12.0
joint.ankle_r.pid = 0 0 0
posture.ankle_l = 0.0
posture.ankle_r = 0.0
feet.heel = -0.06
feet.toe = 0.14
feet.sole_drop = 0.04
contact.normal_stiffness = 2e5
contact.normal_damping = 2e3
contact.tangential_stiffness = 1e3
contact.friction = 1.0
)";
  return build_model(KeyValueFile::parse(cfg, "block"));
}

}  // namespace

TEST_CASE("mass matrix of a lone rigid body is diag(m, m, I)") {
  const RobotModel model = single_body_model();
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector q = random_q(model, rng);
    const Matrix base = mass_matrix(model, q).topLeftCorner(3, 3);
    CHECK(base(0, 0) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(base(1, 1) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(base(2, 2) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(base(0, 1)) < 1e-9);
    CHECK(std::abs(base(0, 2)) < 1e-9);
    CHECK(std::abs(base(1, 2)) < 1e-9);
  }
}

TEST_CASE("mass matrix symmetry and positive definiteness") {
  const RobotModel model = default_model();
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector q = random_q(model, rng);
    const Matrix m = mass_matrix(model, q);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::LLT<Matrix> llt(m);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("kinetic energy matches the per-link oracle") {
  const RobotModel model = default_model();
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector q = random_q(model, rng);
    const Vector nu = random_nu(model, rng);
    const double energy = kinetic_energy(model, q, nu);
    const double oracle = per_link_energy(model, q, nu);
    CHECK(std::abs(energy - oracle) <= 1e-10 * std::max(1.0, oracle));
  }
  // cross-check the oracle itself against finite differences once
  const Vector q = random_q(model, rng);
  const Vector nu = random_nu(model, rng, 0.5);
  const double h = 1e-6;
  const Vector qdot = coordinate_rates(q, nu);
  const Kinematics above = forward_kinematics(model, q + h * qdot);
  const Kinematics below = forward_kinematics(model, q - h * qdot);
  const auto motion = link_motion_oracle(model, q, nu);
  for (int l = 0; l < model.num_links(); ++l) {
    const Vec2 fd = (above.com[l] - below.com[l]) / (2.0 * h);
    CHECK((fd - motion[l].com_velocity).norm() < 1e-7);
  }
}

TEST_CASE("bias forces: zero velocity leaves pure gravity") {
  const RobotModel model = default_model();
  Rng rng(13);
  const Vector zero = Vector::Zero(model.dof());
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q = random_q(model, rng);
    const Vector h = bias_forces(model, q, zero);

    // oracle: potential gradient mapped into the body-fixed convention
    const double eps = 1e-7;
    Vector grad(model.dof());
    for (int i = 0; i < model.dof(); ++i) {
      Vector qa = q, qb = q;
      qa[i] += eps;
      qb[i] -= eps;
      grad[i] = (potential_energy(model, qa) - potential_energy(model, qb)) /
                (2.0 * eps);
    }
    Vector expected = grad;
    expected.head(2) = rotation2(q[2]).transpose() * grad.head(2);
    CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("bias forces vanish at rest without gravity") {
  RobotModel model = default_model();
  model.gravity = 0.0;
  Rng rng(14);
  const Vector q = random_q(model, rng);
  const Vector h = bias_forces(model, q, Vector::Zero(model.dof()));
  CHECK(h.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("energy identity: nu' (Mdot - 2C) nu = 0") {
  const RobotModel model = default_model();
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector q = random_q(model, rng);
    const Vector nu = random_nu(model, rng, 0.3);

    const double h = 1e-5;
    const Vector qdot = coordinate_rates(q, nu);
    const Matrix m_dot =
        (mass_matrix(model, q + h * qdot) - mass_matrix(model, q - h * qdot)) /
        (2.0 * h);
    const Vector coriolis = bias_forces(model, q, nu) -
                            bias_forces(model, q, Vector::Zero(model.dof()));
    const double residual = nu.dot(m_dot * nu) - 2.0 * nu.dot(coriolis);
    CHECK(std::abs(residual) <= 1e-8 * std::max(1.0, nu.dot(m_dot * nu)));
  }
}

TEST_CASE("contact forces") {
  const RobotModel model = default_model();

  SUBCASE("no penetration, no force") {
    Vector q = Vector::Zero(model.dof());
    q[1] = model.standing_height + 0.01;
    q.segment(3, model.num_joints()) = model.reference_posture;
    for (const auto& c : contact_forces(model, q, Vector::Zero(model.dof()))) {
      CHECK_FALSE(c.in_contact);
      CHECK(c.normal_force == 0.0);
      CHECK(c.tangential_force == 0.0);
    }
  }

  SUBCASE("static penetration follows the spring law") {
    Vector q = Vector::Zero(model.dof());
    q[1] = model.standing_height - 0.001;
    q.segment(3, model.num_joints()) = model.reference_posture;
    for (const auto& c : contact_forces(model, q, Vector::Zero(model.dof()))) {
      CHECK(c.in_contact);
      CHECK(c.normal_force == doctest::Approx(200.0).epsilon(1e-9));
      CHECK(c.tangential_force == 0.0);
    }
  }

  SUBCASE("fast sliding saturates the Coulomb bound") {
    Vector q = Vector::Zero(model.dof());
    q[1] = model.standing_height - 0.001;
    q.segment(3, model.num_joints()) = model.reference_posture;
    Vector nu = Vector::Zero(model.dof());
    nu[0] = 3.0;
    for (const auto& c : contact_forces(model, q, nu)) {
      CHECK(std::abs(c.tangential_force) ==
            doctest::Approx(model.contact.friction * c.normal_force)
                .epsilon(1e-12));
      CHECK(c.tangential_force < 0.0);
    }
  }

  SUBCASE("force laws hold for arbitrary states") {
    Rng rng(16);
    for (int trial = 0; trial < 300; ++trial) {
      Vector q = random_q(model, rng);
      q[1] = rng.uniform(0.4, 0.8);
      const Vector nu = random_nu(model, rng, 3.0);
      for (const auto& c : contact_forces(model, q, nu)) {
        CHECK(c.normal_force >= 0.0);
        CHECK(std::abs(c.tangential_force) <=
              model.contact.friction * c.normal_force + 1e-12);
        if (c.position.y() >= 0.0) {
          CHECK(c.normal_force == 0.0);
          CHECK(c.tangential_force == 0.0);
        }
      }
    }
  }

  SUBCASE("integrated contacts respect the same bounds") {
    // forces stored by step() come from the implicit solve
    Rng rng(21);
    Vector q = Vector::Zero(model.dof());
    q[1] = model.standing_height + 0.03;
    q.segment(3, model.num_joints()) = model.reference_posture;
    Vector nu = random_nu(model, rng, 0.5);
    SimState state = make_state(model, q, nu);
    for (int k = 0; k < 1000; ++k) {
      step(model, state, kPhysicsDt);
      for (const auto& c : state.contacts) {
        CHECK(c.normal_force >= 0.0);
        CHECK(std::abs(c.tangential_force) <=
              model.contact.friction * c.normal_force + 1e-9);
        if (!c.in_contact) CHECK(c.normal_force == 0.0);
      }
    }
  }
}

TEST_CASE("pid torques") {
  RobotModel model = default_model();

  SUBCASE("zero error, zero torque") {
    Vector q = Vector::Zero(model.dof());
    q.segment(3, model.num_joints()) = model.reference_posture;
    SimState state = make_state(model, q, Vector::Zero(model.dof()));
    const Vector torques = pid_torques(model, state, kPhysicsDt);
    CHECK(torques.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("pure proportional term") {
    for (auto& j : model.joints) {
      j.kp = 100.0;
      j.ki = 0.0;
      j.kd = 0.0;
    }
    Vector q = Vector::Zero(model.dof());
    q.segment(3, model.num_joints()) = model.reference_posture;
    SimState state = make_state(model, q, Vector::Zero(model.dof()));
    state.active_refs[0] += 0.1;
    state.pid.prev_error[0] = 0.1;
    const Vector torques = pid_torques(model, state, kPhysicsDt);
    CHECK(torques[0] == doctest::Approx(10.0).epsilon(1e-12));
  }

  SUBCASE("integral accumulates error times dt over substeps") {
    for (auto& j : model.joints) {
      j.kp = 0.0;
      j.ki = 50.0;
      j.kd = 0.0;
    }
    Vector q = Vector::Zero(model.dof());
    q.segment(3, model.num_joints()) = model.reference_posture;
    SimState state = make_state(model, q, Vector::Zero(model.dof()));
    state.active_refs[0] += 0.1;
    state.pid.prev_error[0] = 0.1;
    pid_torques(model, state, kPhysicsDt);
    const Vector torques = pid_torques(model, state, kPhysicsDt);
    CHECK(state.pid.integral[0] ==
          doctest::Approx(0.1 * 0.002).epsilon(1e-12));
    CHECK(torques[0] == doctest::Approx(50.0 * 0.1 * 0.002).epsilon(1e-12));
  }
}

TEST_CASE("step: constant-gravity free fall is exact") {
  RobotModel model = default_model();
  for (auto& j : model.joints) j.kp = j.ki = j.kd = 0.0;
  Vector q = Vector::Zero(model.dof());
  q[1] = 50.0;
  q.segment(3, model.num_joints()) = model.reference_posture;
  SimState state = make_state(model, q, Vector::Zero(model.dof()));
  const int steps = 200;
  for (int k = 0; k < steps; ++k) step(model, state, kPhysicsDt);
  CHECK(state.nu[1] ==
        doctest::Approx(-model.gravity * steps * kPhysicsDt).epsilon(1e-12));
  CHECK(std::abs(state.nu[0]) < 1e-12);
  CHECK(std::abs(state.nu[2]) < 1e-12);
}

TEST_CASE("step: zero gravity equilibrium is a fixed point") {
  RobotModel model = default_model();
  model.gravity = 0.0;
  Vector q = Vector::Zero(model.dof());
  q[1] = 1.0;
  q.segment(3, model.num_joints()) = model.reference_posture;
  SimState state = make_state(model, q, Vector::Zero(model.dof()));
  for (int k = 0; k < 100; ++k) step(model, state, kPhysicsDt);
  CHECK((state.q - q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(state.nu.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("passive double pendulum: energy drift under 2% over 10 s") {
  const RobotModel model = pendulum_model();
  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height;
  q[3 + 2] = 0.4;  // pivot1
  q[3 + 3] = 0.2;  // pivot2
  SimState state = make_state(model, q, Vector::Zero(model.dof()));
  // settle the anchor block for a moment before measuring
  for (int k = 0; k < 200; ++k) step(model, state, kPhysicsDt);
  const double e0 = kinetic_energy(model, state.q, state.nu) +
                    potential_energy(model, state.q);
  // energy scale: drop of the pendulum from the cocked pose to hanging
  Vector hanging = state.q;
  hanging[3 + 2] = 0.0;
  hanging[3 + 3] = 0.0;
  const double scale =
      potential_energy(model, state.q) - potential_energy(model, hanging);
  REQUIRE(scale > 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    step(model, state, kPhysicsDt);
    const double e = kinetic_energy(model, state.q, state.nu) +
                     potential_energy(model, state.q);
    worst = std::max(worst, std::abs(e - e0));
  }
  CHECK(worst <= 0.02 * scale);
}

TEST_CASE("free flight conserves momentum quantities") {
  RobotModel model = default_model();
  for (auto& j : model.joints) j.kp = j.ki = j.kd = 0.0;
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    Vector q = random_q(model, rng, 0.5);
    q[1] = 300.0;
    const Vector nu = random_nu(model, rng, 1.0);
    SimState state = make_state(model, q, nu);
    const CentroidalQuantities start = centroidal(model, q, nu);
    for (int k = 0; k < 500; ++k) step(model, state, kPhysicsDt);
    const CentroidalQuantities end = centroidal(model, state.q, state.nu);

    const Vec2 ballistic =
        start.com_velocity + Vec2(0.0, -model.gravity * 0.5);
    CHECK((end.com_velocity - ballistic).norm() <=
          1e-3 * std::max(1.0, ballistic.norm()));
    CHECK(std::abs(end.angular_momentum - start.angular_momentum) <=
          1e-3 * std::max(1.0, std::abs(start.angular_momentum)));
  }
}

TEST_CASE("centroidal quantities") {
  const RobotModel model = default_model();
  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height;
  q.segment(3, model.num_joints()) = model.reference_posture;

  SUBCASE("at rest everything vanishes") {
    const CentroidalQuantities cq =
        centroidal(model, q, Vector::Zero(model.dof()));
    CHECK(cq.linear_momentum.norm() == 0.0);
    CHECK(cq.angular_momentum == 0.0);
    CHECK(cq.com_velocity.norm() == 0.0);
  }

  SUBCASE("pure base translation carries m v and no spin") {
    Vector nu = Vector::Zero(model.dof());
    nu[0] = 0.7;
    const CentroidalQuantities cq = centroidal(model, q, nu);
    CHECK(cq.linear_momentum.x() ==
          doctest::Approx(model.total_mass * 0.7).epsilon(1e-12));
    CHECK(std::abs(cq.linear_momentum.y()) < 1e-12);
    CHECK(std::abs(cq.angular_momentum) < 1e-12);
    CHECK((cq.linear_momentum - model.total_mass * cq.com_velocity).norm() ==
          0.0);
  }
}

TEST_CASE("support geometry") {
  const RobotModel model = default_model();
  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height;
  q.segment(3, model.num_joints()) = model.reference_posture;
  SimState state = make_state(model, q, Vector::Zero(model.dof()));

  SUBCASE("equal heel and toe load puts the CoP at the midpoint") {
    state.contacts[0].normal_force = 80.0;
    state.contacts[0].in_contact = true;
    state.contacts[1].normal_force = 80.0;
    state.contacts[1].in_contact = true;
    const SupportGeometry geom = support_geometry(state);
    CHECK(geom.cop_defined[0]);
    CHECK(geom.cop_x[0] ==
          doctest::Approx(0.5 * (state.contacts[0].position.x() +
                                 state.contacts[1].position.x()))
              .epsilon(1e-12));
  }

  SUBCASE("toe-only contact puts the CoP at the toe") {
    state.contacts[1].normal_force = 120.0;
    state.contacts[1].in_contact = true;
    const SupportGeometry geom = support_geometry(state);
    CHECK(geom.cop_x[0] ==
          doctest::Approx(state.contacts[1].position.x()).epsilon(1e-12));
    CHECK_FALSE(geom.cop_defined[1]);
    CHECK(geom.in_contact[0]);
    CHECK_FALSE(geom.in_contact[1]);
  }

  SUBCASE("static vertical forces sum to the weight within 1%") {
    SimState settled = make_state(model, q, Vector::Zero(model.dof()));
    for (int k = 0; k < 2000; ++k) step(model, settled, kPhysicsDt);
    const SupportGeometry geom = support_geometry(settled);
    const double total = geom.vertical_force[0] + geom.vertical_force[1];
    CHECK(total ==
          doctest::Approx(model.total_mass * model.gravity).epsilon(0.01));
  }
}

TEST_CASE("step determinism is bit-exact") {
  const RobotModel model = default_model();
  Rng rng(18);
  Vector q = random_q(model, rng, 0.2);
  q[1] = model.standing_height + 0.02;
  const Vector nu = random_nu(model, rng, 0.5);

  auto run = [&] {
    SimState state = make_state(model, q, nu);
    enqueue_references(state, model.reference_posture, 0.010);
    for (int k = 0; k < 500; ++k) step(model, state, kPhysicsDt);
    return state;
  };
  const SimState a = run();
  const SimState b = run();
  CHECK(a.q == b.q);
  CHECK(a.nu == b.nu);
  CHECK(a.pid.integral == b.pid.integral);
  for (int i = 0; i < 4; ++i) {
    CHECK(a.contacts[i].normal_force == b.contacts[i].normal_force);
  }
}

TEST_CASE("actuation delay releases within one substep of its deadline") {
  const RobotModel model = default_model();
  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height + 1.0;
  q.segment(3, model.num_joints()) = model.reference_posture;

  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    SimState state = make_state(model, q, Vector::Zero(model.dof()));
    const double delay = rng.uniform(0.0, 0.020);
    Vector refs = state.active_refs;
    refs[1] += 0.3;
    const double enqueue_time = state.sim_time;
    enqueue_references(state, refs, enqueue_time + delay);

    double first_effect = -1.0;
    for (int k = 0; k < 60; ++k) {
      step(model, state, kPhysicsDt);
      if (first_effect < 0.0 && state.active_refs[1] == refs[1]) {
        // released at the start of the substep that just ran
        first_effect = state.sim_time - kPhysicsDt;
        break;
      }
    }
    REQUIRE(first_effect >= 0.0);
    CHECK(first_effect >= enqueue_time + delay - kPhysicsDt - 1e-9);
    CHECK(first_effect <= enqueue_time + delay + kPhysicsDt + 1e-9);
  }
}

TEST_CASE("non-foot ground contact predicate") {
  const RobotModel model = default_model();
  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height;
  q.segment(3, model.num_joints()) = model.reference_posture;
  CHECK_FALSE(non_foot_ground_contact(model, q));
  q[1] = 0.05;  // pelvis on the floor
  CHECK(non_foot_ground_contact(model, q));
}

TEST_CASE("state dimension checks") {
  const RobotModel model = default_model();
  CHECK(model.dof() == 11);
  CHECK_THROWS_AS(mass_matrix(model, Vector(Vector::Zero(5))), ShapeError);
  CHECK_THROWS_AS(
      bias_forces(model, Vector(Vector::Zero(11)), Vector(Vector::Zero(4))),
      ShapeError);
}
