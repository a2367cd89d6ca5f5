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

#ifndef PUSHREC_DYNAMICS_HPP_
#define PUSHREC_DYNAMICS_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "pushrec/model.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// Generalized coordinates q = (base x, base z, base pitch, joint angles).
// Generalized velocity nu matches q with the base linear part expressed in
// the base frame (body-fixed convention): world base velocity = R(pitch) v_b.

inline constexpr double kPhysicsDt = 1.0e-3;  // 1 kHz

struct ContactPoint {
  Vec2 position = Vec2::Zero();  // world
  Vec2 velocity = Vec2::Zero();
  double normal_force = 0.0;      // N, >= 0
  double tangential_force = 0.0;  // N, |f_t| <= mu f_n
  bool in_contact = false;        // penetration > 0
};

struct PidState {
  Vector integral;    // per-joint error integral
  Vector prev_error;  // per-joint error at the previous substep
};

struct TimedRefs {
  double release_time = 0.0;
  Vector refs;
};

struct SimState {
  Vector q;
  Vector nu;
  std::vector<ContactPoint> contacts;  // heel/toe per foot: Lh, Lt, Rh, Rt
  PidState pid;
  Vector active_refs;             // references currently tracked by the PIDs
  std::deque<TimedRefs> ref_queue;  // pending delayed references
  Vector last_torques;            // PID torques of the latest substep
  double sim_time = 0.0;
  std::int64_t substeps = 0;
};

// force applied at a point fixed on a link, expressed in world coordinates
struct ExternalForce {
  int link = 0;
  Vec2 point_local = Vec2::Zero();
  Vec2 force = Vec2::Zero();
};

// world-frame pose and velocity of every link
struct Kinematics {
  std::vector<Vec2> pos;      // link frame origins
  std::vector<double> angle;  // absolute link angles
  std::vector<Vec2> com;      // link CoM positions
  std::vector<Vec2> vel_origin;
  std::vector<Vec2> vel_com;
  std::vector<double> omega;
};

struct CentroidalQuantities {
  Vec2 com = Vec2::Zero();
  Vec2 com_velocity = Vec2::Zero();
  Vec2 linear_momentum = Vec2::Zero();   // kg m/s
  double angular_momentum = 0.0;         // about the CoM, kg m^2/s
};

struct SupportGeometry {
  std::array<bool, 2> in_contact = {false, false};
  std::array<bool, 2> cop_defined = {false, false};
  std::array<double, 2> cop_x = {0.0, 0.0};          // per-foot CoP
  std::array<double, 2> vertical_force = {0.0, 0.0};  // sum of normal forces
  std::array<double, 2> sole_center_x = {0.0, 0.0};
  double x_min = 0.0, x_max = 0.0;  // support interval over in-contact points
  bool any_contact = false;
};

Kinematics forward_kinematics(const RobotModel& model, const Vector& q,
                              const Vector& nu);
Kinematics forward_kinematics(const RobotModel& model, const Vector& q);

// velocity Jacobian of a world point attached to `link` (body-fixed base
// columns); point velocity = J nu
Matrix point_jacobian(const RobotModel& model, const Kinematics& kin, int link,
                      const Vec2& point_world);

Matrix mass_matrix(const RobotModel& model, const Vector& q);

// combined Coriolis/centrifugal and gravity term h(q, nu)
Vector bias_forces(const RobotModel& model, const Vector& q, const Vector& nu);

double kinetic_energy(const RobotModel& model, const Vector& q,
                      const Vector& nu);
double potential_energy(const RobotModel& model, const Vector& q);

CentroidalQuantities centroidal(const RobotModel& model, const Vector& q,
                                const Vector& nu);

// penalty contact forces at the heel/toe points of both feet
std::vector<ContactPoint> contact_forces(const RobotModel& model,
                                         const Vector& q, const Vector& nu);

SupportGeometry support_geometry(const SimState& state);

// PID torques for the active references; advances integral/derivative state
Vector pid_torques(const RobotModel& model, SimState& state, double dt);

// queue a reference vector for release once sim_time reaches release_time
void enqueue_references(SimState& state, const Vector& refs,
                        double release_time);

// one semi-implicit Euler substep at dt = 1 ms; throws DivergenceError if
// the state leaves the finite range
void step(const RobotModel& model, SimState& state, double dt,
          std::span<const ExternalForce> external = {});

// state factory with coherent PID/reference/contact fields
SimState make_state(const RobotModel& model, const Vector& q,
                    const Vector& nu);

// base height that puts the lowest sole point exactly on the ground
double standing_base_height(const RobotModel& model, const Vector& s);

// true if any collision probe of a non-foot link is below the ground plane
bool non_foot_ground_contact(const RobotModel& model, const Vector& q);

// world positions of the heel/toe points of each foot (Lh, Lt, Rh, Rt)
std::array<Vec2, 4> sole_points(const RobotModel& model,
                                const Kinematics& kin);

}  // namespace pushrec

#endif  // PUSHREC_DYNAMICS_HPP_
