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

#ifndef PUSHREC_ENV_HPP_
#define PUSHREC_ENV_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pushrec/dynamics.hpp"
#include "pushrec/keyvalue.hpp"
#include "pushrec/model.hpp"
#include "pushrec/observation.hpp"
#include "pushrec/reward.hpp"
#include "pushrec/rng.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

struct PerturbationConfig {
  bool enabled = true;
  double magnitude = 200.0;   // N
  double duration = 0.2;      // s
  double mean_period = 5.0;   // s between applications, on average
  std::string link = "pelvis";
};

struct RandomizationConfig {
  bool mass = true;
  bool friction = true;
  bool delay = true;
};

struct InitialStateConfig {
  double pos_sigma = 10.0 * 0.017453292519943295;  // rad
  double vel_sigma = 90.0 * 0.017453292519943295;  // rad/s
};

struct EpisodeConfig {
  double max_duration = 15.0;  // s
  PerturbationConfig perturbation;
  RandomizationConfig randomize;
  InitialStateConfig init;
};

struct EnvConfig {
  EpisodeConfig episode;
  NormalizationConfig norm;
  RewardSpec reward;
  double control_dt = 0.04;   // 25 Hz
  int substeps = 40;          // physics substeps per control step
  double action_limit = 3.14159265358979312;  // rad/s (180 deg/s)
};

struct ForceEvent {
  double start = 0.0;     // s
  double duration = 0.0;  // s
  double angle = 0.0;     // planar direction, rad
  double magnitude = 0.0;  // N
  int link = 0;

  Vec2 force() const {
    return magnitude * Vec2(std::cos(angle), std::sin(angle));
  }
  bool active_at(double t) const {
    return t >= start && t < start + duration;
  }
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  bool failure = false;    // non-foot contact or divergence
  bool truncated = false;  // time limit
  bool diverged = false;
  RewardBreakdown breakdown;
  std::vector<ForceEvent> new_events;  // events that started this step
};

std::string default_env_config();
EnvConfig load_env_config(const KeyValueFile& kv, const RobotModel& nominal);
KeyValueFile env_config_to_keyvalue(const EnvConfig& cfg);

// per-episode physical-parameter sampling (masses, friction, delay)
RobotModel randomize_domain(const RobotModel& nominal, Rng& rng,
                            const RandomizationConfig& cfg);

// joint noise around the reference posture; base placed at the nominal
// standing height, lifted if the sampled legs would penetrate the ground
SimState sample_initial_state(const RobotModel& model, Rng& rng,
                              const InitialStateConfig& cfg);

// Bernoulli arrival with per-step probability dt / mean_period
std::optional<ForceEvent> schedule_perturbation(Rng& rng, double dt, double now,
                                                const PerturbationConfig& cfg,
                                                int link_index);

// clamp commanded velocities, integrate into position references
Vector integrate_action(const Vector& action, const Vector& refs, double dt,
                        const RobotModel& model, double action_limit);

// One rollout environment: 25 Hz control over 1 kHz physics. Each instance
// owns its RNG stream and is never shared between workers.
class Environment {
 public:
  Environment(RobotModel nominal, EnvConfig cfg, std::uint64_t base_seed);

  Observation reset();
  Observation reset_with_seed(std::uint64_t episode_seed);

  // replay support: fixed episode model and initial state, scheduler off
  Observation reset_replay(const RobotModel& episode_model, const Vector& q0,
                           const Vector& nu0);

  StepResult step(const Vector& action);

  // scripted force applications (evaluation protocols)
  void inject_event(const ForceEvent& event);

  const RobotModel& nominal_model() const { return nominal_; }
  const RobotModel& episode_model() const { return model_; }
  const EnvConfig& config() const { return cfg_; }
  const SimState& state() const { return state_; }
  const Vector& command_refs() const { return command_refs_; }
  const std::vector<ForceEvent>& events() const { return events_; }
  std::uint64_t episode_seed() const { return episode_seed_; }
  const Vector& initial_q() const { return initial_q_; }
  const Vector& initial_nu() const { return initial_nu_; }
  double time() const { return state_.sim_time; }
  int control_steps() const { return control_steps_; }
  bool episode_over() const { return done_; }
  int perturbation_link() const { return perturbation_link_; }

 private:
  Observation start_episode(const RobotModel& episode_model,
                            const SimState& init, bool scheduler);

  RobotModel nominal_;
  RobotModel model_;
  EnvConfig cfg_;
  std::uint64_t base_seed_ = 0;
  std::uint64_t episode_counter_ = 0;
  std::uint64_t episode_seed_ = 0;
  Rng rng_;
  int perturbation_link_ = 0;

  SimState state_;
  Vector command_refs_;  // integrator state, pre-delay
  Vector initial_q_, initial_nu_;
  std::vector<ForceEvent> events_;
  bool scheduler_on_ = true;
  bool done_ = true;
  int control_steps_ = 0;
  Matrix torque_buffer_;  // substeps x nj
};

}  // namespace pushrec

#endif  // PUSHREC_ENV_HPP_
