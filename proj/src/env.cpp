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

#include "pushrec/env.hpp"

#include <algorithm>
#include <cmath>

namespace pushrec {

namespace {
constexpr double kDegree = 0.017453292519943295;
}

std::string default_env_config() {
  return R"(# balancing / push-recovery environment
episode.max_duration = 15.0

perturbation.enabled = true
perturbation.magnitude = 200.0
perturbation.duration = 0.2
perturbation.mean_period = 5.0
perturbation.link = pelvis

randomize.mass = true
randomize.friction = true
randomize.delay = true

init.pos_sigma_deg = 10.0
init.vel_sigma_deg = 90.0

control.dt = 0.04
control.substeps = 40
control.action_limit = 3.14159265358979312

reward.epsilon = 0.01
reward.hull_margin = 0.025
)";
}

EnvConfig load_env_config(const KeyValueFile& kv, const RobotModel& nominal) {
  EnvConfig cfg;
  cfg.episode.max_duration =
      kv.get_double("episode.max_duration", cfg.episode.max_duration);
  if (cfg.episode.max_duration <= 0.0) {
    throw ConfigError("episode.max_duration: must be > 0");
  }

  PerturbationConfig& pert = cfg.episode.perturbation;
  pert.enabled = kv.get_bool("perturbation.enabled", pert.enabled);
  pert.magnitude = kv.get_double("perturbation.magnitude", pert.magnitude);
  pert.duration = kv.get_double("perturbation.duration", pert.duration);
  pert.mean_period =
      kv.get_double("perturbation.mean_period", pert.mean_period);
  pert.link = kv.get_string("perturbation.link", pert.link);
  if (pert.magnitude < 0.0 || pert.duration <= 0.0 || pert.mean_period <= 0.0) {
    throw ConfigError("perturbation: magnitude >= 0, duration/period > 0");
  }
  nominal.link_index(pert.link);  // validates the name

  cfg.episode.randomize.mass =
      kv.get_bool("randomize.mass", cfg.episode.randomize.mass);
  cfg.episode.randomize.friction =
      kv.get_bool("randomize.friction", cfg.episode.randomize.friction);
  cfg.episode.randomize.delay =
      kv.get_bool("randomize.delay", cfg.episode.randomize.delay);

  cfg.episode.init.pos_sigma =
      kv.get_double("init.pos_sigma_deg", 10.0) * kDegree;
  cfg.episode.init.vel_sigma =
      kv.get_double("init.vel_sigma_deg", 90.0) * kDegree;
  if (cfg.episode.init.pos_sigma < 0.0 || cfg.episode.init.vel_sigma < 0.0) {
    throw ConfigError("init sigmas must be >= 0");
  }

  cfg.control_dt = kv.get_double("control.dt", cfg.control_dt);
  cfg.substeps = static_cast<int>(kv.get_int("control.substeps", cfg.substeps));
  cfg.action_limit = kv.get_double("control.action_limit", cfg.action_limit);
  if (cfg.control_dt <= 0.0 || cfg.substeps < 1 || cfg.action_limit <= 0.0) {
    throw ConfigError("control: dt/substeps/action_limit must be positive");
  }

  const double nominal_weight = nominal.total_mass * nominal.gravity;
  cfg.norm = normalization_from_config(kv, nominal_weight);
  cfg.reward = reward_spec_from_config(kv, nominal_weight);
  return cfg;
}

KeyValueFile env_config_to_keyvalue(const EnvConfig& cfg) {
  KeyValueFile kv;
  kv.set_double("episode.max_duration", cfg.episode.max_duration);
  kv.set_bool("perturbation.enabled", cfg.episode.perturbation.enabled);
  kv.set_double("perturbation.magnitude", cfg.episode.perturbation.magnitude);
  kv.set_double("perturbation.duration", cfg.episode.perturbation.duration);
  kv.set_double("perturbation.mean_period",
                cfg.episode.perturbation.mean_period);
  kv.set("perturbation.link", cfg.episode.perturbation.link);
  kv.set_bool("randomize.mass", cfg.episode.randomize.mass);
  kv.set_bool("randomize.friction", cfg.episode.randomize.friction);
  kv.set_bool("randomize.delay", cfg.episode.randomize.delay);
  kv.set_double("init.pos_sigma_deg", cfg.episode.init.pos_sigma / kDegree);
  kv.set_double("init.vel_sigma_deg", cfg.episode.init.vel_sigma / kDegree);
  kv.set_double("control.dt", cfg.control_dt);
  kv.set_int("control.substeps", cfg.substeps);
  kv.set_double("control.action_limit", cfg.action_limit);

  kv.set_double("obs.joint_velocity_bound", cfg.norm.joint_velocity_bound);
  kv.set("obs.height_range", format_double(cfg.norm.height_lb) + " " +
                                 format_double(cfg.norm.height_ub));
  kv.set("obs.pitch_range", format_double(cfg.norm.pitch_lb) + " " +
                                format_double(cfg.norm.pitch_ub));
  kv.set_double("obs.cop_force_bound", cfg.norm.cop_force_ub);
  kv.set_double("obs.feet_position_bound", cfg.norm.feet_position_bound);
  kv.set_double("obs.com_velocity_bound", cfg.norm.com_velocity_bound);

  kv.set_double("reward.epsilon", cfg.reward.epsilon);
  kv.set_double("reward.hull_margin", cfg.reward.hull_margin);
  kv.set_double("reward.foot_force_target", cfg.reward.foot_force_target);
  for (const auto& t : cfg.reward.terms) {
    kv.set_double("reward." + t.name + ".weight", t.weight);
    kv.set_double("reward." + t.name + ".cutoff", t.cutoff);
    kv.set_bool("reward." + t.name + ".ss", t.in_ss);
    kv.set_bool("reward." + t.name + ".ds", t.in_ds);
  }
  return kv;
}

RobotModel randomize_domain(const RobotModel& nominal, Rng& rng,
                            const RandomizationConfig& cfg) {
  RobotModel model = nominal;
  if (cfg.mass) {
    model.total_mass = 0.0;
    for (auto& link : model.links) {
      const double nominal_mass = link.mass;
      const double sampled = rng.normal(nominal_mass, 0.2 * nominal_mass);
      link.mass = std::max(0.1 * nominal_mass, sampled);
      // keep the radius of gyration
      link.inertia *= link.mass / nominal_mass;
      model.total_mass += link.mass;
    }
  }
  if (cfg.friction) {
    model.contact.friction = rng.uniform(0.5, 3.0);
  }
  if (cfg.delay) {
    model.actuation_delay = rng.uniform(0.0, 0.020);
  }
  return model;
}

SimState sample_initial_state(const RobotModel& model, Rng& rng,
                              const InitialStateConfig& cfg) {
  const int nj = model.num_joints();
  Vector q = Vector::Zero(model.dof());
  Vector nu = Vector::Zero(model.dof());
  for (int j = 0; j < nj; ++j) {
    const JointSpec& joint = model.joints[j];
    q[3 + j] = std::clamp(
        rng.normal(model.reference_posture[j], cfg.pos_sigma), joint.lb,
        joint.ub);
  }
  for (int j = 0; j < nj; ++j) {
    const JointSpec& joint = model.joints[j];
    nu[3 + j] = std::clamp(rng.normal(0.0, cfg.vel_sigma),
                           -joint.velocity_limit, joint.velocity_limit);
  }
  // nominal standing pose; lifted when the sampled legs would penetrate,
  // airborne when they are shorter than the nominal stance
  q[1] = std::max(model.standing_height,
                  standing_base_height(model, q.segment(3, nj)));
  return make_state(model, q, nu);
}

std::optional<ForceEvent> schedule_perturbation(Rng& rng, double dt, double now,
                                                const PerturbationConfig& cfg,
                                                int link_index) {
  if (!cfg.enabled) return std::nullopt;
  if (rng.uniform() >= dt / cfg.mean_period) return std::nullopt;
  ForceEvent event;
  event.start = now;
  event.duration = cfg.duration;
  event.angle = rng.angle();
  event.magnitude = cfg.magnitude;
  event.link = link_index;
  return event;
}

Vector integrate_action(const Vector& action, const Vector& refs, double dt,
                        const RobotModel& model, double action_limit) {
  if (action.size() != model.num_joints()) {
    throw ShapeError("integrate_action: action size");
  }
  Vector next = refs;
  for (int j = 0; j < model.num_joints(); ++j) {
    const double rate = std::clamp(action[j], -action_limit, action_limit);
    next[j] = std::clamp(refs[j] + rate * dt, model.joints[j].lb,
                         model.joints[j].ub);
  }
  return next;
}

Environment::Environment(RobotModel nominal, EnvConfig cfg,
                         std::uint64_t base_seed)
    : nominal_(std::move(nominal)), model_(nominal_), cfg_(std::move(cfg)),
      base_seed_(base_seed) {
  perturbation_link_ = nominal_.link_index(cfg_.episode.perturbation.link);
}

Observation Environment::start_episode(const RobotModel& episode_model,
                                       const SimState& init, bool scheduler) {
  model_ = episode_model;
  state_ = init;
  command_refs_ = state_.q.segment(3, model_.num_joints());
  initial_q_ = state_.q;
  initial_nu_ = state_.nu;
  events_.clear();
  scheduler_on_ = scheduler;
  done_ = false;
  control_steps_ = 0;
  torque_buffer_.resize(cfg_.substeps, model_.num_joints());
  return observe(model_, state_, cfg_.norm);
}

Observation Environment::reset() {
  return reset_with_seed(mix_seed(base_seed_, episode_counter_++));
}

Observation Environment::reset_with_seed(std::uint64_t episode_seed) {
  episode_seed_ = episode_seed;
  rng_.seed(episode_seed);
  const RobotModel episode_model =
      randomize_domain(nominal_, rng_, cfg_.episode.randomize);
  const SimState init =
      sample_initial_state(episode_model, rng_, cfg_.episode.init);
  return start_episode(episode_model, init, true);
}

Observation Environment::reset_replay(const RobotModel& episode_model,
                                      const Vector& q0, const Vector& nu0) {
  episode_seed_ = 0;
  return start_episode(episode_model, make_state(episode_model, q0, nu0),
                       false);
}

void Environment::inject_event(const ForceEvent& event) {
  events_.push_back(event);
}

StepResult Environment::step(const Vector& action) {
  if (done_) throw Error("environment stepped after episode end");

  StepResult result;
  const SimState before = state_;

  command_refs_ = integrate_action(action, command_refs_, cfg_.control_dt,
                                   model_, cfg_.action_limit);
  enqueue_references(state_, command_refs_,
                     state_.sim_time + model_.actuation_delay);

  if (scheduler_on_) {
    const auto event =
        schedule_perturbation(rng_, cfg_.control_dt, state_.sim_time,
                              cfg_.episode.perturbation, perturbation_link_);
    if (event) events_.push_back(*event);
  }
  // every event, scheduled or injected, is reported by the control step
  // whose window contains its start
  const double window_begin = state_.sim_time;
  const double window_end = window_begin + cfg_.control_dt;
  for (const ForceEvent& event : events_) {
    if (event.start >= window_begin - 1.0e-9 &&
        event.start < window_end - 1.0e-9) {
      result.new_events.push_back(event);
    }
  }

  std::vector<ExternalForce> forces;
  for (int sub = 0; sub < cfg_.substeps; ++sub) {
    forces.clear();
    for (const ForceEvent& event : events_) {
      if (event.active_at(state_.sim_time) && event.magnitude != 0.0) {
        forces.push_back({event.link, Vec2::Zero(), event.force()});
      }
    }
    const SimState before_substep = state_;
    try {
      pushrec::step(model_, state_, kPhysicsDt, forces);
    } catch (const DivergenceError&) {
      state_ = before_substep;
      result.diverged = true;
      break;
    }
    torque_buffer_.row(sub) = state_.last_torques;
  }

  result.breakdown = compute_reward(model_, before, action, state_,
                                    torque_buffer_, cfg_.reward);
  result.obs = observe(model_, state_, cfg_.norm);
  ++control_steps_;

  if (result.diverged) {
    result.done = true;
    result.failure = true;
    result.reward = cfg_.reward.terms[kRewardLinksContact].weight;
  } else {
    result.reward = result.breakdown.total;
    if (result.breakdown.terminal_contact) {
      result.done = true;
      result.failure = true;
    } else if (state_.sim_time >= cfg_.episode.max_duration - 1.0e-9) {
      result.done = true;
      result.truncated = true;
    }
  }
  done_ = result.done;
  return result;
}

}  // namespace pushrec
