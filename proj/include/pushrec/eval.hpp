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

#ifndef PUSHREC_EVAL_HPP_
#define PUSHREC_EVAL_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pushrec/agent.hpp"
#include "pushrec/env.hpp"
#include "pushrec/trace.hpp"

namespace pushrec {

using PolicyFn = std::function<Vector(const Observation&)>;

// evaluation acts on the mean, without exploration noise
PolicyFn deterministic_policy(const AgentParams& agent);
PolicyFn zero_policy(int action_size);

// observation of the environment's current state
Observation observe_current(const Environment& env);

struct SweepConfig {
  std::vector<double> magnitudes;  // N; default 50..700 step 25
  std::vector<double> directions;  // rad; default {0, pi}
  int repetitions = 5;
  double pose_sigma = 2.0 * 0.017453292519943295;  // rad
  double push_time = 3.0;        // s after episode start
  double push_duration = 0.2;    // s
  double success_horizon = 7.0;  // s after push onset
  std::optional<double> friction_override;

  static SweepConfig defaults();
  static SweepConfig from_config(const KeyValueFile& kv);
};

struct EnduranceConfig {
  std::vector<double> magnitudes = {100.0, 200.0, 300.0};  // N
  std::vector<double> durations = {0.1, 0.2, 0.3};         // s
  int episodes = 50;
  double episode_cap = 60.0;  // s
  double mean_period = 3.0;   // s
  double pose_sigma = 2.0 * 0.017453292519943295;  // rad, standing start
  std::string link = "pelvis";

  static EnduranceConfig from_config(const KeyValueFile& kv);
};

struct EpisodeResult {
  bool survived = false;
  double survival_time = 0.0;  // s
  int forces_endured = 0;      // completed applications before fall or cap
  std::uint64_t seed = 0;
};

struct ScenarioScript {
  std::vector<ForceEvent> pushes;  // absolute start times
  double run_until = 0.0;          // s
};

// stably-standing precondition, then the scripted pushes; success means no
// non-foot contact through the horizon
EpisodeResult run_scenario(const PolicyFn& policy, const RobotModel& nominal,
                           const EnvConfig& cfg, const ScenarioScript& script,
                           std::uint64_t seed, double pose_sigma,
                           std::unique_ptr<TraceWriter>* trace_out = nullptr,
                           std::uint64_t config_hash = 0);

struct SweepCell {
  double direction = 0.0;
  double magnitude = 0.0;
  int successes = 0;
  int repetitions = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // direction-major, magnitudes ascending
  double friction = 0.0;
};

SweepResult polar_sweep(const PolicyFn& policy, const RobotModel& nominal,
                        const EnvConfig& base_cfg, const SweepConfig& cfg,
                        std::uint64_t seed, int workers);

struct EnduranceCell {
  std::string link;
  double magnitude = 0.0;
  double duration = 0.0;
  std::vector<EpisodeResult> episodes;

  double mean_endured() const;
  double median_endured() const;
  int max_endured() const;
};

struct EnduranceResult {
  std::vector<EnduranceCell> cells;
};

EnduranceResult endurance_eval(const PolicyFn& policy,
                               const RobotModel& nominal,
                               const EnvConfig& base_cfg,
                               const EnduranceConfig& cfg, std::uint64_t seed,
                               int workers);

std::string sweep_csv(const SweepResult& result, std::uint64_t config_hash,
                      std::uint64_t seed);
std::string endurance_csv(const EnduranceResult& result,
                          std::uint64_t config_hash, std::uint64_t seed);

}  // namespace pushrec

#endif  // PUSHREC_EVAL_HPP_
