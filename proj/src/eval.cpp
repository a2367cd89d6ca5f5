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

#include "pushrec/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include "pushrec/output.hpp"

namespace pushrec {

PolicyFn deterministic_policy(const AgentParams& agent) {
  return [&agent](const Observation& obs) {
    return mlp_forward(agent.policy.mean, obs.features);
  };
}

PolicyFn zero_policy(int action_size) {
  return [action_size](const Observation&) {
    return Vector(Vector::Zero(action_size));
  };
}

SweepConfig SweepConfig::defaults() {
  SweepConfig cfg;
  for (double m = 50.0; m <= 700.0 + 1.0e-9; m += 25.0) {
    cfg.magnitudes.push_back(m);
  }
  cfg.directions = {0.0, std::numbers::pi};
  return cfg;
}

SweepConfig SweepConfig::from_config(const KeyValueFile& kv) {
  SweepConfig cfg = defaults();
  if (kv.has("sweep.magnitudes")) cfg.magnitudes = kv.get_doubles("sweep.magnitudes");
  if (kv.has("sweep.directions")) cfg.directions = kv.get_doubles("sweep.directions");
  cfg.repetitions =
      static_cast<int>(kv.get_int("sweep.repetitions", cfg.repetitions));
  cfg.pose_sigma = kv.get_double("sweep.pose_sigma_deg", 2.0) *
                   0.017453292519943295;
  cfg.push_time = kv.get_double("sweep.push_time", cfg.push_time);
  cfg.push_duration = kv.get_double("sweep.push_duration", cfg.push_duration);
  cfg.success_horizon =
      kv.get_double("sweep.success_horizon", cfg.success_horizon);
  if (kv.has("sweep.friction")) {
    cfg.friction_override = kv.get_double("sweep.friction");
  }
  if (cfg.magnitudes.empty() || cfg.repetitions < 1) {
    throw ConfigError("sweep: need magnitudes and repetitions >= 1");
  }
  if (!std::is_sorted(cfg.magnitudes.begin(), cfg.magnitudes.end()) ||
      cfg.magnitudes.front() <= 0.0) {
    throw ConfigError("sweep.magnitudes: must be positive ascending");
  }
  return cfg;
}

EnduranceConfig EnduranceConfig::from_config(const KeyValueFile& kv) {
  EnduranceConfig cfg;
  if (kv.has("endurance.magnitudes")) {
    cfg.magnitudes = kv.get_doubles("endurance.magnitudes");
  }
  if (kv.has("endurance.durations")) {
    cfg.durations = kv.get_doubles("endurance.durations");
  }
  cfg.episodes =
      static_cast<int>(kv.get_int("endurance.episodes", cfg.episodes));
  cfg.episode_cap = kv.get_double("endurance.episode_cap", cfg.episode_cap);
  cfg.mean_period = kv.get_double("endurance.mean_period", cfg.mean_period);
  cfg.pose_sigma =
      kv.get_double("endurance.pose_sigma_deg", 2.0) * 0.017453292519943295;
  cfg.link = kv.get_string("endurance.link", cfg.link);
  if (cfg.episodes < 1) throw ConfigError("endurance.episodes: must be >= 1");
  if (cfg.episode_cap <= cfg.mean_period) {
    throw ConfigError("endurance.episode_cap: must exceed the mean period");
  }
  return cfg;
}

namespace {

// evaluation runs without domain randomization and with the training
// scheduler replaced by scripted or cell-configured forces
EnvConfig scenario_env_config(const EnvConfig& base, double pose_sigma,
                              double max_duration) {
  EnvConfig cfg = base;
  cfg.episode.max_duration = max_duration;
  cfg.episode.perturbation.enabled = false;
  cfg.episode.randomize = {false, false, false};
  cfg.episode.init.pos_sigma = pose_sigma;
  cfg.episode.init.vel_sigma = 0.0;
  return cfg;
}

struct RolloutOutcome {
  bool failed = false;
  double end_time = 0.0;
};

RolloutOutcome run_policy(Environment& env, const PolicyFn& policy,
                          double until, TraceWriter* trace) {
  RolloutOutcome out;
  while (env.time() < until - 1.0e-9) {
    const Vector action = policy(observe_current(env));
    const StepResult result = env.step(action);
    if (trace) trace->record(env, action, result);
    if (result.done) {
      out.failed = result.failure;
      break;
    }
  }
  out.end_time = env.time();
  return out;
}

}  // namespace

Observation observe_current(const Environment& env) {
  return observe(env.episode_model(), env.state(), env.config().norm);
}

EpisodeResult run_scenario(const PolicyFn& policy, const RobotModel& nominal,
                           const EnvConfig& cfg, const ScenarioScript& script,
                           std::uint64_t seed, double pose_sigma,
                           std::unique_ptr<TraceWriter>* trace_out,
                           std::uint64_t config_hash) {
  Environment env(nominal, scenario_env_config(cfg, pose_sigma,
                                               script.run_until),
                  seed);

  // stably-standing precondition: settle and require a quiet CoM before
  // the first scripted push; resample the pose noise on failure
  double settle_until = script.run_until;
  for (const ForceEvent& push : script.pushes) {
    settle_until = std::min(settle_until, push.start);
  }

  EpisodeResult result;
  std::unique_ptr<TraceWriter> trace;
  bool standing = false;
  const int max_tries = 10;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    result.seed = mix_seed(seed, attempt);
    env.reset_with_seed(result.seed);
    trace.reset();
    if (trace_out) {
      trace = std::make_unique<TraceWriter>(env, config_hash);
    }
    const RolloutOutcome settle =
        run_policy(env, policy, settle_until, trace.get());
    if (settle.failed) continue;
    standing = true;
    const CentroidalQuantities cq =
        centroidal(env.episode_model(), env.state().q, env.state().nu);
    if (cq.com_velocity.norm() < 0.05 || attempt + 1 == max_tries) break;
  }

  if (standing && !env.episode_over()) {
    for (const ForceEvent& push : script.pushes) env.inject_event(push);
    const RolloutOutcome outcome =
        run_policy(env, policy, script.run_until, trace.get());
    result.survived = !outcome.failed;
  } else {
    // no push phase left: the settle window covered the whole scenario
    result.survived = standing;
  }
  result.survival_time = env.time();

  // completed applications only
  for (const ForceEvent& event : env.events()) {
    if (event.start + event.duration <= result.survival_time + 1.0e-9) {
      result.forces_endured += 1;
    }
  }
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

SweepResult polar_sweep(const PolicyFn& policy, const RobotModel& nominal,
                        const EnvConfig& base_cfg, const SweepConfig& cfg,
                        std::uint64_t seed, int workers) {
  RobotModel model = nominal;
  if (cfg.friction_override) {
    model.contact.friction = *cfg.friction_override;
  }

  SweepResult result;
  result.friction = model.contact.friction;
  const int dirs = static_cast<int>(cfg.directions.size());
  const int mags = static_cast<int>(cfg.magnitudes.size());
  result.cells.resize(dirs * mags);

  struct Job {
    int cell;
    int rep;
  };
  std::vector<Job> jobs;
  for (int d = 0; d < dirs; ++d) {
    for (int m = 0; m < mags; ++m) {
      auto& cell = result.cells[d * mags + m];
      cell.direction = cfg.directions[d];
      cell.magnitude = cfg.magnitudes[m];
      cell.repetitions = cfg.repetitions;
      for (int r = 0; r < cfg.repetitions; ++r) {
        jobs.push_back({d * mags + m, r});
      }
    }
  }

  std::vector<std::uint8_t> outcomes(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto run_jobs = [&] {
    for (std::size_t j = next.fetch_add(1); j < jobs.size();
         j = next.fetch_add(1)) {
      const Job& job = jobs[j];
      const SweepCell& cell = result.cells[job.cell];
      ScenarioScript script;
      ForceEvent push;
      push.start = cfg.push_time;
      push.duration = cfg.push_duration;
      push.angle = cell.direction;
      push.magnitude = cell.magnitude;
      push.link = 0;  // base
      script.pushes = {push};
      script.run_until = cfg.push_time + cfg.success_horizon;
      // seed depends only on the cell key, not on scheduling
      const std::uint64_t episode_seed =
          mix_seed(seed, (static_cast<std::uint64_t>(job.cell) << 16) |
                             static_cast<std::uint64_t>(job.rep));
      const EpisodeResult outcome = run_scenario(
          policy, model, base_cfg, script, episode_seed, cfg.pose_sigma);
      outcomes[j] = outcome.survived ? 1 : 0;
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < std::max(1, workers); ++w) pool.emplace_back(run_jobs);
  for (auto& t : pool) t.join();

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    result.cells[jobs[j].cell].successes += outcomes[j];
  }
  return result;
}

double EnduranceCell::mean_endured() const {
  if (episodes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : episodes) sum += e.forces_endured;
  return sum / episodes.size();
}

double EnduranceCell::median_endured() const {
  if (episodes.empty()) return 0.0;
  std::vector<int> counts;
  for (const auto& e : episodes) counts.push_back(e.forces_endured);
  std::sort(counts.begin(), counts.end());
  const std::size_t n = counts.size();
  return n % 2 == 1 ? counts[n / 2]
                    : 0.5 * (counts[n / 2 - 1] + counts[n / 2]);
}

int EnduranceCell::max_endured() const {
  int best = 0;
  for (const auto& e : episodes) best = std::max(best, e.forces_endured);
  return best;
}

EnduranceResult endurance_eval(const PolicyFn& policy,
                               const RobotModel& nominal,
                               const EnvConfig& base_cfg,
                               const EnduranceConfig& cfg, std::uint64_t seed,
                               int workers) {
  nominal.link_index(cfg.link);  // validate before spawning workers

  EnduranceResult result;
  const int mags = static_cast<int>(cfg.magnitudes.size());
  const int durs = static_cast<int>(cfg.durations.size());
  result.cells.resize(mags * durs);

  struct Job {
    int cell;
    int episode;
  };
  std::vector<Job> jobs;
  for (int m = 0; m < mags; ++m) {
    for (int d = 0; d < durs; ++d) {
      auto& cell = result.cells[m * durs + d];
      cell.link = cfg.link;
      cell.magnitude = cfg.magnitudes[m];
      cell.duration = cfg.durations[d];
      cell.episodes.resize(cfg.episodes);
      for (int e = 0; e < cfg.episodes; ++e) {
        jobs.push_back({m * durs + d, e});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto run_jobs = [&] {
    for (std::size_t j = next.fetch_add(1); j < jobs.size();
         j = next.fetch_add(1)) {
      const Job& job = jobs[j];
      EnduranceCell& cell = result.cells[job.cell];

      EnvConfig env_cfg = base_cfg;
      env_cfg.episode.max_duration = cfg.episode_cap;
      env_cfg.episode.randomize = {false, false, false};
      env_cfg.episode.init.pos_sigma = cfg.pose_sigma;
      env_cfg.episode.init.vel_sigma = 0.0;
      env_cfg.episode.perturbation.enabled = true;
      env_cfg.episode.perturbation.magnitude = cell.magnitude;
      env_cfg.episode.perturbation.duration = cell.duration;
      env_cfg.episode.perturbation.mean_period = cfg.mean_period;
      env_cfg.episode.perturbation.link = cfg.link;

      Environment env(nominal, env_cfg, 0);
      const std::uint64_t episode_seed =
          mix_seed(seed, (static_cast<std::uint64_t>(job.cell) << 24) |
                             static_cast<std::uint64_t>(job.episode));
      env.reset_with_seed(episode_seed);

      EpisodeResult outcome;
      outcome.seed = episode_seed;
      bool failed = false;
      while (!env.episode_over()) {
        const Vector action = policy(observe_current(env));
        const StepResult res = env.step(action);
        if (res.done) {
          failed = res.failure;
          break;
        }
      }
      outcome.survived = !failed;
      outcome.survival_time = env.time();
      for (const ForceEvent& event : env.events()) {
        if (event.start + event.duration <= outcome.survival_time + 1.0e-9) {
          outcome.forces_endured += 1;
        }
      }
      cell.episodes[job.episode] = outcome;
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < std::max(1, workers); ++w) pool.emplace_back(run_jobs);
  for (auto& t : pool) t.join();
  return result;
}

std::string sweep_csv(const SweepResult& result, std::uint64_t config_hash,
                      std::uint64_t seed) {
  std::ostringstream out;
  out << output_header(config_hash, seed);
  out << "# protocol sweep\n";
  out << "# friction " << format_double(result.friction) << "\n";
  out << "direction_rad,magnitude_n,successes,repetitions,success_rate\n";
  for (const SweepCell& cell : result.cells) {
    out << format_double(cell.direction) << ',' << format_double(cell.magnitude)
        << ',' << cell.successes << ',' << cell.repetitions << ','
        << format_double(static_cast<double>(cell.successes) /
                         cell.repetitions)
        << "\n";
  }
  return out.str();
}

std::string endurance_csv(const EnduranceResult& result,
                          std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream out;
  out << output_header(config_hash, seed);
  out << "# protocol endurance\n";
  out << "link,magnitude_n,duration_s,episode,endured,survived,survival_s\n";
  for (const EnduranceCell& cell : result.cells) {
    for (std::size_t e = 0; e < cell.episodes.size(); ++e) {
      const EpisodeResult& ep = cell.episodes[e];
      out << cell.link << ',' << format_double(cell.magnitude) << ','
          << format_double(cell.duration) << ',' << e << ','
          << ep.forces_endured << ',' << (ep.survived ? 1 : 0) << ','
          << format_double(ep.survival_time) << "\n";
    }
    out << cell.link << ',' << format_double(cell.magnitude) << ','
        << format_double(cell.duration) << ",mean,"
        << format_double(cell.mean_endured()) << ",,\n";
    out << cell.link << ',' << format_double(cell.magnitude) << ','
        << format_double(cell.duration) << ",median,"
        << format_double(cell.median_endured()) << ",,\n";
    out << cell.link << ',' << format_double(cell.magnitude) << ','
        << format_double(cell.duration) << ",max," << cell.max_endured()
        << ",,\n";
  }
  return out.str();
}

}  // namespace pushrec
