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

// Acceptance suite. Runs every criterion at its pinned tolerance and
// prints one pass/fail line each. `--only N` restricts to one criterion,
// `--list` enumerates them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pushrec/checkpoint.hpp"
#include "pushrec/env.hpp"
#include "pushrec/eval.hpp"
#include "pushrec/kernel.hpp"
#include "pushrec/mlp.hpp"
#include "pushrec/output.hpp"
#include "pushrec/ppo.hpp"
#include "pushrec/reward.hpp"
#include "pushrec/rng.hpp"

namespace fs = std::filesystem;
using namespace pushrec;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> run;
};

struct Context {
  RobotModel model = build_default_model();
  EnvConfig env_cfg;
  PpoConfig ppo_cfg;
  // balance-trained agent shared between criteria 7 and 8
  bool has_balance_checkpoint = false;
  Checkpoint balance_checkpoint;

  Context() {
    env_cfg = load_env_config(KeyValueFile::parse(default_env_config(), "d"),
                              model);
    ppo_cfg = load_ppo_config(KeyValueFile::parse(default_ppo_config(), "d"));
  }
};

Context* ctx = nullptr;

// ---------------------------------------------------------------- 1
bool rbf_kernel_exactness(std::string& detail) {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double cutoff = rng.uniform(1e-3, 50.0);
    const double epsilon = rng.uniform(1e-6, 0.5);
    Vector target(3), x(3);
    for (int i = 0; i < 3; ++i) target[i] = rng.uniform(-5.0, 5.0);
    if (rbf_kernel(target, target, cutoff, epsilon) != 1.0) return false;
    // a point at exactly the cutoff distance
    Vector direction(3);
    for (int i = 0; i < 3; ++i) direction[i] = rng.normal();
    direction.normalize();
    x = target + cutoff * direction;
    worst = std::max(
        worst, std::abs(rbf_kernel(x, target, cutoff, epsilon) - epsilon));
  }
  std::ostringstream out;
  out << "max |K(cutoff) - eps| = " << worst;
  detail = out.str();
  return worst <= 1e-12;
}

// ---------------------------------------------------------------- 2
bool dynamics_conservation(std::string& detail) {
  RobotModel model = ctx->model;
  for (auto& j : model.joints) j.kp = j.ki = j.kd = 0.0;

  // free flight: angular momentum about the CoM over 0.5 s
  Rng rng(102);
  double worst_momentum = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    Vector q = Vector::Zero(model.dof());
    q[1] = 300.0;
    q[2] = rng.uniform(-0.5, 0.5);
    for (int j = 0; j < model.num_joints(); ++j) {
      q[3 + j] = rng.uniform(model.joints[j].lb, model.joints[j].ub);
    }
    Vector nu(model.dof());
    for (int i = 0; i < model.dof(); ++i) nu[i] = rng.uniform(-1.0, 1.0);
    SimState state = make_state(model, q, nu);
    const double h0 = centroidal(model, q, nu).angular_momentum;
    for (int k = 0; k < 500; ++k) step(model, state, kPhysicsDt);
    const double h1 =
        centroidal(model, state.q, state.nu).angular_momentum;
    worst_momentum = std::max(
        worst_momentum, std::abs(h1 - h0) / std::max(1.0, std::abs(h0)));
  }

  // anchored passive double pendulum over 10 s
  const std::string pendulum_cfg = R"(
model.name = pendulum
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
joint.ankle_l.pid = 0 0 1e7
joint.ankle_r.parent = pelvis
joint.ankle_r.child = foot_r
joint.ankle_r.anchor = 0.0 0.0
joint.ankle_r.limits = -6.3 6.3
joint.ankle_r.velocity_limit = 50.0
joint.ankle_r.pid = 0 0 1e7
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
  const RobotModel pendulum =
      build_model(KeyValueFile::parse(pendulum_cfg, "pendulum"));
  Vector q = Vector::Zero(pendulum.dof());
  q[1] = pendulum.standing_height;
  q[3 + 2] = 0.4;
  q[3 + 3] = 0.2;
  SimState state = make_state(pendulum, q, Vector::Zero(pendulum.dof()));
  for (int k = 0; k < 200; ++k) step(pendulum, state, kPhysicsDt);
  const double e0 = kinetic_energy(pendulum, state.q, state.nu) +
                    potential_energy(pendulum, state.q);
  Vector hanging = state.q;
  hanging[3 + 2] = 0.0;
  hanging[3 + 3] = 0.0;
  const double scale =
      potential_energy(pendulum, state.q) - potential_energy(pendulum, hanging);
  double worst_energy = 0.0;
  for (int k = 0; k < 10000; ++k) {
    step(pendulum, state, kPhysicsDt);
    const double e = kinetic_energy(pendulum, state.q, state.nu) +
                     potential_energy(pendulum, state.q);
    worst_energy = std::max(worst_energy, std::abs(e - e0));
  }
  std::ostringstream out;
  out << "momentum drift " << worst_momentum << " (tol 1e-3), energy drift "
      << worst_energy / scale * 100.0 << "% (tol 2%)";
  detail = out.str();
  return worst_momentum <= 1e-3 && worst_energy <= 0.02 * scale;
}

// ---------------------------------------------------------------- 3
bool gradient_fidelity(std::string& detail) {
  Rng rng(103);
  double worst = 0.0;
  for (const std::vector<int> sizes :
       {std::vector<int>{28, 128, 64, 8}, std::vector<int>{28, 128, 64, 1}}) {
    MlpParams params = mlp_init(sizes, rng);
    const int batch = 16;
    Matrix input(batch, sizes.front()), projection(batch, sizes.back());
    for (int r = 0; r < batch; ++r) {
      for (int c = 0; c < sizes.front(); ++c) input(r, c) = rng.normal();
      for (int c = 0; c < sizes.back(); ++c) projection(r, c) = rng.normal();
    }
    MlpCache cache;
    mlp_forward(params, input, &cache);
    MlpGrads grads = mlp_zero_grads(params);
    mlp_backward(params, cache, projection, grads);

    const double h = 1e-5;
    for (int probe = 0; probe < 120; ++probe) {
      const int layer = static_cast<int>(rng.below(params.num_layers()));
      const int i =
          static_cast<int>(rng.below(params.weights[layer].size()));
      double* coeff = params.weights[layer].data() + i;
      const double analytic = grads.weights[layer].data()[i];
      const double saved = *coeff;
      *coeff = saved + h;
      const double above =
          (mlp_forward(params, input).cwiseProduct(projection)).sum();
      *coeff = saved - h;
      const double below =
          (mlp_forward(params, input).cwiseProduct(projection)).sum();
      *coeff = saved;
      const double numeric = (above - below) / (2.0 * h);
      const double scale =
          std::max({1e-8, std::abs(analytic), std::abs(numeric)});
      worst = std::max(worst, std::abs(analytic - numeric) / scale);
    }
  }
  std::ostringstream out;
  out << "max relative gradient error " << worst << " (tol 1e-4)";
  detail = out.str();
  return worst < 1e-4;
}

// ---------------------------------------------------------------- 4
bool gae_oracle(std::string& detail) {
  Rng rng(104);
  double worst = 0.0;
  for (int episode = 0; episode < 100; ++episode) {
    const int length = 1 + static_cast<int>(rng.below(60));
    const double gamma = rng.uniform(0.3, 0.999);
    TrajectoryBatch batch;
    batch.allocate(length, 1, 1, kRewardTermCount);
    batch.observations.setZero();
    batch.actions.setZero();
    batch.behavior_means.setZero();
    batch.behavior_log_std = Vector::Zero(1);
    for (int t = 0; t < length; ++t) {
      batch.rewards[t] = rng.uniform(-5.0, 5.0);
      batch.values[t] = 0.0;
    }
    batch.done[length - 1] = 1;
    compute_advantages(batch, gamma, 1.0);
    for (int t = 0; t < length; ++t) {
      double ret = 0.0, discount = 1.0;
      for (int k = t; k < length; ++k) {
        ret += discount * batch.rewards[k];
        discount *= gamma;
      }
      worst = std::max(worst, std::abs(batch.advantages[t] - ret));
    }
  }
  std::ostringstream out;
  out << "max |GAE - discounted return| = " << worst << " (tol 1e-10)";
  detail = out.str();
  return worst <= 1e-10;
}

// ---------------------------------------------------------------- 5
bool reward_composition(std::string& detail) {
  const RobotModel& model = ctx->model;
  const RewardSpec spec = ctx->env_cfg.reward;

  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height;
  q.segment(3, model.num_joints()) = model.reference_posture;
  SimState state = make_state(model, q, Vector::Zero(model.dof()));
  const double com_x =
      centroidal(model, q, Vector::Zero(model.dof())).com.x();
  for (int f = 0; f < 2; ++f) {
    state.contacts[2 * f].position = Vec2(com_x - 0.1, 0.0);
    state.contacts[2 * f + 1].position = Vec2(com_x + 0.1, 0.0);
    for (int p = 0; p < 2; ++p) {
      state.contacts[2 * f + p].in_contact = true;
      state.contacts[2 * f + p].normal_force = 0.5 * spec.foot_force_target;
      state.contacts[2 * f + p].tangential_force = 0.0;
    }
  }
  const RewardBreakdown at_target = compute_reward(
      model, state, Vector::Zero(8), state, Matrix::Zero(40, 8), spec);

  SimState fallen = state;
  fallen.q[1] = 0.05;
  const RewardBreakdown terminal = compute_reward(
      model, fallen, Vector::Zero(8), fallen, Matrix::Zero(40, 8), spec);

  std::ostringstream out;
  out << "at-target total " << at_target.total << " (want 88), terminal link "
      << "contribution " << terminal.terms[kRewardLinksContact].weighted
      << " (want -10)";
  detail = out.str();
  return std::abs(at_target.total - 88.0) <= 1e-9 &&
         terminal.terms[kRewardLinksContact].weighted == -10.0 &&
         terminal.terminal_contact;
}

// ---------------------------------------------------------------- 6
bool perturbation_impulse(std::string& detail) {
  const PerturbationConfig& pert = ctx->env_cfg.episode.perturbation;
  const double impulse =
      pert.magnitude * pert.duration / ctx->model.total_mass;
  std::ostringstream out;
  out << "impulse " << impulse << " Ns/kg (want 1.21 within 1%)";
  detail = out.str();
  return std::abs(impulse - 1.21) <= 0.01 * 1.21;
}

// ---------------------------------------------------------------- 7
struct TrainingCurve {
  std::vector<double> durations;
  std::vector<double> rewards;
};

TrainingCurve run_training(Trainer& trainer, std::int64_t steps) {
  TrainingCurve curve;
  while (trainer.global_steps() < steps) {
    TrajectoryBatch batch = trainer.collect();
    const IterationStats stats = trainer.update(batch);
    curve.durations.push_back(stats.mean_episode_duration);
    curve.rewards.push_back(stats.mean_step_reward);
    std::printf("      iter %3d  steps %8lld  reward/step %7.3f  episode "
                "%5.2f s  kl %.4f\n",
                stats.iteration,
                static_cast<long long>(stats.global_steps),
                stats.mean_step_reward, stats.mean_episode_duration,
                stats.kl);
    std::fflush(stdout);
  }
  return curve;
}

double mean_of(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) sum += xs[i];
  return sum / std::max<std::size_t>(1, hi - lo);
}

bool smoke_training(std::string& detail) {
  EnvConfig env_cfg = ctx->env_cfg;
  env_cfg.episode.perturbation.enabled = false;  // balance-only
  // randomization stays on

  Trainer trainer(ctx->model, env_cfg, ctx->ppo_cfg, 2026);
  const TrainingCurve curve = run_training(trainer, 200000);

  const std::size_t n = curve.durations.size();
  const std::size_t tenth = std::max<std::size_t>(1, n / 10);
  const std::size_t quart = std::max<std::size_t>(1, n / 4);
  const double first_duration = mean_of(curve.durations, 0, tenth);
  const double last_duration = mean_of(curve.durations, n - tenth, n);
  const double first_reward = mean_of(curve.rewards, 0, quart);
  const double last_reward = mean_of(curve.rewards, n - quart, n);

  ctx->balance_checkpoint = trainer.make_checkpoint(0);
  ctx->has_balance_checkpoint = true;

  std::ostringstream out;
  out << "episode duration " << first_duration << " -> " << last_duration
      << " s (need 3x), reward/step " << first_reward << " -> " << last_reward
      << " (need strict increase)";
  detail = out.str();
  return last_duration >= 3.0 * first_duration && last_reward > first_reward;
}

// ---------------------------------------------------------------- 8
bool push_recovery_smoke(std::string& detail) {
  // train the balance phase if criterion 7 did not run in this session
  if (!ctx->has_balance_checkpoint) {
    std::string ignored;
    std::printf("      (balance pre-training for criterion 8)\n");
    if (!smoke_training(ignored)) {
      detail = "balance pre-training failed: " + ignored;
      return false;
    }
  }

  // expected-flaky: up to two retries with fresh continuation seeds
  for (int attempt = 0; attempt < 3; ++attempt) {
    EnvConfig env_cfg = ctx->env_cfg;
    env_cfg.episode.perturbation.enabled = true;
    env_cfg.episode.perturbation.magnitude = 100.0;
    env_cfg.episode.perturbation.duration = 0.2;
    env_cfg.episode.perturbation.mean_period = 5.0;

    Trainer trainer(ctx->model, env_cfg, ctx->ppo_cfg, 3047 + attempt);
    trainer.restore(ctx->balance_checkpoint);
    const std::int64_t target = trainer.global_steps() + 300000;
    run_training(trainer, target);

    SweepConfig sweep;
    sweep.magnitudes = {50.0, 75.0, 100.0};
    sweep.directions = {0.0, std::numbers::pi};
    sweep.repetitions = 5;
    const SweepResult result =
        polar_sweep(deterministic_policy(trainer.agent()), ctx->model,
                    ctx->env_cfg, sweep, 4000 + attempt, 4);
    int successes = 0, total = 0;
    for (const auto& cell : result.cells) {
      successes += cell.successes;
      total += cell.repetitions;
    }
    const double rate = static_cast<double>(successes) / total;
    std::ostringstream out;
    out << "attempt " << attempt + 1 << ": sweep success " << successes << "/"
        << total << " = " << rate * 100.0 << "% (need 80%)";
    detail = out.str();
    std::printf("      %s\n", detail.c_str());
    if (rate >= 0.80) return true;
  }
  return false;
}

// ---------------------------------------------------------------- 9
bool determinism_pipeline(std::string& detail) {
  const std::string base = "/tmp/pushrec_acceptance_determinism";
  const auto run_pipeline = [&](const std::string& dir) {
    fs::remove_all(dir);
    const std::string sweep_cfg = dir + "_sweep.cfg";
    atomic_write_file(sweep_cfg,
                      "sweep.magnitudes = 60 120\n"
                      "sweep.directions = 0 3.14159265358979312\n"
                      "sweep.repetitions = 2\n"
                      "sweep.push_time = 1.0\n"
                      "sweep.success_horizon = 2.0\n");
    const std::string endurance_cfg = dir + "_endurance.cfg";
    atomic_write_file(endurance_cfg,
                      "endurance.magnitudes = 50\n"
                      "endurance.durations = 0.1\n"
                      "endurance.episode_cap = 6\n"
                      "endurance.mean_period = 2\n");
    std::string cmd = std::string(PUSHREC_BIN) + " --out " + dir +
                      " --seed 11 --workers 1 train --steps 20000 " +
                      "> /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return false;
    cmd = std::string(PUSHREC_BIN) + " --out " + dir + " --seed 11 " +
          "--workers 1 eval-polar --checkpoint " + dir +
          "/checkpoint_latest.bin --config " + sweep_cfg +
          " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return false;
    cmd = std::string(PUSHREC_BIN) + " --out " + dir + " --seed 11 " +
          "--workers 1 eval-endurance --checkpoint " + dir +
          "/checkpoint_latest.bin --config " + endurance_cfg +
          " --episodes 2 > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  if (!run_pipeline(base + "_a") || !run_pipeline(base + "_b")) {
    detail = "pipeline run failed";
    return false;
  }
  for (const std::string file :
       {std::string("/checkpoint_latest.bin"), std::string("/sweep.csv"),
        std::string("/endurance_pelvis.csv")}) {
    if (read_file(base + "_a" + file) != read_file(base + "_b" + file)) {
      detail = "byte mismatch in " + file;
      return false;
    }
  }
  detail = "checkpoints and eval CSVs byte-identical across runs";
  return true;
}

// ---------------------------------------------------------------- 10
bool protocol_fidelity(std::string& detail) {
  // grid arithmetic on the defaults
  SweepConfig sweep = SweepConfig::defaults();
  sweep.pose_sigma = 0.0;  // protocol bookkeeping with the zero policy
  if (sweep.magnitudes.size() != 27 || sweep.repetitions != 5) {
    detail = "default sweep grid is not 27 x 5";
    return false;
  }
  const SweepResult grid =
      polar_sweep(zero_policy(8), ctx->model, ctx->env_cfg, sweep, 7, 4);
  if (grid.cells.size() != sweep.directions.size() * 27) {
    detail = "sweep output cell count mismatch";
    return false;
  }
  for (const auto& cell : grid.cells) {
    if (cell.repetitions != 5) {
      detail = "sweep cell repetitions mismatch";
      return false;
    }
  }

  // zero-magnitude endurance: ~ cap / period = 20 scheduled applications
  EnduranceConfig endurance;
  endurance.magnitudes = {0.0};
  endurance.durations = {0.2};
  endurance.episodes = 50;
  endurance.episode_cap = 60.0;
  endurance.mean_period = 3.0;
  endurance.pose_sigma = 0.0;
  const EnduranceResult result = endurance_eval(
      zero_policy(8), ctx->model, ctx->env_cfg, endurance, 13, 4);
  const double mean = result.cells[0].mean_endured();
  std::ostringstream out;
  out << "sweep 2 x 27 x 5 complete; zero-magnitude endurance mean " << mean
      << " applications (want 20 within 15%)";
  detail = out.str();
  return std::abs(mean - 20.0) <= 0.15 * 20.0;
}

}  // namespace

int main(int argc, char** argv) {
  Context context;
  ctx = &context;

  std::vector<Criterion> criteria = {
      {1, "rbf-kernel-exactness", rbf_kernel_exactness},
      {2, "dynamics-conservation", dynamics_conservation},
      {3, "gradient-fidelity", gradient_fidelity},
      {4, "gae-oracle", gae_oracle},
      {5, "reward-composition", reward_composition},
      {6, "perturbation-impulse", perturbation_impulse},
      {7, "smoke-training", smoke_training},
      {8, "push-recovery-smoke", push_recovery_smoke},
      {9, "determinism-pipeline", determinism_pipeline},
      {10, "protocol-fidelity", protocol_fidelity},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    if (arg == "--list") {
      for (const auto& c : criteria) {
        std::printf("%2d %s\n", c.number, c.name.c_str());
      }
      return 0;
    }
  }

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] %2d. %-24s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL",
                criterion.number, criterion.name.c_str(), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
