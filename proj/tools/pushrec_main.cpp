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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pushrec/checkpoint.hpp"
#include "pushrec/env.hpp"
#include "pushrec/eval.hpp"
#include "pushrec/keyvalue.hpp"
#include "pushrec/model.hpp"
#include "pushrec/output.hpp"
#include "pushrec/ppo.hpp"
#include "pushrec/svg.hpp"
#include "pushrec/trace.hpp"

namespace fs = std::filesystem;
using namespace pushrec;

namespace {

struct CommonOptions {
  std::string model_path;
  std::string env_path;
  std::string ppo_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: use the ppo config value
};

std::string default_out_dir() {
  const char* env = std::getenv("PUSHREC_OUT_DIR");
  return env && *env ? env : "out";
}

KeyValueFile layered_config(const std::string& defaults,
                            const std::string& path,
                            const std::string& origin) {
  KeyValueFile kv = KeyValueFile::parse(defaults, origin + " defaults");
  if (!path.empty()) kv.merge(KeyValueFile::load(path));
  return kv;
}

struct LoadedConfigs {
  KeyValueFile model_kv;
  KeyValueFile env_kv;
  KeyValueFile ppo_kv;
  RobotModel model;
  EnvConfig env;
  PpoConfig ppo;
  std::uint64_t hash = 0;  // model + env (observation/reward layout)
};

LoadedConfigs load_configs(const CommonOptions& opts) {
  LoadedConfigs out;
  out.model_kv = layered_config(default_model_config(), opts.model_path,
                                "model");
  out.env_kv = layered_config(default_env_config(), opts.env_path, "env");
  out.ppo_kv = layered_config(default_ppo_config(), opts.ppo_path, "ppo");
  out.model = build_model(out.model_kv);
  out.env = load_env_config(out.env_kv, out.model);
  out.ppo = load_ppo_config(out.ppo_kv);
  if (opts.workers > 0) out.ppo.workers = opts.workers;
  out.hash = fnv1a64(model_to_config(out.model).canonical() +
                     env_config_to_keyvalue(out.env).canonical());
  return out;
}

// prefer the config copies stored next to a checkpoint
void adopt_run_configs(CommonOptions& opts, const std::string& checkpoint) {
  const fs::path dir = fs::path(checkpoint).parent_path();
  if (opts.model_path.empty() && fs::exists(dir / "model.cfg")) {
    opts.model_path = (dir / "model.cfg").string();
  }
  if (opts.env_path.empty() && fs::exists(dir / "env.cfg")) {
    opts.env_path = (dir / "env.cfg").string();
  }
  if (opts.ppo_path.empty() && fs::exists(dir / "ppo.cfg")) {
    opts.ppo_path = (dir / "ppo.cfg").string();
  }
}

void keep_metrics_through(const std::string& path, int iteration) {
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (!line.empty() && std::isdigit(line[0])) {
      if (std::atoi(line.c_str()) > iteration) continue;
    }
    kept += line + "\n";
  }
  in.close();
  atomic_write_file(path, kept);
}

int cmd_train(const CommonOptions& opts, std::int64_t steps) {
  LoadedConfigs cfg = load_configs(opts);
  fs::create_directories(opts.out_dir);

  // the resolved configs define the run; store them beside the outputs
  atomic_write_file((fs::path(opts.out_dir) / "model.cfg").string(),
                    model_to_config(cfg.model).canonical());
  atomic_write_file((fs::path(opts.out_dir) / "env.cfg").string(),
                    env_config_to_keyvalue(cfg.env).canonical());
  atomic_write_file((fs::path(opts.out_dir) / "ppo.cfg").string(),
                    ppo_config_to_keyvalue(cfg.ppo).canonical());

  Trainer trainer(cfg.model, cfg.env, cfg.ppo, opts.seed);

  const std::string latest =
      (fs::path(opts.out_dir) / "checkpoint_latest.bin").string();
  if (fs::exists(latest)) {
    Checkpoint ck = load_checkpoint(latest);
    check_checkpoint_hash(ck, cfg.hash, false);
    trainer.restore(ck);
    std::cout << "resuming from " << latest << " at step "
              << trainer.global_steps() << "\n";
  }
  const std::string metrics_path =
      (fs::path(opts.out_dir) / "metrics.csv").string();
  keep_metrics_through(metrics_path, trainer.iteration());

  std::vector<std::string> term_names;
  for (const auto& t : cfg.env.reward.terms) term_names.push_back(t.name);
  MetricsLog metrics;
  metrics.open(metrics_path, term_names, cfg.hash, opts.seed);

  try {
    trainer.run(steps, opts.out_dir, cfg.hash, &metrics,
                [](const IterationStats& s) {
                  std::cout << "iter " << s.iteration << "  steps "
                            << s.global_steps << "  reward/step "
                            << s.mean_step_reward << "  episode "
                            << s.mean_episode_duration << " s  kl " << s.kl
                            << "  (" << s.wall_time << " s)\n";
                });
  } catch (const DivergenceError& e) {
    std::cerr << "training diverged: " << e.what()
              << "; last checkpoint kept\n";
    return 1;
  }
  std::cout << "done: " << trainer.global_steps() << " steps, checkpoints in "
            << opts.out_dir << "\n";
  return 0;
}

int cmd_eval_polar(CommonOptions opts, const std::string& checkpoint,
                   const std::string& sweep_path, double friction, bool force,
                   bool plot) {
  adopt_run_configs(opts, checkpoint);
  LoadedConfigs cfg = load_configs(opts);
  Checkpoint ck = load_checkpoint(checkpoint);
  check_checkpoint_hash(ck, cfg.hash, force);

  KeyValueFile sweep_kv;
  if (!sweep_path.empty()) sweep_kv = KeyValueFile::load(sweep_path);
  SweepConfig sweep = SweepConfig::from_config(sweep_kv);
  if (friction > 0.0) sweep.friction_override = friction;

  const int workers = opts.workers > 0 ? opts.workers : cfg.ppo.workers;
  const SweepResult result =
      polar_sweep(deterministic_policy(ck.agent), cfg.model, cfg.env, sweep,
                  opts.seed, workers);

  fs::create_directories(opts.out_dir);
  std::string name = "sweep";
  if (sweep.friction_override) {
    name += "_friction_" + format_double(*sweep.friction_override);
  }
  const std::string csv_path =
      (fs::path(opts.out_dir) / (name + ".csv")).string();
  atomic_write_file(csv_path, sweep_csv(result, cfg.hash, opts.seed));
  std::cout << "wrote " << csv_path << "\n";
  if (plot) {
    const std::string svg_path =
        (fs::path(opts.out_dir) / (name + ".svg")).string();
    atomic_write_file(svg_path, sweep_svg(result));
    std::cout << "wrote " << svg_path << "\n";
  }
  return 0;
}

int cmd_eval_endurance(CommonOptions opts, const std::string& checkpoint,
                       const std::string& endurance_path, int episodes,
                       const std::string& link, bool force, bool plot) {
  adopt_run_configs(opts, checkpoint);
  LoadedConfigs cfg = load_configs(opts);
  Checkpoint ck = load_checkpoint(checkpoint);
  check_checkpoint_hash(ck, cfg.hash, force);

  KeyValueFile endurance_kv;
  if (!endurance_path.empty()) endurance_kv = KeyValueFile::load(endurance_path);
  EnduranceConfig endurance = EnduranceConfig::from_config(endurance_kv);
  if (episodes > 0) endurance.episodes = episodes;
  if (!link.empty()) endurance.link = link;

  const int workers = opts.workers > 0 ? opts.workers : cfg.ppo.workers;
  const EnduranceResult result =
      endurance_eval(deterministic_policy(ck.agent), cfg.model, cfg.env,
                     endurance, opts.seed, workers);

  fs::create_directories(opts.out_dir);
  const std::string name = "endurance_" + endurance.link;
  const std::string csv_path =
      (fs::path(opts.out_dir) / (name + ".csv")).string();
  atomic_write_file(csv_path, endurance_csv(result, cfg.hash, opts.seed));
  std::cout << "wrote " << csv_path << "\n";
  if (plot) {
    const std::string svg_path =
        (fs::path(opts.out_dir) / (name + ".svg")).string();
    atomic_write_file(svg_path, endurance_svg(result));
    std::cout << "wrote " << svg_path << "\n";
  }
  return 0;
}

int cmd_replay(const std::string& trace_path, bool verify) {
  const TraceEpisode episode = read_trace(trace_path);
  std::cout << render_trace_summary(episode);
  if (verify) {
    const VerifyResult result = verify_trace(episode);
    if (result.ok) {
      std::cout << "verified, 0 mismatches\n";
    } else {
      std::cout << "verification failed at step " << result.first_divergent_step
                << ": " << result.detail << "\n";
      return 1;
    }
  }
  return 0;
}

int cmd_plot(const std::string& input, const std::string& output) {
  const std::string text = read_file(input);
  const std::string protocol = csv_protocol(text);
  std::string svg;
  if (protocol == "sweep") {
    svg = sweep_svg(parse_sweep_csv(text));
  } else if (protocol == "endurance") {
    svg = endurance_svg(parse_endurance_csv(text));
  } else {
    throw Error("unknown protocol in " + input +
                " (expected `# protocol sweep|endurance` header)");
  }
  atomic_write_file(output, svg);
  std::cout << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar biped push-recovery training and evaluation"};
  app.require_subcommand(1);

  CommonOptions opts;
  opts.out_dir = default_out_dir();
  app.add_option("--model", opts.model_path, "model config file");
  app.add_option("--env", opts.env_path, "environment config file");
  app.add_option("--ppo", opts.ppo_path, "PPO config file");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--seed", opts.seed, "base seed");
  app.add_option("--workers", opts.workers, "worker count override");

  auto* train = app.add_subcommand("train", "run PPO training");
  std::int64_t steps = 200000;
  train->add_option("--steps", steps, "total agent steps");

  auto* polar = app.add_subcommand("eval-polar", "deterministic force sweep");
  std::string checkpoint, sweep_path;
  double friction = 0.0;
  bool force = false, plot = false;
  polar->add_option("--checkpoint", checkpoint, "policy checkpoint")
      ->required();
  polar->add_option("--config", sweep_path, "sweep config file");
  polar->add_option("--friction", friction, "friction coefficient override");
  polar->add_flag("--force", force, "skip the config hash check");
  polar->add_flag("--plot", plot, "also render an SVG figure");

  auto* endurance =
      app.add_subcommand("eval-endurance", "random-force endurance");
  std::string endurance_path, link;
  int episodes = 0;
  endurance->add_option("--checkpoint", checkpoint, "policy checkpoint")
      ->required();
  endurance->add_option("--config", endurance_path, "endurance config file");
  endurance->add_option("--episodes", episodes, "episodes per cell override");
  endurance->add_option("--link", link, "target link (pelvis|torso|arm)");
  endurance->add_flag("--force", force, "skip the config hash check");
  endurance->add_flag("--plot", plot, "also render an SVG figure");

  auto* replay = app.add_subcommand("replay", "inspect or verify a trace");
  std::string trace_path;
  bool verify = false;
  replay->add_option("trace", trace_path, "trace file")->required();
  replay->add_flag("--verify", verify, "re-simulate and compare");

  auto* plot_cmd = app.add_subcommand("plot", "render a protocol CSV");
  std::string plot_input, plot_output;
  plot_cmd->add_option("--input", plot_input, "protocol CSV")->required();
  plot_cmd->add_option("--output", plot_output, "SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(opts, steps);
    if (polar->parsed()) {
      return cmd_eval_polar(opts, checkpoint, sweep_path, friction, force,
                            plot);
    }
    if (endurance->parsed()) {
      return cmd_eval_endurance(opts, checkpoint, endurance_path, episodes,
                                link, force, plot);
    }
    if (replay->parsed()) return cmd_replay(trace_path, verify);
    if (plot_cmd->parsed()) return cmd_plot(plot_input, plot_output);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
