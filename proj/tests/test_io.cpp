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

#include <filesystem>

#include "pushrec/env.hpp"
#include "pushrec/output.hpp"
#include "pushrec/ppo.hpp"

using namespace pushrec;

TEST_CASE("atomic writes leave no temp files behind") {
  const std::string path = "/tmp/pushrec_test_atomic.txt";
  std::filesystem::remove(path);
  atomic_write_file(path, "payload\n");
  CHECK(read_file(path) == "payload\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("output headers carry version, config hash, and seed") {
  const std::string header = output_header(0xabcULL, 42);
  CHECK(header.find(kToolVersion) != std::string::npos);
  CHECK(header.find("config_hash 0000000000000abc") != std::string::npos);
  CHECK(header.find("seed 42") != std::string::npos);
}

TEST_CASE("hex64 round-trips") {
  for (std::uint64_t v : {0ULL, 1ULL, 0xdeadbeefULL, ~0ULL}) {
    CHECK(parse_hex64(hex64(v)) == v);
  }
}

TEST_CASE("env config round-trips through serialization") {
  const RobotModel model = build_default_model();
  const EnvConfig cfg =
      load_env_config(KeyValueFile::parse(default_env_config(), "d"), model);
  const KeyValueFile kv = env_config_to_keyvalue(cfg);
  const EnvConfig again = load_env_config(kv, model);
  CHECK(env_config_to_keyvalue(again).canonical() == kv.canonical());
  CHECK(again.reward.foot_force_target == cfg.reward.foot_force_target);
  CHECK(again.episode.perturbation.magnitude ==
        cfg.episode.perturbation.magnitude);
  CHECK(again.norm.cop_force_ub == cfg.norm.cop_force_ub);
}

TEST_CASE("ppo config round-trips and validates") {
  const PpoConfig cfg =
      load_ppo_config(KeyValueFile::parse(default_ppo_config(), "d"));
  CHECK(cfg.gamma == 0.95);
  CHECK(cfg.clip == 0.3);
  CHECK(cfg.learning_rate == 1e-4);
  CHECK(cfg.gae_lambda == 1.0);
  CHECK(cfg.batch_size == 10000);
  CHECK(cfg.minibatch_size == 512);
  CHECK(cfg.epochs == 32);
  CHECK(cfg.value_clip == 1000.0);
  CHECK(cfg.workers == 4);
  const KeyValueFile kv = ppo_config_to_keyvalue(cfg);
  const PpoConfig again = load_ppo_config(kv);
  CHECK(ppo_config_to_keyvalue(again).canonical() == kv.canonical());

  KeyValueFile bad = kv;
  bad.set_int("ppo.minibatch_size", 20000);
  CHECK_THROWS_AS(load_ppo_config(bad), ConfigError);
  bad = kv;
  bad.set_double("ppo.gamma", 1.5);
  CHECK_THROWS_AS(load_ppo_config(bad), ConfigError);
}

TEST_CASE("config hash is sensitive to observation-relevant changes") {
  const RobotModel model = build_default_model();
  const EnvConfig cfg =
      load_env_config(KeyValueFile::parse(default_env_config(), "d"), model);
  const auto hash_of = [&](const RobotModel& m, const EnvConfig& e) {
    return fnv1a64(model_to_config(m).canonical() +
                   env_config_to_keyvalue(e).canonical());
  };
  const std::uint64_t base = hash_of(model, cfg);
  CHECK(base == hash_of(model, cfg));

  EnvConfig wider = cfg;
  wider.norm.com_velocity_bound = 5.0;
  CHECK(hash_of(model, wider) != base);

  RobotModel heavier = model;
  heavier.links[1].mass += 1.0;
  heavier.total_mass += 1.0;
  CHECK(hash_of(heavier, cfg) != base);
}
