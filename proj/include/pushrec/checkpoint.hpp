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

#ifndef PUSHREC_CHECKPOINT_HPP_
#define PUSHREC_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "pushrec/agent.hpp"
#include "pushrec/observation.hpp"

namespace pushrec {

// Versioned binary layout (little-endian):
//   magic "PSHRCKPT", u32 version, u64 global_step, u64 config_hash,
//   policy mean layers (u32 count; per layer u32 rows, u32 cols,
//   row-major f64 weights, f64 biases), f64 log_std, value layers,
//   optimizer moments per parameter block, normalization bounds,
//   trainer RNG state (length-prefixed text).
// A human-readable `.meta` sidecar mirrors step count, config hash, and
// RNG state.
struct Checkpoint {
  std::uint32_t version = 1;
  std::uint64_t global_step = 0;
  std::uint64_t config_hash = 0;
  AgentParams agent;
  OptimizerState opt;
  NormalizationConfig norm;
  std::string trainer_rng;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);

// set `force` to skip the config-hash compatibility check
Checkpoint load_checkpoint(const std::string& path);
void check_checkpoint_hash(const Checkpoint& ck, std::uint64_t expected,
                           bool force);

}  // namespace pushrec

#endif  // PUSHREC_CHECKPOINT_HPP_
