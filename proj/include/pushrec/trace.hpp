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

#ifndef PUSHREC_TRACE_HPP_
#define PUSHREC_TRACE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pushrec/env.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// Line-delimited episode trace. '#'-prefixed header lines carry the tool
// version, config hash, episode seed, the resolved episode model and
// environment configs (`#M`/`#E` key-value lines), and the initial state;
// each record line holds one control step:
//   s <idx> <t> | q ... | v ... | a ... | r <total> <weighted terms...>
//     <done> <failure> | e <angle> <magnitude> <duration> <link> ...
// Numbers round-trip doubles exactly.
struct TraceStep {
  int index = 0;
  double time = 0.0;
  Vector q;
  Vector nu;
  Vector action;
  double reward = 0.0;
  Vector term_weighted;
  bool done = false;
  bool failure = false;
  std::vector<ForceEvent> new_events;
};

struct TraceEpisode {
  std::string tool;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  KeyValueFile model_config;  // episode model, post randomization
  KeyValueFile env_config;    // resolved environment config
  Vector initial_q;
  Vector initial_nu;
  std::vector<TraceStep> steps;
};

class TraceWriter {
 public:
  // captures header information from a freshly reset environment
  explicit TraceWriter(const Environment& env, std::uint64_t config_hash);
  void record(const Environment& env, const Vector& action,
              const StepResult& result);
  void save(const std::string& path) const;
  const TraceEpisode& episode() const { return episode_; }

 private:
  TraceEpisode episode_;
};

TraceEpisode read_trace(const std::string& path);

std::string render_trace_summary(const TraceEpisode& episode);

struct VerifyResult {
  bool ok = true;
  int first_divergent_step = -1;
  std::string detail;
};

// re-simulates the recorded actions/events from the recorded initial state
// and compares state and reward step by step
VerifyResult verify_trace(const TraceEpisode& episode);

}  // namespace pushrec

#endif  // PUSHREC_TRACE_HPP_
