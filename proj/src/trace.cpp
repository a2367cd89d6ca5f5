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

#include "pushrec/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pushrec/output.hpp"

namespace pushrec {

namespace {

void append_vector(std::ostringstream& out, const Vector& v) {
  for (int i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
}

Vector parse_vector(std::istringstream& in, int count, int lineno) {
  Vector v(count);
  for (int i = 0; i < count; ++i) {
    if (!(in >> v[i])) {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": expected " + std::to_string(count) + " numbers");
    }
  }
  return v;
}

void expect_separator(std::istringstream& in, int lineno) {
  std::string tok;
  if (!(in >> tok) || tok != "|") {
    throw Error("trace parse error at line " + std::to_string(lineno) +
                ": expected `|`, got `" + tok + "`");
  }
}

}  // namespace

TraceWriter::TraceWriter(const Environment& env, std::uint64_t config_hash) {
  episode_.tool = kToolVersion;
  episode_.config_hash = config_hash;
  episode_.seed = env.episode_seed();
  episode_.model_config = model_to_config(env.episode_model());
  episode_.env_config = env_config_to_keyvalue(env.config());
  episode_.initial_q = env.initial_q();
  episode_.initial_nu = env.initial_nu();
}

void TraceWriter::record(const Environment& env, const Vector& action,
                         const StepResult& result) {
  TraceStep step;
  step.index = env.control_steps() - 1;
  step.time = env.time();
  step.q = env.state().q;
  step.nu = env.state().nu;
  step.action = action;
  step.reward = result.reward;
  step.term_weighted.resize(result.breakdown.terms.size());
  for (std::size_t k = 0; k < result.breakdown.terms.size(); ++k) {
    step.term_weighted[k] = result.breakdown.terms[k].weighted;
  }
  step.done = result.done;
  step.failure = result.failure;
  step.new_events = result.new_events;
  episode_.steps.push_back(std::move(step));
}

void TraceWriter::save(const std::string& path) const {
  std::ostringstream out;
  out << "# pushrec-trace 1\n";
  out << "# tool " << episode_.tool << "\n";
  out << "# config_hash " << hex64(episode_.config_hash) << "\n";
  out << "# seed " << episode_.seed << "\n";
  for (const auto& key : episode_.model_config.order()) {
    out << "#M " << key << " = " << episode_.model_config.get_string(key)
        << "\n";
  }
  for (const auto& key : episode_.env_config.order()) {
    out << "#E " << key << " = " << episode_.env_config.get_string(key)
        << "\n";
  }
  out << "#I q";
  append_vector(out, episode_.initial_q);
  out << "\n#I nu";
  append_vector(out, episode_.initial_nu);
  out << "\n";

  for (const TraceStep& step : episode_.steps) {
    out << "s " << step.index << ' ' << format_double(step.time) << " | q";
    append_vector(out, step.q);
    out << " | v";
    append_vector(out, step.nu);
    out << " | a";
    append_vector(out, step.action);
    out << " | r " << format_double(step.reward);
    append_vector(out, step.term_weighted);
    out << ' ' << (step.done ? 1 : 0) << ' ' << (step.failure ? 1 : 0);
    for (const ForceEvent& event : step.new_events) {
      out << " | e " << format_double(event.start) << ' '
          << format_double(event.duration) << ' '
          << format_double(event.angle) << ' '
          << format_double(event.magnitude) << ' ' << event.link;
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

TraceEpisode read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace: " + path);

  TraceEpisode episode;
  std::string model_text, env_text;
  std::string line;
  int lineno = 0;
  bool saw_magic = false;
  int expected_index = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string tag;
      hdr >> tag;
      if (lineno == 1) {
        if (tag != "pushrec-trace") {
          throw Error("trace parse error at line 1: not a pushrec trace");
        }
        saw_magic = true;
      } else if (tag == "tool") {
        std::getline(hdr, episode.tool);
      } else if (tag == "config_hash") {
        std::string hex;
        hdr >> hex;
        episode.config_hash = parse_hex64(hex);
      } else if (tag == "seed") {
        hdr >> episode.seed;
      } else if (tag == "M") {
        std::string rest;
        std::getline(hdr, rest);
        model_text += rest + "\n";
      } else if (tag == "E") {
        std::string rest;
        std::getline(hdr, rest);
        env_text += rest + "\n";
      } else if (tag == "I") {
        std::string which;
        hdr >> which;
        std::vector<double> values;
        double x;
        while (hdr >> x) values.push_back(x);
        Vector v = Eigen::Map<Vector>(values.data(), values.size());
        if (which == "q") {
          episode.initial_q = v;
        } else if (which == "nu") {
          episode.initial_nu = v;
        }
      }
      continue;
    }

    if (!saw_magic) {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": missing header");
    }
    std::istringstream rec(line);
    std::string tag;
    rec >> tag;
    if (tag != "s") {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": expected record tag `s`");
    }
    TraceStep step;
    if (!(rec >> step.index >> step.time)) {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": bad record prefix");
    }
    if (step.index != expected_index++) {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": non-contiguous step index");
    }
    const int dof = static_cast<int>(episode.initial_q.size());
    expect_separator(rec, lineno);
    std::string field;
    rec >> field;  // q
    step.q = parse_vector(rec, dof, lineno);
    expect_separator(rec, lineno);
    rec >> field;  // v
    step.nu = parse_vector(rec, dof, lineno);
    expect_separator(rec, lineno);
    rec >> field;  // a
    step.action = parse_vector(rec, dof - 3, lineno);
    expect_separator(rec, lineno);
    rec >> field;  // r
    if (!(rec >> step.reward)) {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": missing reward");
    }
    step.term_weighted = parse_vector(rec, kRewardTermCount, lineno);
    int done = 0, failure = 0;
    if (!(rec >> done >> failure)) {
      throw Error("trace parse error at line " + std::to_string(lineno) +
                  ": missing termination flags");
    }
    step.done = done != 0;
    step.failure = failure != 0;
    std::string sep;
    while (rec >> sep) {
      if (sep != "|") break;
      rec >> field;  // e
      ForceEvent event;
      if (!(rec >> event.start >> event.duration >> event.angle >>
            event.magnitude >> event.link)) {
        throw Error("trace parse error at line " + std::to_string(lineno) +
                    ": bad event");
      }
      step.new_events.push_back(event);
    }
    episode.steps.push_back(std::move(step));
  }
  if (!saw_magic) throw Error("trace parse error: empty file");
  if (episode.initial_q.size() == 0) {
    throw Error("trace parse error: missing initial state header");
  }
  episode.model_config = KeyValueFile::parse(model_text, path + "#M");
  episode.env_config = KeyValueFile::parse(env_text, path + "#E");
  return episode;
}

std::string render_trace_summary(const TraceEpisode& episode) {
  std::ostringstream out;
  out << "trace: seed " << episode.seed << ", config "
      << hex64(episode.config_hash) << ", " << episode.steps.size()
      << " steps\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%6s %8s %10s %8s %8s %6s %s\n", "step",
                "t [s]", "reward", "base x", "base z", "done", "events");
  out << buf;
  for (const TraceStep& step : episode.steps) {
    std::string events;
    for (const ForceEvent& e : step.new_events) {
      char ev[64];
      std::snprintf(ev, sizeof(ev), "push %.0fN@%.2frad ", e.magnitude,
                    e.angle);
      events += ev;
    }
    std::snprintf(buf, sizeof(buf), "%6d %8.3f %10.4f %8.4f %8.4f %6s %s\n",
                  step.index, step.time, step.reward, step.q[0], step.q[1],
                  step.done ? (step.failure ? "fail" : "trunc") : "",
                  events.c_str());
    out << buf;
  }
  return out.str();
}

VerifyResult verify_trace(const TraceEpisode& episode) {
  const RobotModel model = build_model(episode.model_config);
  const EnvConfig cfg = load_env_config(episode.env_config, model);
  Environment env(model, cfg, 0);
  env.reset_replay(model, episode.initial_q, episode.initial_nu);
  for (const TraceStep& step : episode.steps) {
    for (const ForceEvent& event : step.new_events) env.inject_event(event);
    const StepResult result = env.step(step.action);
    const SimState& state = env.state();
    if (state.q != step.q || state.nu != step.nu ||
        result.reward != step.reward) {
      VerifyResult out;
      out.ok = false;
      out.first_divergent_step = step.index;
      std::ostringstream detail;
      detail << "step " << step.index << ": ";
      if (state.q != step.q) {
        detail << "q mismatch (|dq| = " << (state.q - step.q).norm() << ")";
      } else if (state.nu != step.nu) {
        detail << "nu mismatch (|dnu| = " << (state.nu - step.nu).norm()
               << ")";
      } else {
        detail << "reward mismatch (" << result.reward << " vs "
               << step.reward << ")";
      }
      out.detail = detail.str();
      return out;
    }
    if (result.done != step.done) {
      return {false, step.index, "termination flag mismatch"};
    }
    if (result.done) break;
  }
  return {};
}

}  // namespace pushrec
