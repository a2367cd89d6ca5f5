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

#include "pushrec/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "pushrec/output.hpp"

namespace pushrec {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

constexpr char kMagic[8] = {'P', 'S', 'H', 'R', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void u32(std::uint32_t v) { raw(&v, sizeof(v)); }
  void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
  void f64(double v) { raw(&v, sizeof(v)); }
  void doubles(const double* data, std::size_t count) {
    raw(data, count * sizeof(double));
  }
  void text(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  std::string take() { return std::move(buffer_); }

 private:
  void raw(const void* data, std::size_t size) {
    buffer_.append(static_cast<const char*>(data), size);
  }
  std::string buffer_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  std::uint32_t u32() { return take<std::uint32_t>(); }
  std::uint64_t u64() { return take<std::uint64_t>(); }
  double f64() { return take<double>(); }
  void doubles(double* out, std::size_t count) {
    raw(out, count * sizeof(double));
  }
  std::string text() {
    const std::uint32_t len = u32();
    std::string s(len, '\0');
    raw(s.data(), len);
    return s;
  }

 private:
  template <typename T>
  T take() {
    T v;
    raw(&v, sizeof(v));
    return v;
  }
  void raw(void* out, std::size_t size) {
    if (pos_ + size > bytes_.size()) {
      throw Error("checkpoint truncated");
    }
    std::memcpy(out, bytes_.data() + pos_, size);
    pos_ += size;
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void write_mlp(Writer& w, const MlpParams& mlp) {
  w.u32(static_cast<std::uint32_t>(mlp.weights.size()));
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    const Matrix& wt = mlp.weights[l];
    w.u32(static_cast<std::uint32_t>(wt.rows()));
    w.u32(static_cast<std::uint32_t>(wt.cols()));
    // row-major on disk
    for (int r = 0; r < wt.rows(); ++r) {
      for (int c = 0; c < wt.cols(); ++c) w.f64(wt(r, c));
    }
    w.doubles(mlp.biases[l].data(), mlp.biases[l].size());
  }
}

MlpParams read_mlp(Reader& r) {
  MlpParams mlp;
  const std::uint32_t layers = r.u32();
  for (std::uint32_t l = 0; l < layers; ++l) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    Matrix wt(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) wt(i, j) = r.f64();
    }
    Vector b(rows);
    r.doubles(b.data(), rows);
    mlp.weights.push_back(std::move(wt));
    mlp.biases.push_back(std::move(b));
  }
  return mlp;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  Writer w;
  w.u64(std::bit_cast<std::uint64_t>(kMagic));
  w.u32(ck.version);
  w.u64(ck.global_step);
  w.u64(ck.config_hash);

  write_mlp(w, ck.agent.policy.mean);
  w.u32(static_cast<std::uint32_t>(ck.agent.policy.log_std.size()));
  w.doubles(ck.agent.policy.log_std.data(), ck.agent.policy.log_std.size());
  write_mlp(w, ck.agent.value);

  w.f64(ck.opt.rate);
  w.f64(ck.opt.beta1);
  w.f64(ck.opt.beta2);
  w.f64(ck.opt.stabilizer);
  w.u64(static_cast<std::uint64_t>(ck.opt.step));
  w.u32(static_cast<std::uint32_t>(ck.opt.first_moment.size()));
  for (std::size_t b = 0; b < ck.opt.first_moment.size(); ++b) {
    w.u32(static_cast<std::uint32_t>(ck.opt.first_moment[b].size()));
    w.doubles(ck.opt.first_moment[b].data(), ck.opt.first_moment[b].size());
    w.doubles(ck.opt.second_moment[b].data(), ck.opt.second_moment[b].size());
  }

  w.f64(ck.norm.joint_velocity_bound);
  w.f64(ck.norm.height_lb);
  w.f64(ck.norm.height_ub);
  w.f64(ck.norm.pitch_lb);
  w.f64(ck.norm.pitch_ub);
  w.f64(ck.norm.cop_force_ub);
  w.f64(ck.norm.feet_position_bound);
  w.f64(ck.norm.com_velocity_bound);

  w.text(ck.trainer_rng);
  atomic_write_file(path, w.take());

  std::ostringstream meta;
  meta << "checkpoint = " << path << "\n"
       << "tool = " << kToolVersion << "\n"
       << "version = " << ck.version << "\n"
       << "global_step = " << ck.global_step << "\n"
       << "config_hash = " << hex64(ck.config_hash) << "\n"
       << "optimizer_step = " << ck.opt.step << "\n"
       << "trainer_rng = " << ck.trainer_rng << "\n";
  atomic_write_file(path + ".meta", meta.str());
}

Checkpoint load_checkpoint(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw Error("checkpoint not found: " + path);
  }
  const std::string bytes = read_file(path);
  Reader r(bytes);
  if (r.u64() != std::bit_cast<std::uint64_t>(kMagic)) {
    throw Error("not a checkpoint file: " + path);
  }
  Checkpoint ck;
  ck.version = r.u32();
  if (ck.version != 1) {
    throw Error("unsupported checkpoint version " +
                std::to_string(ck.version));
  }
  ck.global_step = r.u64();
  ck.config_hash = r.u64();

  ck.agent.policy.mean = read_mlp(r);
  const std::uint32_t na = r.u32();
  ck.agent.policy.log_std.resize(na);
  r.doubles(ck.agent.policy.log_std.data(), na);
  ck.agent.value = read_mlp(r);

  ck.opt.rate = r.f64();
  ck.opt.beta1 = r.f64();
  ck.opt.beta2 = r.f64();
  ck.opt.stabilizer = r.f64();
  ck.opt.step = static_cast<std::int64_t>(r.u64());
  const std::uint32_t blocks = r.u32();
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const std::uint32_t len = r.u32();
    Vector m(len), v(len);
    r.doubles(m.data(), len);
    r.doubles(v.data(), len);
    ck.opt.first_moment.push_back(std::move(m));
    ck.opt.second_moment.push_back(std::move(v));
  }

  ck.norm.joint_velocity_bound = r.f64();
  ck.norm.height_lb = r.f64();
  ck.norm.height_ub = r.f64();
  ck.norm.pitch_lb = r.f64();
  ck.norm.pitch_ub = r.f64();
  ck.norm.cop_force_ub = r.f64();
  ck.norm.feet_position_bound = r.f64();
  ck.norm.com_velocity_bound = r.f64();

  ck.trainer_rng = r.text();
  return ck;
}

void check_checkpoint_hash(const Checkpoint& ck, std::uint64_t expected,
                           bool force) {
  if (ck.config_hash == expected || force) return;
  throw ConfigError("checkpoint config hash " + hex64(ck.config_hash) +
                    " does not match the loaded configs (" + hex64(expected) +
                    "); pass --force to override");
}

}  // namespace pushrec
