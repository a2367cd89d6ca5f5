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

#include "pushrec/adam.hpp"

#include <cmath>

namespace pushrec {

OptimizerState optimizer_init(const std::vector<ParamBlock>& params,
                              double rate) {
  OptimizerState opt;
  opt.rate = rate;
  for (const auto& block : params) {
    opt.first_moment.push_back(Vector::Zero(block.size()));
    opt.second_moment.push_back(Vector::Zero(block.size()));
  }
  return opt;
}

void optimizer_step(OptimizerState& opt, std::vector<ParamBlock>& params,
                    const std::vector<ConstParamBlock>& gradients) {
  if (params.size() != gradients.size() ||
      params.size() != opt.first_moment.size()) {
    throw ShapeError("optimizer_step: block count mismatch");
  }
  opt.step += 1;
  const double correction1 = 1.0 - std::pow(opt.beta1, opt.step);
  const double correction2 = 1.0 - std::pow(opt.beta2, opt.step);
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != gradients[b].size()) {
      throw ShapeError("optimizer_step: block size mismatch");
    }
    Vector& m = opt.first_moment[b];
    Vector& v = opt.second_moment[b];
    m = opt.beta1 * m + (1.0 - opt.beta1) * gradients[b];
    v = opt.beta2 * v.array().matrix() +
        (1.0 - opt.beta2) * gradients[b].array().square().matrix();
    params[b].array() -=
        opt.rate * (m.array() / correction1) /
        ((v.array() / correction2).sqrt() + opt.stabilizer);
  }
}

}  // namespace pushrec
