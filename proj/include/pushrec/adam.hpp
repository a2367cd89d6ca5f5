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

#ifndef PUSHREC_ADAM_HPP_
#define PUSHREC_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "pushrec/types.hpp"

namespace pushrec {

// flat views over a parameter pack; update order is fixed by block order
using ParamBlock = Eigen::Map<Vector>;
using ConstParamBlock = Eigen::Map<const Vector>;

// bias-corrected adaptive moment estimation
struct OptimizerState {
  double rate = 1.0e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double stabilizer = 1.0e-8;
  std::int64_t step = 0;
  std::vector<Vector> first_moment;   // per block
  std::vector<Vector> second_moment;  // per block, >= 0
};

OptimizerState optimizer_init(const std::vector<ParamBlock>& params,
                              double rate);

void optimizer_step(OptimizerState& opt, std::vector<ParamBlock>& params,
                    const std::vector<ConstParamBlock>& gradients);

}  // namespace pushrec

#endif  // PUSHREC_ADAM_HPP_
