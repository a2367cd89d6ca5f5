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

#ifndef PUSHREC_MLP_HPP_
#define PUSHREC_MLP_HPP_

#include <vector>

#include "pushrec/rng.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// Fully connected network, rectifier hidden units, linear output.
// Batches are row-major: one sample per row.
struct MlpParams {
  std::vector<Matrix> weights;  // layer l: out_l x in_l
  std::vector<Vector> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_size() const { return static_cast<int>(weights.front().cols()); }
  int output_size() const { return static_cast<int>(weights.back().rows()); }
};

struct MlpCache {
  Matrix input;
  std::vector<Matrix> activations;  // post-activation output per layer
};

struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// scaled-uniform fan-in init; `output_scale` shrinks the final layer
MlpParams mlp_init(const std::vector<int>& sizes, Rng& rng,
                   double output_scale = 1.0);

MlpGrads mlp_zero_grads(const MlpParams& params);

Matrix mlp_forward(const MlpParams& params, const Matrix& input,
                   MlpCache* cache = nullptr);
Vector mlp_forward(const MlpParams& params, const Vector& input);

// reverse-mode gradients; accumulates into `grads`, returns input gradient
Matrix mlp_backward(const MlpParams& params, const MlpCache& cache,
                    const Matrix& output_grad, MlpGrads& grads);

}  // namespace pushrec

#endif  // PUSHREC_MLP_HPP_
