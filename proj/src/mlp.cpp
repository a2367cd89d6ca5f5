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

#include "pushrec/mlp.hpp"

#include <cmath>

namespace pushrec {

MlpParams mlp_init(const std::vector<int>& sizes, Rng& rng,
                   double output_scale) {
  if (sizes.size() < 2) throw ShapeError("mlp_init: need input and output");
  MlpParams params;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    if (in < 1 || out < 1) throw ShapeError("mlp_init: layer size < 1");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Matrix w(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
    if (l + 2 == sizes.size()) w *= output_scale;
    params.weights.push_back(std::move(w));
    params.biases.push_back(Vector::Zero(out));
  }
  return params;
}

MlpGrads mlp_zero_grads(const MlpParams& params) {
  MlpGrads grads;
  for (const auto& w : params.weights) {
    grads.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : params.biases) {
    grads.biases.push_back(Vector::Zero(b.size()));
  }
  return grads;
}

Matrix mlp_forward(const MlpParams& params, const Matrix& input,
                   MlpCache* cache) {
  if (input.cols() != params.input_size()) {
    throw ShapeError("mlp_forward: input has " + std::to_string(input.cols()) +
                     " features, expected " +
                     std::to_string(params.input_size()));
  }
  if (cache) {
    cache->input = input;
    cache->activations.clear();
  }
  Matrix activation = input;
  for (int l = 0; l < params.num_layers(); ++l) {
    Matrix z = activation * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    if (l + 1 < params.num_layers()) {
      activation = z.cwiseMax(0.0);
    } else {
      activation = std::move(z);
    }
    if (cache) cache->activations.push_back(activation);
  }
  return activation;
}

Vector mlp_forward(const MlpParams& params, const Vector& input) {
  const Matrix out = mlp_forward(params, Matrix(input.transpose()));
  return out.row(0);
}

Matrix mlp_backward(const MlpParams& params, const MlpCache& cache,
                    const Matrix& output_grad, MlpGrads& grads) {
  const int layers = params.num_layers();
  if (static_cast<int>(cache.activations.size()) != layers) {
    throw ShapeError("mlp_backward: cache does not match network");
  }
  if (output_grad.rows() != cache.input.rows() ||
      output_grad.cols() != params.output_size()) {
    throw ShapeError("mlp_backward: output gradient shape");
  }
  Matrix delta = output_grad;
  for (int l = layers - 1; l >= 0; --l) {
    if (l + 1 < layers) {
      // rectifier gate; a > 0 iff the pre-activation was positive
      delta = delta.cwiseProduct(
          (cache.activations[l].array() > 0.0).cast<double>().matrix());
    }
    const Matrix& below =
        l == 0 ? cache.input : cache.activations[l - 1];
    grads.weights[l].noalias() += delta.transpose() * below;
    grads.biases[l].noalias() += delta.colwise().sum().transpose();
    if (l > 0) delta = Matrix(delta * params.weights[l]);
  }
  return delta * params.weights[0];
}

}  // namespace pushrec
