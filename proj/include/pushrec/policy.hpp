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

#ifndef PUSHREC_POLICY_HPP_
#define PUSHREC_POLICY_HPP_

#include "pushrec/mlp.hpp"
#include "pushrec/rng.hpp"
#include "pushrec/types.hpp"

namespace pushrec {

// diagonal Gaussian policy: mean from the network, state-independent
// learnable log standard deviations
struct GaussianPolicyParams {
  MlpParams mean;
  Vector log_std;

  int action_size() const { return static_cast<int>(log_std.size()); }
};

GaussianPolicyParams policy_init(const std::vector<int>& sizes, Rng& rng,
                                 double log_std_init);

double gaussian_logprob(const Vector& mean, const Vector& log_std,
                        const Vector& action);

// one log-probability per batch row
Vector gaussian_logprob_batch(const Matrix& means, const Vector& log_std,
                              const Matrix& actions);

Vector gaussian_sample(const Vector& mean, const Vector& log_std, Rng& rng);

double gaussian_entropy(const Vector& log_std);

// exact KL(old || new) for diagonal Gaussians sharing batch log-stds
Vector gaussian_kl_batch(const Matrix& old_means, const Vector& old_log_std,
                         const Matrix& new_means, const Vector& new_log_std);

}  // namespace pushrec

#endif  // PUSHREC_POLICY_HPP_
