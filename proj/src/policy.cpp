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

#include "pushrec/policy.hpp"

#include <cmath>
#include <numbers>

namespace pushrec {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

GaussianPolicyParams policy_init(const std::vector<int>& sizes, Rng& rng,
                                 double log_std_init) {
  GaussianPolicyParams params;
  // small initial mean output keeps early references smooth
  params.mean = mlp_init(sizes, rng, 0.01);
  params.log_std = Vector::Constant(sizes.back(), log_std_init);
  return params;
}

double gaussian_logprob(const Vector& mean, const Vector& log_std,
                        const Vector& action) {
  if (mean.size() != log_std.size() || mean.size() != action.size()) {
    throw ShapeError("gaussian_logprob: dimension mismatch");
  }
  double logprob = 0.0;
  for (int i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    logprob += -log_std[i] - kHalfLog2Pi - 0.5 * z * z;
  }
  return logprob;
}

Vector gaussian_logprob_batch(const Matrix& means, const Vector& log_std,
                              const Matrix& actions) {
  if (means.rows() != actions.rows() || means.cols() != actions.cols() ||
      means.cols() != log_std.size()) {
    throw ShapeError("gaussian_logprob_batch: dimension mismatch");
  }
  const Eigen::RowVectorXd inv_std =
      (-log_std.array()).exp().matrix().transpose();
  const Matrix z = (actions - means).array().rowwise() * inv_std.array();
  return (-0.5 * z.array().square()).rowwise().sum().matrix() -
         Vector::Constant(means.rows(),
                          log_std.sum() + means.cols() * kHalfLog2Pi);
}

Vector gaussian_sample(const Vector& mean, const Vector& log_std, Rng& rng) {
  Vector action(mean.size());
  for (int i = 0; i < mean.size(); ++i) {
    action[i] = mean[i] + std::exp(log_std[i]) * rng.normal();
  }
  return action;
}

double gaussian_entropy(const Vector& log_std) {
  return log_std.sum() + log_std.size() * (0.5 + kHalfLog2Pi);
}

Vector gaussian_kl_batch(const Matrix& old_means, const Vector& old_log_std,
                         const Matrix& new_means, const Vector& new_log_std) {
  if (old_means.rows() != new_means.rows() ||
      old_means.cols() != new_means.cols() ||
      old_log_std.size() != new_log_std.size()) {
    throw ShapeError("gaussian_kl_batch: dimension mismatch");
  }
  const Eigen::ArrayXd var_ratio =
      (2.0 * (old_log_std - new_log_std).array()).exp();
  const Eigen::RowVectorXd inv_new_var =
      (-2.0 * new_log_std.array()).exp().matrix().transpose();
  const Matrix diff = new_means - old_means;
  const Vector quad =
      (diff.array().square().rowwise() * inv_new_var.array())
          .rowwise()
          .sum()
          .matrix();
  const double constant =
      (new_log_std - old_log_std).sum() + 0.5 * var_ratio.sum() -
      0.5 * old_log_std.size();
  return 0.5 * quad + Vector::Constant(old_means.rows(), constant);
}

}  // namespace pushrec
