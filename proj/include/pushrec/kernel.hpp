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

#ifndef PUSHREC_KERNEL_HPP_
#define PUSHREC_KERNEL_HPP_

#include <cmath>

#include "pushrec/types.hpp"

namespace pushrec {

// bandwidth such that the kernel decays to epsilon at distance cutoff
inline double rbf_gamma(double cutoff, double epsilon) {
  return -std::log(epsilon) / (cutoff * cutoff);
}

// exp(-gamma ||x - target||^2), 1 at the target, epsilon at distance cutoff
inline double rbf_kernel(double distance, double cutoff, double epsilon) {
  return std::exp(-rbf_gamma(cutoff, epsilon) * distance * distance);
}

inline double rbf_kernel(const Vector& x, const Vector& target, double cutoff,
                         double epsilon) {
  if (x.size() != target.size()) {
    throw ShapeError("rbf_kernel: dimension mismatch");
  }
  return rbf_kernel((x - target).norm(), cutoff, epsilon);
}

// affine map of [lb, ub] onto [-1, 1], clamped outside
inline double normalize(double value, double lb, double ub) {
  const double unit = 2.0 * (value - lb) / (ub - lb) - 1.0;
  return std::clamp(unit, -1.0, 1.0);
}

}  // namespace pushrec

#endif  // PUSHREC_KERNEL_HPP_
