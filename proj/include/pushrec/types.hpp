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

#ifndef PUSHREC_TYPES_HPP_
#define PUSHREC_TYPES_HPP_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pushrec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

// z x r in the plane (angular velocity cross product reduced to 2D)
inline Vec2 zcross(const Vec2& r) { return Vec2(-r.y(), r.x()); }

// planar cross product r x v (scalar z component)
inline double cross2(const Vec2& r, const Vec2& v) {
  return r.x() * v.y() - r.y() * v.x();
}

inline Eigen::Matrix2d rotation2(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  return rot;
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// a configuration value violates a documented invariant
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// tensor dimensions do not chain
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// simulation or optimization produced a non-finite value
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace pushrec

#endif  // PUSHREC_TYPES_HPP_
