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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pushrec/dynamics.hpp"
#include "pushrec/model.hpp"

using namespace pushrec;

TEST_CASE("default model matches the documented figures") {
  const RobotModel model = build_default_model();
  CHECK(model.total_mass == doctest::Approx(33.0).epsilon(1e-12));
  CHECK(model.num_joints() == 8);
  CHECK(model.num_links() == 9);
  CHECK(model.feet.size() == 2);
  CHECK(model.feet[0].toe - model.feet[0].heel ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(model.gravity == 9.81);
  CHECK(model.contact.friction == 1.0);
  CHECK(model.standing_height > 0.4);

  double sum = 0.0;
  for (const auto& link : model.links) sum += link.mass;
  CHECK(model.total_mass == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("invalid parameters name the offending field") {
  KeyValueFile kv = KeyValueFile::parse(default_model_config(), "d");

  SUBCASE("zero mass link") {
    kv.set_double("link.shank_l.mass", 0.0);
    CHECK_THROWS_WITH_AS(build_model(kv),
                         doctest::Contains("link.shank_l.mass"), ConfigError);
  }
  SUBCASE("negative inertia") {
    kv.set_double("link.torso.inertia", -0.1);
    CHECK_THROWS_WITH_AS(build_model(kv),
                         doctest::Contains("link.torso.inertia"), ConfigError);
  }
  SUBCASE("inverted joint limits") {
    kv.set("joint.knee_l.limits", "0.5 -0.5");
    CHECK_THROWS_WITH_AS(build_model(kv),
                         doctest::Contains("joint.knee_l.limits"),
                         ConfigError);
  }
  SUBCASE("posture outside limits") {
    kv.set_double("posture.hip_l", 12.0);
    CHECK_THROWS_WITH_AS(build_model(kv), doctest::Contains("posture.hip_l"),
                         ConfigError);
  }
  SUBCASE("missing link key") {
    kv.set("links.order",
           "pelvis torso arm thigh_l shank_l foot_l thigh_r shank_r ghost");
    CHECK_THROWS_AS(build_model(kv), ConfigError);
  }
}

TEST_CASE("friction override carries through") {
  KeyValueFile kv = KeyValueFile::parse(default_model_config(), "d");
  kv.set_double("contact.friction", 1.0);
  CHECK(build_model(kv).contact.friction == 1.0);
  kv.set_double("contact.friction", 0.2);
  CHECK(build_model(kv).contact.friction == 0.2);
}

TEST_CASE("model config round-trips through serialization") {
  const RobotModel model = build_default_model();
  const KeyValueFile kv = model_to_config(model);
  const RobotModel again = build_model(kv);
  CHECK(again.total_mass == model.total_mass);
  CHECK(again.standing_height == model.standing_height);
  CHECK(again.reference_posture == model.reference_posture);
  CHECK(again.contact.normal_stiffness == model.contact.normal_stiffness);
  CHECK(again.joints[3].kp == model.joints[3].kp);
  CHECK(again.links[4].com == model.links[4].com);
  CHECK(model_to_config(again).canonical() == kv.canonical());
}

TEST_CASE("standing height puts the lowest sole point on the ground") {
  const RobotModel model = build_default_model();
  Vector q = Vector::Zero(model.dof());
  q[1] = model.standing_height;
  q.segment(3, model.num_joints()) = model.reference_posture;
  const auto points = sole_points(model, forward_kinematics(model, q));
  double lowest = 1.0;
  for (const auto& p : points) lowest = std::min(lowest, p.y());
  CHECK(lowest == doctest::Approx(0.0).epsilon(1e-12));
}
