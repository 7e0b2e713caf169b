/*
 * Copyright 2026 The Reliefmap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <set>

#include "relief/core/sim.hpp"

using namespace relief;

namespace {

SensorSpec singleRayDown() {
  SensorSpec spec;
  spec.pattern = SensorSpec::Pattern::kRings;
  spec.ring_elevations = {-M_PI / 2.0};  // straight down
  spec.azimuth_steps = 1;
  spec.max_range = 10.0;
  spec.noise.alpha_d = 0.0;
  return spec;
}

}  // namespace

TEST_CASE("straight-down ray over flat ground hits at sensor height") {
  Scene scene;
  scene.addGround(0.0);
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 1.0};
  const PointCloud cloud = renderScan(scene, pose, singleRayDown(), 0.0, 0, 0);
  REQUIRE(cloud.points.size() == 1);
  CHECK(cloud.points[0].x() == doctest::Approx(0.0));
  CHECK(cloud.points[0].y() == doctest::Approx(0.0));
  CHECK(cloud.points[0].z() == doctest::Approx(-1.0));
}

TEST_CASE("rays above the horizon miss a ground-only scene") {
  Scene scene;
  scene.addGround(0.0);
  SensorSpec spec;
  spec.pattern = SensorSpec::Pattern::kRings;
  spec.ring_elevations = {0.1, 0.4};
  spec.azimuth_steps = 16;
  spec.noise.alpha_d = 0.0;
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 1.0};
  const PointCloud cloud = renderScan(scene, pose, spec, 0.0, 0, 0);
  CHECK(cloud.points.empty());
}

TEST_CASE("all returns respect max_range and the ray-count bound") {
  Scene scene;
  scene.addGround(0.0);
  SensorSpec spec;
  spec.pattern = SensorSpec::Pattern::kGrid;
  spec.h_fov = 2.0;
  spec.v_fov = 1.2;
  spec.cols = 40;
  spec.rows = 20;
  spec.max_range = 5.0;
  spec.noise.alpha_d = 0.0;
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 1.0};
  // Pitch the sensor down 30 degrees so part of the fan hits the ground.
  const double pitch = 0.5235987755982988;  // positive pitches the fan down
  pose.rotation << std::cos(pitch), 0, std::sin(pitch), 0, 1, 0, -std::sin(pitch), 0,
      std::cos(pitch);
  const PointCloud cloud = renderScan(scene, pose, spec, 0.0, 0, 0);
  CHECK(cloud.points.size() <= static_cast<std::size_t>(spec.cols) * spec.rows);
  CHECK(!cloud.points.empty());
  for (const Vec3& p : cloud.points) CHECK(p.norm() <= spec.max_range + 1e-9);
}

TEST_CASE("box occlusion shadows the ground behind it") {
  Scene scene;
  scene.addGround(0.0);
  scene.addBox({2.0, 0.0, 0.25}, {0.5, 1.0, 0.5});
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 1.0};

  SensorSpec spec;
  spec.pattern = SensorSpec::Pattern::kGrid;
  spec.cols = 1;
  spec.rows = 200;
  spec.h_fov = 0.0;
  spec.v_fov = 1.2;
  spec.noise.alpha_d = 0.0;
  spec.max_range = 12.0;
  const double pitch = 0.45;
  pose.rotation << std::cos(pitch), 0, std::sin(pitch), 0, 1, 0, -std::sin(pitch), 0,
      std::cos(pitch);
  const PointCloud cloud = renderScan(scene, pose, spec, 0.0, 0, 0);

  // Analytic shadow: sensor (0,0,1) grazing the box top rear corner
  // (2.25, 0, 0.5) lands on the ground at x = 4.5; no ground hit may fall
  // between the box rear edge and that point.
  bool beyond = false;
  for (const Vec3& p_sensor : cloud.points) {
    const Vec3 p = pose.rotation * p_sensor + pose.translation;
    if (std::abs(p.z()) < 1e-9) {
      const bool in_shadow = p.x() > 2.25 + 1e-6 && p.x() < 4.5 - 1e-6;
      CHECK(!in_shadow);
      if (p.x() > 4.5 && p.x() < 8.0) beyond = true;
    }
  }
  CHECK(beyond);
}

TEST_CASE("ground truth heightmap reflects primitives") {
  GridSpec grid;
  grid.resolution = 0.05;
  grid.width = 120;
  grid.height = 120;

  SUBCASE("stairs plateaus take exact multiples of the step height") {
    Scene scene;
    scene.addGround(0.0);
    scene.addStairs({0.5, -0.5, 0.0}, 0.2, 0.3, 3, 1.0);
    const GroundTruth truth = groundTruthHeightmap(scene, grid, 0.0);
    std::set<int> levels;
    for (int r = 0; r < grid.height; ++r) {
      for (int c = 0; c < grid.width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * grid.width + c;
        REQUIRE(truth.covered[i]);
        const double h = truth.height[i];
        const int level = static_cast<int>(std::lround(h / 0.2));
        CHECK(std::abs(h - level * 0.2) < 1e-12);
        levels.insert(level);
      }
    }
    CHECK(levels == std::set<int>({0, 1, 2, 3}));
  }

  SUBCASE("overhangs are not terrain") {
    Scene scene;
    scene.addGround(0.0);
    scene.addSlabOverhang({-1.0, -1.0}, {1.0, 1.0}, 1.5);
    const GroundTruth truth = groundTruthHeightmap(scene, grid, 0.0);
    for (int r = 0; r < grid.height; ++r)
      for (int c = 0; c < grid.width; ++c)
        CHECK(truth.height[static_cast<std::size_t>(r) * grid.width + c] == 0.0);
  }

  SUBCASE("moving boxes are time-gated") {
    Scene scene;
    scene.addGround(0.0);
    scene.addMovingBox({0.0, 0.0, 0.25}, {0.5, 0.5, 0.5}, {0.0, 0.0, 0.0}, 1.0, 2.0);
    const auto at = [&](double t) {
      const GroundTruth truth = groundTruthHeightmap(scene, grid, t);
      const std::size_t i = static_cast<std::size_t>(60) * grid.width + 60;
      return truth.height[i];
    };
    CHECK(at(0.5) == 0.0);
    CHECK(at(1.5) == doctest::Approx(0.5));
    CHECK(at(2.5) == 0.0);
  }
}

TEST_CASE("trajectory interpolation and drift injection") {
  TrajectorySpec traj;
  traj.waypoints.push_back({0.0, {0.0, 0.0, 1.0}, Eigen::Quaterniond::Identity()});
  traj.waypoints.push_back({10.0, {2.0, 0.0, 1.0}, Eigen::Quaterniond::Identity()});
  traj.drift_rate = 0.05;
  traj.drift_start = 0.0;

  SUBCASE("midpoint of two waypoints") {
    const PoseSample sample = poseAt(traj, 5.0);
    CHECK(sample.true_pose.translation.x() == doctest::Approx(1.0));
    CHECK(sample.true_pose.translation.z() == doctest::Approx(1.0));
  }

  SUBCASE("drift accumulates linearly on the estimate only") {
    const PoseSample sample = poseAt(traj, 10.0);
    CHECK(sample.true_pose.translation.z() == doctest::Approx(1.0));
    CHECK(sample.estimated_pose.translation.z() == doctest::Approx(1.5));
  }

  SUBCASE("zero drift leaves the estimate equal to truth") {
    traj.drift_rate = 0.0;
    const PoseSample sample = poseAt(traj, 7.0);
    CHECK(sample.estimated_pose.translation == sample.true_pose.translation);
  }

  SUBCASE("outside the span throws") {
    CHECK_THROWS_AS(poseAt(traj, -1.0), Error);
    CHECK_THROWS_AS(poseAt(traj, 11.0), Error);
  }
}

TEST_CASE("range noise std matches sqrt(alpha_d) * distance within 5 percent") {
  Scene scene;
  scene.addGround(0.0);
  SensorSpec spec = singleRayDown();
  spec.noise.alpha_d = 0.01;
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 3.0};  // distance 3 straight down

  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int scan = 0; scan < n; ++scan) {
    const PointCloud cloud = renderScan(scene, pose, spec, 0.0, 42, scan);
    REQUIRE(cloud.points.size() == 1);
    const double d = cloud.points[0].norm();
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / n;
  const double std_dev = std::sqrt(sum_sq / n - mean * mean);
  const double expected = std::sqrt(0.01) * 3.0;
  CHECK(std_dev == doctest::Approx(expected).epsilon(0.05));
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("renders are reproducible from (seed, scan, ray)") {
  Scene scene;
  scene.addGround(0.0);
  SensorSpec spec;
  spec.pattern = SensorSpec::Pattern::kRings;
  spec.ring_elevations = {-0.8, -0.5};
  spec.azimuth_steps = 64;
  spec.noise.alpha_d = 0.01;
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 1.5};

  const PointCloud a = renderScan(scene, pose, spec, 0.0, 7, 3);
  const PointCloud b = renderScan(scene, pose, spec, 0.0, 7, 3);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);

  const PointCloud c = renderScan(scene, pose, spec, 0.0, 7, 4);
  bool differs = false;
  for (std::size_t i = 0; i < std::min(a.points.size(), c.points.size()); ++i)
    differs |= a.points[i] != c.points[i];
  CHECK(differs);
}

TEST_CASE("floor2 leaves its stairwell open") {
  Scene scene;
  scene.addGround(0.0);
  scene.addFloor2({-2.0, -2.0}, {2.0, 2.0}, 1.5, {-0.5, -0.5}, {0.5, 0.5});
  GridSpec grid;
  grid.resolution = 0.1;
  grid.width = 60;
  grid.height = 60;
  const GroundTruth truth = groundTruthHeightmap(scene, grid, 0.0);

  const auto heightAt = [&](double x, double y) {
    const int c = static_cast<int>(std::floor((x + 3.0) / 0.1));
    const int r = static_cast<int>(std::floor((y + 3.0) / 0.1));
    return truth.height[static_cast<std::size_t>(r) * grid.width + c];
  };
  CHECK(heightAt(-1.5, -1.5) == doctest::Approx(1.5));  // on the floor
  CHECK(heightAt(0.0, 0.0) == doctest::Approx(0.0));    // in the stairwell
  CHECK(heightAt(2.5, 2.5) == doctest::Approx(0.0));    // outside the floor
}

TEST_CASE("ramp tops rise linearly along the axis") {
  Scene scene;
  scene.addGround(0.0);
  scene.addRamp({0.0, -1.0}, {2.0, 1.0}, 0.0, 0.5, Axis::kPosX);
  GridSpec grid;
  grid.resolution = 0.05;
  grid.width = 100;
  grid.height = 100;
  const GroundTruth truth = groundTruthHeightmap(scene, grid, 0.0);
  const auto heightAt = [&](double x, double y) {
    const int c = static_cast<int>(std::floor((x + 2.5) / 0.05));
    const int r = static_cast<int>(std::floor((y + 2.5) / 0.05));
    return truth.height[static_cast<std::size_t>(r) * grid.width + c];
  };
  CHECK(heightAt(1.025, 0.025) == doctest::Approx(0.5 * 1.025));
  CHECK(heightAt(-0.5, 0.0) == doctest::Approx(0.0));
}
