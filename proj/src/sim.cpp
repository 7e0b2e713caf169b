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

#include "relief/core/sim.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "relief/core/rng.hpp"

namespace relief {

namespace {

ConvexSolid axisBox(const Vec3& min_corner, const Vec3& max_corner) {
  ConvexSolid solid;
  solid.faces = {
      {{1, 0, 0}, max_corner.x()},  {{-1, 0, 0}, -min_corner.x()},
      {{0, 1, 0}, max_corner.y()},  {{0, -1, 0}, -min_corner.y()},
      {{0, 0, 1}, max_corner.z()},  {{0, 0, -1}, -min_corner.z()},
  };
  return solid;
}

Vec2 axisDirection(Axis axis) {
  switch (axis) {
    case Axis::kPosX: return {1, 0};
    case Axis::kNegX: return {-1, 0};
    case Axis::kPosY: return {0, 1};
    case Axis::kNegY: return {0, -1};
  }
  return {1, 0};
}

}  // namespace

void Scene::addGround(double z) { ground_ = z; }

void Scene::addBox(const Vec3& center, const Vec3& size, bool walkable) {
  ConvexSolid solid = axisBox(center - 0.5 * size, center + 0.5 * size);
  solid.walkable = walkable;
  solids_.push_back(std::move(solid));
}

void Scene::addMovingBox(const Vec3& center, const Vec3& size, const Vec3& velocity,
                         double t_start, double t_end) {
  ConvexSolid solid = axisBox(center - 0.5 * size, center + 0.5 * size);
  solid.velocity = velocity;
  solid.active_from = t_start;
  solid.active_until = t_end;
  solids_.push_back(std::move(solid));
}

void Scene::addStairs(const Vec3& origin, double step_height, double step_depth, int count,
                      double width, Axis axis) {
  const Vec2 dir = axisDirection(axis);
  const Vec2 side{-dir.y(), dir.x()};
  for (int k = 0; k < count; ++k) {
    const Vec2 tread_lo{origin.x() + dir.x() * k * step_depth + std::min(0.0, side.x() * width),
                        origin.y() + dir.y() * k * step_depth + std::min(0.0, side.y() * width)};
    const Vec2 tread_hi{
        origin.x() + dir.x() * (k + 1) * step_depth + std::max(0.0, side.x() * width),
        origin.y() + dir.y() * (k + 1) * step_depth + std::max(0.0, side.y() * width)};
    const Vec2 lo{std::min(tread_lo.x(), tread_hi.x()), std::min(tread_lo.y(), tread_hi.y())};
    const Vec2 hi{std::max(tread_lo.x(), tread_hi.x()), std::max(tread_lo.y(), tread_hi.y())};
    solids_.push_back(axisBox({lo.x(), lo.y(), origin.z() - 0.5},
                              {hi.x(), hi.y(), origin.z() + (k + 1) * step_height}));
  }
}

void Scene::addRamp(const Vec2& min_xy, const Vec2& max_xy, double z_base, double slope,
                    Axis axis) {
  ConvexSolid solid;
  solid.faces = {
      {{1, 0, 0}, max_xy.x()},  {{-1, 0, 0}, -min_xy.x()},
      {{0, 1, 0}, max_xy.y()},  {{0, -1, 0}, -min_xy.y()},
      {{0, 0, -1}, -(z_base - 0.5)},
  };
  // Sloped top: z <= z_base + slope * ((p - low_edge) . dir), written as a
  // half-space (-slope * dir, 1) . p <= offset.
  const Vec2 dir = axisDirection(axis);
  const Vec2 low_edge{dir.x() > 0 ? min_xy.x() : (dir.x() < 0 ? max_xy.x() : 0.0),
                      dir.y() > 0 ? min_xy.y() : (dir.y() < 0 ? max_xy.y() : 0.0)};
  solid.faces.push_back(
      {{-slope * dir.x(), -slope * dir.y(), 1.0},
       z_base - slope * (dir.x() * low_edge.x() + dir.y() * low_edge.y())});
  solids_.push_back(std::move(solid));
}

void Scene::addWall(const Vec2& from, const Vec2& to, double height, double thickness) {
  // Axis-aligned walls only; diagonal segments are snapped to their longer
  // axis.
  const Vec2 d = to - from;
  Vec2 lo{std::min(from.x(), to.x()), std::min(from.y(), to.y())};
  Vec2 hi{std::max(from.x(), to.x()), std::max(from.y(), to.y())};
  if (std::abs(d.x()) >= std::abs(d.y())) {
    lo.y() = from.y() - 0.5 * thickness;
    hi.y() = from.y() + 0.5 * thickness;
    hi.x() = lo.x() + std::abs(d.x());
  } else {
    lo.x() = from.x() - 0.5 * thickness;
    hi.x() = from.x() + 0.5 * thickness;
    hi.y() = lo.y() + std::abs(d.y());
  }
  solids_.push_back(axisBox({lo.x(), lo.y(), -0.5}, {hi.x(), hi.y(), height}));
}

void Scene::addSlabOverhang(const Vec2& min_xy, const Vec2& max_xy, double z, double thickness) {
  ConvexSolid solid =
      axisBox({min_xy.x(), min_xy.y(), z}, {max_xy.x(), max_xy.y(), z + thickness});
  solid.walkable = false;
  solids_.push_back(std::move(solid));
}

void Scene::addFloor2(const Vec2& min_xy, const Vec2& max_xy, double z, const Vec2& hole_min,
                      const Vec2& hole_max, double thickness) {
  // Slab minus a rectangular opening, as up to four boxes around the hole.
  const auto addPiece = [&](double x0, double y0, double x1, double y1) {
    if (x1 - x0 <= 1e-12 || y1 - y0 <= 1e-12) return;
    solids_.push_back(axisBox({x0, y0, z - thickness}, {x1, y1, z}));
  };
  addPiece(min_xy.x(), min_xy.y(), max_xy.x(), hole_min.y());          // south strip
  addPiece(min_xy.x(), hole_max.y(), max_xy.x(), max_xy.y());          // north strip
  addPiece(min_xy.x(), hole_min.y(), hole_min.x(), hole_max.y());      // west strip
  addPiece(hole_max.x(), hole_min.y(), max_xy.x(), hole_max.y());      // east strip
}

std::optional<double> Scene::intersect(const Vec3& origin, const Vec3& dir, double max_range,
                                       double time) const {
  double best = max_range;
  bool hit = false;

  if (ground_ && dir.z() != 0.0) {
    const double t = (*ground_ - origin.z()) / dir.z();
    if (t > 1e-9 && t < best) {
      best = t;
      hit = true;
    }
  }

  for (const ConvexSolid& solid : solids_) {
    if (!solid.activeAt(time)) continue;
    const Vec3 shift = solid.displacementAt(time);
    // Slab clipping of the parametric ray against every face.
    double t_enter = 1e-9;
    double t_exit = best;
    bool ok = true;
    for (const auto& face : solid.faces) {
      const double denom = face.normal.dot(dir);
      const double dist = face.offset + face.normal.dot(shift) - face.normal.dot(origin);
      if (std::abs(denom) < 1e-15) {
        if (dist < 0.0) {
          ok = false;
          break;
        }
        continue;
      }
      const double t = dist / denom;
      if (denom > 0.0) t_exit = std::min(t_exit, t);
      else t_enter = std::max(t_enter, t);
      if (t_enter > t_exit) {
        ok = false;
        break;
      }
    }
    if (ok && t_enter < best && t_enter > 1e-9) {
      best = t_enter;
      hit = true;
    }
  }
  if (!hit) return std::nullopt;
  return best;
}

std::optional<double> Scene::topHeightAt(const Vec2& xy, double time) const {
  std::optional<double> best;
  if (ground_) best = *ground_;
  for (const ConvexSolid& solid : solids_) {
    if (!solid.walkable || !solid.activeAt(time)) continue;
    const Vec3 shift = solid.displacementAt(time);
    // Feasible z interval of the column at xy.
    double z_hi = std::numeric_limits<double>::infinity();
    double z_lo = -std::numeric_limits<double>::infinity();
    bool covered = true;
    for (const auto& face : solid.faces) {
      const double rhs = face.offset + face.normal.dot(shift) - face.normal.x() * xy.x() -
                         face.normal.y() * xy.y();
      if (face.normal.z() > 1e-12) z_hi = std::min(z_hi, rhs / face.normal.z());
      else if (face.normal.z() < -1e-12) z_lo = std::max(z_lo, rhs / face.normal.z());
      else if (rhs < -1e-12) {
        covered = false;  // xy outside the footprint
        break;
      }
    }
    if (!covered || z_lo > z_hi || !std::isfinite(z_hi)) continue;
    if (!best || z_hi > *best) best = z_hi;
  }
  return best;
}

std::vector<Vec3> SensorSpec::rayDirections() const {
  validate();
  std::vector<Vec3> dirs;
  if (pattern == Pattern::kGrid) {
    dirs.reserve(static_cast<std::size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r) {
      const double elev = rows == 1 ? 0.0 : -0.5 * v_fov + v_fov * r / (rows - 1.0);
      for (int c = 0; c < cols; ++c) {
        const double azim = cols == 1 ? 0.0 : -0.5 * h_fov + h_fov * c / (cols - 1.0);
        dirs.emplace_back(std::cos(elev) * std::cos(azim), std::cos(elev) * std::sin(azim),
                          std::sin(elev));
      }
    }
  } else {
    dirs.reserve(ring_elevations.size() * static_cast<std::size_t>(azimuth_steps));
    for (const double elev : ring_elevations) {
      for (int k = 0; k < azimuth_steps; ++k) {
        const double azim = 2.0 * M_PI * k / azimuth_steps;
        dirs.emplace_back(std::cos(elev) * std::cos(azim), std::cos(elev) * std::sin(azim),
                          std::sin(elev));
      }
    }
  }
  return dirs;
}

PointCloud renderScan(const Scene& scene, const RigidTransform& true_pose,
                      const SensorSpec& spec, double time, std::uint64_t seed,
                      std::uint64_t scan_index) {
  if (!true_pose.isValid()) throw Error(ErrorCode::kInvalidPose, "rotation is not orthonormal");
  const std::vector<Vec3> dirs = spec.rayDirections();
  PointCloud cloud;
  cloud.stamp = time;
  cloud.points.reserve(dirs.size());
  const double sigma_scale = std::sqrt(spec.noise.alpha_d);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const Vec3 world_dir = true_pose.rotation * dirs[k];
    const auto dist = scene.intersect(true_pose.translation, world_dir, spec.max_range, time);
    if (!dist) continue;
    double measured = *dist;
    if (sigma_scale > 0.0) {
      Rng rng(Rng::mix(Rng::mix(seed, scan_index), k));
      measured += rng.nextNormal() * sigma_scale * *dist;
    }
    cloud.points.push_back(dirs[k] * measured);
  }
  return cloud;
}

GroundTruth groundTruthHeightmap(const Scene& scene, const GridSpec& spec, double time) {
  GroundTruth truth;
  const std::size_t n = static_cast<std::size_t>(spec.width) * spec.height;
  truth.height.assign(n, std::numeric_limits<double>::quiet_NaN());
  truth.covered.assign(n, 0);
  const Vec2 origin = spec.origin();
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const Vec2 xy{origin.x() + (c + 0.5) * spec.resolution,
                    origin.y() + (r + 0.5) * spec.resolution};
      const auto top = scene.topHeightAt(xy, time);
      if (!top) continue;
      const std::size_t i = static_cast<std::size_t>(r) * spec.width + c;
      truth.height[i] = *top;
      truth.covered[i] = 1;
    }
  }
  return truth;
}

PoseSample poseAt(const TrajectorySpec& trajectory, double time) {
  trajectory.validate();
  const auto& wps = trajectory.waypoints;
  if (time < wps.front().time - 1e-9 || time > wps.back().time + 1e-9)
    throw Error(ErrorCode::kOutOfTrajectory,
                "time " + std::to_string(time) + " outside trajectory span");

  std::size_t hi = 1;
  while (hi < wps.size() && wps[hi].time < time) ++hi;
  PoseSample sample;
  if (wps.size() == 1 || hi >= wps.size()) {
    sample.true_pose.translation = wps.back().position;
    sample.true_pose.rotation = wps.back().orientation.toRotationMatrix();
  } else {
    const Waypoint& a = wps[hi - 1];
    const Waypoint& b = wps[hi];
    const double u = std::clamp((time - a.time) / (b.time - a.time), 0.0, 1.0);
    sample.true_pose.translation = (1.0 - u) * a.position + u * b.position;
    Eigen::Quaterniond qb = b.orientation;
    if (a.orientation.dot(qb) < 0.0) qb.coeffs() = -qb.coeffs();
    Eigen::Quaterniond q;
    q.coeffs() = (1.0 - u) * a.orientation.coeffs() + u * qb.coeffs();
    q.normalize();
    sample.true_pose.rotation = q.toRotationMatrix();
  }

  sample.estimated_pose = sample.true_pose;
  sample.estimated_pose.translation.z() +=
      trajectory.drift_rate * std::max(0.0, time - trajectory.drift_start);
  return sample;
}

}  // namespace relief
