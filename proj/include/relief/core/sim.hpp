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

#ifndef RELIEF_CORE_SIM_HPP
#define RELIEF_CORE_SIM_HPP

#include <Eigen/Geometry>
#include <cstdint>
#include <optional>
#include <vector>

#include "relief/core/grid.hpp"
#include "relief/core/types.hpp"

namespace relief {

/// Closed convex solid given by half-spaces normal . p <= offset.
/// Every scene primitive compiles to one or more of these, which keeps ray
/// intersection and top-surface queries closed-form.
struct ConvexSolid {
  struct HalfSpace {
    Vec3 normal;
    double offset;
  };
  std::vector<HalfSpace> faces;
  bool walkable = true;
  // Moving solids translate by velocity * (t - active_from) while active.
  Vec3 velocity = Vec3::Zero();
  double active_from = -std::numeric_limits<double>::infinity();
  double active_until = std::numeric_limits<double>::infinity();

  bool activeAt(double time) const { return time >= active_from && time <= active_until; }
  Vec3 displacementAt(double time) const {
    if (!std::isfinite(active_from)) return Vec3::Zero();
    return velocity * (time - active_from);
  }
};

enum class Axis { kPosX, kNegX, kPosY, kNegY };

/// Analytic scene builder. Primitives are axis-aligned; the ground plane is
/// the one unbounded surface.
class Scene {
 public:
  void addGround(double z);
  void addBox(const Vec3& center, const Vec3& size, bool walkable = true);
  void addMovingBox(const Vec3& center, const Vec3& size, const Vec3& velocity, double t_start,
                    double t_end);
  /// Treads ascend along `axis` starting at origin; tread k spans step_depth
  /// and tops out at origin.z + (k+1) * step_height.
  void addStairs(const Vec3& origin, double step_height, double step_depth, int count,
                 double width, Axis axis = Axis::kPosX);
  /// Sloped top over the rectangle [min_xy, max_xy]; height rises from
  /// z_base along `axis` with the given slope (rise over run).
  void addRamp(const Vec2& min_xy, const Vec2& max_xy, double z_base, double slope,
               Axis axis = Axis::kPosX);
  void addWall(const Vec2& from, const Vec2& to, double height, double thickness);
  /// Horizontal slab flagged non-walkable (an overhang, not terrain).
  void addSlabOverhang(const Vec2& min_xy, const Vec2& max_xy, double z,
                       double thickness = 0.1);
  /// Elevated floor with a rectangular stairwell opening.
  void addFloor2(const Vec2& min_xy, const Vec2& max_xy, double z, const Vec2& hole_min,
                 const Vec2& hole_max, double thickness = 0.1);

  const std::vector<ConvexSolid>& solids() const { return solids_; }
  bool hasGround() const { return ground_.has_value(); }
  double groundZ() const { return ground_.value(); }

  /// Nearest hit of ray origin + t * dir (t > 0) among active solids and the
  /// ground plane. Returns the distance along dir, or nullopt for a miss.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir, double max_range,
                                  double time) const;

  /// Top walkable surface height at xy, or nullopt where nothing walkable
  /// covers the point.
  std::optional<double> topHeightAt(const Vec2& xy, double time) const;

 private:
  std::optional<double> ground_;
  std::vector<ConvexSolid> solids_;
};

struct SensorSpec {
  enum class Pattern { kGrid, kRings };
  Pattern pattern = Pattern::kGrid;
  // grid pattern: rays fan around +x (azimuth) and the horizon (elevation)
  double h_fov = 1.5707963267948966;  // radians
  double v_fov = 1.0471975511965976;
  int cols = 80;
  int rows = 40;
  // rings pattern
  std::vector<double> ring_elevations;  // radians, negative points down
  int azimuth_steps = 180;
  double max_range = 10.0;
  SensorNoiseParams noise;
  double rate = 10.0;  // Hz

  /// Ray directions in the sensor frame (+x forward, +y left, +z up).
  std::vector<Vec3> rayDirections() const;

  void validate() const {
    if (max_range <= 0.0) throw Error(ErrorCode::kInvalidArgument, "max_range must be > 0");
    if (pattern == Pattern::kGrid && (cols < 1 || rows < 1))
      throw Error(ErrorCode::kInvalidArgument, "grid pattern needs cols, rows >= 1");
    if (pattern == Pattern::kRings && (ring_elevations.empty() || azimuth_steps < 1))
      throw Error(ErrorCode::kInvalidArgument, "rings pattern needs elevations and steps");
    if (rate <= 0.0) throw Error(ErrorCode::kInvalidArgument, "rate must be > 0");
  }
};

/// Renders one scan: per ray, the nearest scene intersection with seeded
/// range noise of std sqrt(alpha_d) * dist applied along the ray. Points are
/// returned in the sensor frame; misses produce no point. Ray k of scan s
/// draws from an independent stream seeded by (seed, s, k).
PointCloud renderScan(const Scene& scene, const RigidTransform& true_pose,
                      const SensorSpec& spec, double time, std::uint64_t seed,
                      std::uint64_t scan_index);

/// Heights of the top walkable surface at cell centers, plus the coverage
/// mask.
struct GroundTruth {
  std::vector<double> height;
  std::vector<std::uint8_t> covered;
};
GroundTruth groundTruthHeightmap(const Scene& scene, const GridSpec& spec, double time);

struct Waypoint {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

struct TrajectorySpec {
  std::vector<Waypoint> waypoints;
  double drift_rate = 0.0;   // meters/second of injected z drift
  double drift_start = 0.0;  // seconds

  void validate() const {
    if (waypoints.empty()) throw Error(ErrorCode::kInvalidArgument, "trajectory needs waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
      if (waypoints[i].time <= waypoints[i - 1].time)
        throw Error(ErrorCode::kInvalidArgument, "waypoint times must strictly increase");
  }
};

struct PoseSample {
  RigidTransform true_pose;
  RigidTransform estimated_pose;  // true pose plus injected z drift
};

/// Linear interpolation between waypoints (positions lerped, orientations
/// nlerped). Throws OutOfTrajectory outside the waypoint span.
PoseSample poseAt(const TrajectorySpec& trajectory, double time);

}  // namespace relief

#endif  // RELIEF_CORE_SIM_HPP
