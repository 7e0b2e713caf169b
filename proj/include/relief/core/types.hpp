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

#ifndef RELIEF_CORE_TYPES_HPP
#define RELIEF_CORE_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relief {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class ErrorCode {
  kOutOfMap,
  kInvalidPose,
  kInvalidVariance,
  kInvalidModel,
  kDegeneratePlane,
  kNothingToInpaint,
  kOutOfTrajectory,
  kParseError,
  kIoError,
  kInvalidArgument,
};

/// Error thrown by core operations. Carries a machine-readable code so the
/// C boundary can translate it to a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

constexpr const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfMap: return "OutOfMap";
    case ErrorCode::kInvalidPose: return "InvalidPose";
    case ErrorCode::kInvalidVariance: return "InvalidVariance";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kDegeneratePlane: return "DegeneratePlane";
    case ErrorCode::kNothingToInpaint: return "NothingToInpaint";
    case ErrorCode::kOutOfTrajectory: return "OutOfTrajectory";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Geometry of the fixed-size 2.5D grid. The grid covers the rectangle
/// [center - extent/2, center + extent/2) in world xy, row-major with
/// row <-> y and col <-> x.
struct GridSpec {
  double resolution = 0.04;  // meters per cell
  int width = 250;           // columns (x)
  int height = 250;          // rows (y)
  Vec2 center = Vec2::Zero();

  double extentX() const { return width * resolution; }
  double extentY() const { return height * resolution; }
  Vec2 origin() const { return {center.x() - 0.5 * extentX(), center.y() - 0.5 * extentY()}; }

  void validate() const {
    if (resolution <= 0.0) throw Error(ErrorCode::kInvalidArgument, "resolution must be > 0");
    if (width < 3 || height < 3)
      throw Error(ErrorCode::kInvalidArgument, "grid must be at least 3x3 cells");
  }
};

struct CellIndex {
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Sensor-frame scan. Coordinates are meters in the sensor frame.
struct PointCloud {
  std::vector<Vec3> points;
  double stamp = 0.0;  // seconds
};

/// Rotation + translation taking sensor-frame points into the map frame.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  bool isValid(double tol = 1e-9) const {
    const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

/// Distance-quadratic measurement noise, sigma_p^2 = alpha_d * d^2, floored.
struct SensorNoiseParams {
  double alpha_d = 0.01;
  double sigma_p_min2 = 1e-4;  // meters^2 floor
};

/// Sensor-relative ramp above which incoming points are dropped. Rejects
/// ceilings and near overhangs while keeping sloped terrain.
struct ExclusionParams {
  bool enabled = true;
  double theta_a = 0.785398163397448;  // radians, ramp angle
  double b = 0.5;                      // meters, vertical offset at onset
  double c = 0.2;                      // meters, horizontal onset
  double d_max = 1.0;                  // meters, height cap

  void validate() const {
    if (theta_a < 0.0 || theta_a >= 1.5707963267948966)
      throw Error(ErrorCode::kInvalidArgument, "theta_a must lie in [0, pi/2)");
    if (b < 0.0 || c < 0.0) throw Error(ErrorCode::kInvalidArgument, "b and c must be >= 0");
    if (d_max <= b) throw Error(ErrorCode::kInvalidArgument, "d_max must exceed b");
  }
};

enum class ExecMode { kDeterministic, kParallel };

}  // namespace relief

#endif  // RELIEF_CORE_TYPES_HPP
