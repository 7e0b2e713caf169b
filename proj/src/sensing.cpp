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

#include "relief/core/sensing.hpp"

#include <algorithm>
#include <cmath>

namespace relief {

std::vector<Vec3> transformCloud(const std::vector<Vec3>& points, const RigidTransform& pose) {
  if (!pose.isValid()) throw Error(ErrorCode::kInvalidPose, "rotation is not orthonormal");
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(pose.apply(p));
  return out;
}

double pointVariance(double dist, const SensorNoiseParams& params) {
  return std::max(params.alpha_d * dist * dist, params.sigma_p_min2);
}

bool isExcluded(const Vec3& p_sensor, const ExclusionParams& params) {
  if (!params.enabled) return false;
  const double r = std::hypot(p_sensor.x(), p_sensor.y());
  const double ramp = params.b + std::max(0.0, r - params.c) * std::tan(params.theta_a);
  return p_sensor.z() > std::min(params.d_max, ramp);
}

}  // namespace relief
