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

#ifndef RELIEF_CORE_SENSING_HPP
#define RELIEF_CORE_SENSING_HPP

#include <vector>

#include "relief/core/types.hpp"

namespace relief {

/// Applies pose to every point, preserving order. Throws InvalidPose if the
/// rotation is not orthonormal.
std::vector<Vec3> transformCloud(const std::vector<Vec3>& points, const RigidTransform& pose);

/// max(alpha_d * dist^2, sigma_p_min2).
double pointVariance(double dist, const SensorNoiseParams& params);

/// Exclusion-area test in the sensor frame. With r = sqrt(x^2 + y^2) and
/// z_s = p.z, a point is dropped iff enabled and
///   z_s > min(d_max, b + max(0, r - c) * tan(theta_a)).
/// Points at or below the boundary pass.
bool isExcluded(const Vec3& p_sensor, const ExclusionParams& params);

}  // namespace relief

#endif  // RELIEF_CORE_SENSING_HPP
