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

#include "relief/core/drift.hpp"

#include <algorithm>
#include <cmath>

namespace relief {

DriftEstimate computeDriftError(const ElevationMap& map,
                                const std::vector<Vec3>& points_map_frame,
                                const DriftParams& params) {
  double sum = 0.0;
  int n = 0;
  for (const Vec3& p : points_map_frame) {
    const auto idx = map.indexAt({p.x(), p.y()});
    if (!idx) continue;
    const std::size_t i = map.linearIndex(*idx);
    if (!map.isValid(i)) continue;
    if (map.traversability[i] <= params.traversability_threshold) continue;
    sum += p.z() - map.elevation[i];
    ++n;
  }
  DriftEstimate estimate;
  estimate.n = n;
  if (n > 0) estimate.mean_error = sum / n;
  return estimate;
}

OffsetReport applyHeightOffset(ElevationMap& map, double offset, double max_offset) {
  OffsetReport report;
  report.applied = std::clamp(offset, -max_offset, max_offset);
  report.clamped = report.applied != offset;
  if (report.applied == 0.0) return report;
  const std::size_t n = map.cellCount();
  for (std::size_t i = 0; i < n; ++i) {
    if (map.isValid(i)) map.elevation[i] += report.applied;
    if (map.upper_bound_valid[i]) map.upper_bound[i] += report.applied;
  }
  return report;
}

}  // namespace relief
