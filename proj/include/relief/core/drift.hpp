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

#ifndef RELIEF_CORE_DRIFT_HPP
#define RELIEF_CORE_DRIFT_HPP

#include <vector>

#include "relief/core/grid.hpp"
#include "relief/core/types.hpp"

namespace relief {

struct DriftParams {
  bool enabled = true;
  double traversability_threshold = 0.7;
  int min_points = 10;
  double max_offset_per_scan = 0.1;  // meters

  void validate() const {
    if (min_points < 1) throw Error(ErrorCode::kInvalidArgument, "min_points must be >= 1");
  }
};

struct DriftEstimate {
  double mean_error = 0.0;  // meters; meaningful only when n > 0
  int n = 0;
};

/// Mean height error between scan points and the cells they fall on,
/// restricted to valid cells with traversability above the threshold.
DriftEstimate computeDriftError(const ElevationMap& map, const std::vector<Vec3>& points_map_frame,
                                const DriftParams& params);

struct OffsetReport {
  double applied = 0.0;
  bool clamped = false;
};

/// Shifts the elevation of valid cells and every finite upper bound by
/// offset, clamped to +-max_offset. Variances are untouched.
OffsetReport applyHeightOffset(ElevationMap& map, double offset, double max_offset);

}  // namespace relief

#endif  // RELIEF_CORE_DRIFT_HPP
