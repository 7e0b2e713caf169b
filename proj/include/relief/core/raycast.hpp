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

#ifndef RELIEF_CORE_RAYCAST_HPP
#define RELIEF_CORE_RAYCAST_HPP

#include <span>
#include <vector>

#include "relief/core/grid.hpp"
#include "relief/core/types.hpp"

namespace relief {

struct CleanupParams {
  bool cleanup_enabled = true;
  bool upper_bound_enabled = true;
  double alpha_n = 0.2;  // |r . n| must exceed this for removal
  double t_free = 1.0;   // seconds a cell must be stale before removal

  void validate() const {
    if (alpha_n < 0.0 || alpha_n > 1.0)
      throw Error(ErrorCode::kInvalidArgument, "alpha_n must lie in [0, 1]");
  }
};

/// One grid cell crossed by a ray, with the ray z at the midpoint of the
/// crossing chord.
struct RayCell {
  CellIndex index;
  double ray_height = 0.0;
};

/// Exact traversal of the cells whose xy footprint the segment crosses,
/// ordered from origin to endpoint and excluding the endpoint's own cell.
/// The segment is clipped to the map extent. A segment with zero xy length
/// yields just the origin cell.
///
/// Incremental boundary-crossing walk after Amanatides & Woo, "A Fast Voxel
/// Traversal Algorithm for Ray Tracing" (1987), restricted to 2D with the
/// ray z interpolated per crossing.
std::vector<RayCell> traverseCells(const Vec3& origin, const Vec3& endpoint, const GridSpec& spec);

/// Invalidates traversed cells demonstrably penetrated by the ray. A cell is
/// removed iff it is valid, ray_height < h - sqrt(variance), it has been
/// stale longer than t_free, it has a computed normal, and |r . n| > alpha_n.
/// Cells flagged in `protect` are never removed (the per-scan pipeline flags
/// cells the current scan touches). Returns the removed cells.
std::vector<CellIndex> visibilityCleanup(ElevationMap& map, const Vec3& origin,
                                         const Vec3& endpoint, const CleanupParams& params,
                                         double now,
                                         std::span<const std::int32_t> protect = {});

/// Cleanup over an already-computed traversal; ray_dir_unit is the unit
/// vector from origin to endpoint. The scan pipeline uses this to share one
/// traversal between cleanup and upper-bound maintenance.
std::vector<CellIndex> visibilityCleanupOnTraversed(ElevationMap& map,
                                                    const std::vector<RayCell>& traversed,
                                                    const Vec3& ray_dir_unit,
                                                    const CleanupParams& params, double now,
                                                    std::span<const std::int32_t> protect = {});

/// Tightens the upper bound of traversed cells that have no height estimate:
/// upper_bound <- min(upper_bound, ray_height). Cells with an estimate are
/// skipped (their bound equals the estimate by construction).
void updateUpperBound(ElevationMap& map, const std::vector<RayCell>& traversed);

}  // namespace relief

#endif  // RELIEF_CORE_RAYCAST_HPP
