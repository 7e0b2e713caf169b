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

#ifndef RELIEF_CORE_GRID_HPP
#define RELIEF_CORE_GRID_HPP

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "relief/core/types.hpp"

namespace relief {

/// Integer cell displacement applied by a recenter call.
struct ShiftReport {
  int cells_x = 0;
  int cells_y = 0;
  bool shifted() const { return cells_x != 0 || cells_y != 0; }
};

/// Layered robot-centric 2.5D grid.
///
/// Cell validity is an explicit flag; invalid cells carry NaN sentinels in
/// the value layers but no kernel ever branches on NaN. The map is
/// single-writer; cell-wise kernels may run in parallel over disjoint cells.
class ElevationMap {
 public:
  static constexpr double kInvalidValue = std::numeric_limits<double>::quiet_NaN();
  static constexpr double kNoUpperBound = std::numeric_limits<double>::infinity();

  explicit ElevationMap(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  double resolution() const { return spec_.resolution; }
  std::size_t cellCount() const { return static_cast<std::size_t>(spec_.width) * spec_.height; }

  std::size_t linearIndex(CellIndex idx) const {
    return static_cast<std::size_t>(idx.row) * spec_.width + idx.col;
  }

  /// Cell containing world point p, or nullopt when p is outside the extent.
  std::optional<CellIndex> indexAt(const Vec2& p) const;

  /// Throwing variant of indexAt.
  CellIndex worldToIndex(const Vec2& p) const;

  /// World position of the cell center.
  Vec2 indexToWorld(CellIndex idx) const;

  /// Moves the map center by a whole number of cells towards new_center.
  /// Displacements below one cell per axis are ignored. Surviving cells keep
  /// their values bit-identically; exposed cells become invalid.
  ShiftReport recenter(const Vec2& new_center);

  /// Grows variance of valid cells by sigma_t2 * (dt / nominal_period),
  /// capped at sigma_max2. Cells flagged in `skip` are left untouched
  /// (used by the per-scan pipeline to exempt freshly updated cells).
  void addTimeVariance(double dt, double sigma_t2, double sigma_max2, double nominal_period,
                       std::span<const std::uint8_t> skip = {});

  bool isValid(std::size_t i) const { return valid_[i] != 0; }
  bool hasNormal(std::size_t i) const {
    return normal_x[i] != 0.0 || normal_y[i] != 0.0 || normal_z[i] != 0.0;
  }

  /// Marks a cell invalid and clears every derived quantity it carried.
  void invalidateCell(std::size_t i);

  /// Sets elevation/variance and stamps the cell valid.
  void setEstimate(std::size_t i, double elevation, double variance, double stamp);

  // Layer storage, row-major (row * width + col).
  std::vector<double> elevation;
  std::vector<double> variance;
  std::vector<double> last_update;
  std::vector<std::int32_t> scan_point_count;  // per-scan scratch
  std::vector<double> scan_max_height;         // per-scan scratch
  std::vector<double> upper_bound;
  std::vector<std::uint8_t> upper_bound_valid;
  std::vector<double> traversability;
  std::vector<double> normal_x;
  std::vector<double> normal_y;
  std::vector<double> normal_z;
  std::vector<std::uint8_t> valid_;

 private:
  GridSpec spec_;
};

}  // namespace relief

#endif  // RELIEF_CORE_GRID_HPP
