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

#include "relief/core/grid.hpp"

#include <algorithm>
#include <cmath>

namespace relief {

ElevationMap::ElevationMap(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const std::size_t n = cellCount();
  elevation.assign(n, kInvalidValue);
  variance.assign(n, kInvalidValue);
  last_update.assign(n, 0.0);
  scan_point_count.assign(n, 0);
  scan_max_height.assign(n, 0.0);
  upper_bound.assign(n, kNoUpperBound);
  upper_bound_valid.assign(n, 0);
  traversability.assign(n, 0.0);
  normal_x.assign(n, 0.0);
  normal_y.assign(n, 0.0);
  normal_z.assign(n, 0.0);
  valid_.assign(n, 0);
}

std::optional<CellIndex> ElevationMap::indexAt(const Vec2& p) const {
  const Vec2 origin = spec_.origin();
  const int col = static_cast<int>(std::floor((p.x() - origin.x()) / spec_.resolution));
  const int row = static_cast<int>(std::floor((p.y() - origin.y()) / spec_.resolution));
  if (col < 0 || col >= spec_.width || row < 0 || row >= spec_.height) return std::nullopt;
  return CellIndex{row, col};
}

CellIndex ElevationMap::worldToIndex(const Vec2& p) const {
  const auto idx = indexAt(p);
  if (!idx)
    throw Error(ErrorCode::kOutOfMap, "point (" + std::to_string(p.x()) + ", " +
                                          std::to_string(p.y()) + ") lies outside the map");
  return *idx;
}

Vec2 ElevationMap::indexToWorld(CellIndex idx) const {
  const Vec2 origin = spec_.origin();
  return {origin.x() + (idx.col + 0.5) * spec_.resolution,
          origin.y() + (idx.row + 0.5) * spec_.resolution};
}

namespace {

int quantizedCellShift(double displacement, double resolution) {
  if (std::abs(displacement) < resolution) return 0;  // 1-cell hysteresis
  return static_cast<int>(std::llround(displacement / resolution));
}

template <typename T>
void shiftLayer(std::vector<T>& layer, int width, int height, int dc, int dr, T fill) {
  std::vector<T> out(layer.size(), fill);
  for (int r = 0; r < height; ++r) {
    const int sr = r + dr;
    if (sr < 0 || sr >= height) continue;
    for (int c = 0; c < width; ++c) {
      const int sc = c + dc;
      if (sc < 0 || sc >= width) continue;
      out[static_cast<std::size_t>(r) * width + c] = layer[static_cast<std::size_t>(sr) * width + sc];
    }
  }
  layer.swap(out);
}

}  // namespace

ShiftReport ElevationMap::recenter(const Vec2& new_center) {
  ShiftReport report;
  report.cells_x = quantizedCellShift(new_center.x() - spec_.center.x(), spec_.resolution);
  report.cells_y = quantizedCellShift(new_center.y() - spec_.center.y(), spec_.resolution);
  if (!report.shifted()) return report;

  spec_.center.x() += report.cells_x * spec_.resolution;
  spec_.center.y() += report.cells_y * spec_.resolution;

  const int dc = report.cells_x;
  const int dr = report.cells_y;
  shiftLayer(elevation, spec_.width, spec_.height, dc, dr, kInvalidValue);
  shiftLayer(variance, spec_.width, spec_.height, dc, dr, kInvalidValue);
  shiftLayer(last_update, spec_.width, spec_.height, dc, dr, 0.0);
  shiftLayer(scan_point_count, spec_.width, spec_.height, dc, dr, std::int32_t{0});
  shiftLayer(scan_max_height, spec_.width, spec_.height, dc, dr, 0.0);
  shiftLayer(upper_bound, spec_.width, spec_.height, dc, dr, kNoUpperBound);
  shiftLayer(upper_bound_valid, spec_.width, spec_.height, dc, dr, std::uint8_t{0});
  shiftLayer(traversability, spec_.width, spec_.height, dc, dr, 0.0);
  shiftLayer(normal_x, spec_.width, spec_.height, dc, dr, 0.0);
  shiftLayer(normal_y, spec_.width, spec_.height, dc, dr, 0.0);
  shiftLayer(normal_z, spec_.width, spec_.height, dc, dr, 0.0);
  shiftLayer(valid_, spec_.width, spec_.height, dc, dr, std::uint8_t{0});
  return report;
}

void ElevationMap::addTimeVariance(double dt, double sigma_t2, double sigma_max2,
                                   double nominal_period, std::span<const std::uint8_t> skip) {
  if (dt < 0.0) throw Error(ErrorCode::kInvalidArgument, "dt must be >= 0");
  if (dt == 0.0 || sigma_t2 == 0.0) return;
  const double growth = sigma_t2 * (dt / nominal_period);
  const std::size_t n = cellCount();
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid_[i]) continue;
    if (!skip.empty() && skip[i]) continue;
    variance[i] = std::min(variance[i] + growth, sigma_max2);
  }
}

void ElevationMap::invalidateCell(std::size_t i) {
  valid_[i] = 0;
  elevation[i] = kInvalidValue;
  variance[i] = kInvalidValue;
  last_update[i] = 0.0;
  traversability[i] = 0.0;
  normal_x[i] = 0.0;
  normal_y[i] = 0.0;
  normal_z[i] = 0.0;
  upper_bound[i] = kNoUpperBound;
  upper_bound_valid[i] = 0;
}

void ElevationMap::setEstimate(std::size_t i, double elev, double var, double stamp) {
  elevation[i] = elev;
  variance[i] = var;
  last_update[i] = stamp;
  valid_[i] = 1;
  // A cell with a height estimate carries that estimate as its own bound.
  upper_bound[i] = elev;
  upper_bound_valid[i] = 1;
}

}  // namespace relief
