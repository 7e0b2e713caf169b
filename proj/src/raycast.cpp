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

#include "relief/core/raycast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace relief {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Liang-Barsky clip of the parameter interval [t0, t1] against one slab.
bool clipAxis(double p, double q, double& t0, double& t1) {
  if (p == 0.0) return q >= 0.0;
  const double r = q / p;
  if (p < 0.0) {
    if (r > t1) return false;
    t0 = std::max(t0, r);
  } else {
    if (r < t0) return false;
    t1 = std::min(t1, r);
  }
  return t0 <= t1;
}

int clampCell(int v, int max_exclusive) { return std::clamp(v, 0, max_exclusive - 1); }

}  // namespace

std::vector<RayCell> traverseCells(const Vec3& origin, const Vec3& endpoint,
                                   const GridSpec& spec) {
  std::vector<RayCell> out;
  const Vec2 grid_origin = spec.origin();
  const double res = spec.resolution;
  const double dx = endpoint.x() - origin.x();
  const double dy = endpoint.y() - origin.y();
  const double dz = endpoint.z() - origin.z();

  const auto cellOf = [&](double x, double y) -> CellIndex {
    return {clampCell(static_cast<int>(std::floor((y - grid_origin.y()) / res)), spec.height),
            clampCell(static_cast<int>(std::floor((x - grid_origin.x()) / res)), spec.width)};
  };
  const auto inMap = [&](double x, double y) {
    return x >= grid_origin.x() && x < grid_origin.x() + spec.width * res &&
           y >= grid_origin.y() && y < grid_origin.y() + spec.height * res;
  };

  if (std::hypot(dx, dy) < 1e-12) {
    // Vertical ray: the segment stays inside one cell footprint.
    if (inMap(origin.x(), origin.y()))
      out.push_back({cellOf(origin.x(), origin.y()), origin.z() + 0.5 * dz});
    return out;
  }

  // Clip to the map extent.
  double t0 = 0.0;
  double t1 = 1.0;
  if (!clipAxis(-dx, origin.x() - grid_origin.x(), t0, t1)) return out;
  if (!clipAxis(dx, grid_origin.x() + spec.width * res - origin.x(), t0, t1)) return out;
  if (!clipAxis(-dy, origin.y() - grid_origin.y(), t0, t1)) return out;
  if (!clipAxis(dy, grid_origin.y() + spec.height * res - origin.y(), t0, t1)) return out;
  if (t0 >= t1) return out;

  const bool end_in_map = inMap(endpoint.x(), endpoint.y());
  const CellIndex end_cell = end_in_map ? cellOf(endpoint.x(), endpoint.y()) : CellIndex{-1, -1};

  const double sx = origin.x() + t0 * dx;
  const double sy = origin.y() + t0 * dy;
  int col = clampCell(static_cast<int>(std::floor((sx - grid_origin.x()) / res)), spec.width);
  int row = clampCell(static_cast<int>(std::floor((sy - grid_origin.y()) / res)), spec.height);

  const int step_col = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_row = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  // Parameter value of the next cell-boundary crossing per axis.
  double t_max_x = kInf;
  double t_max_y = kInf;
  double t_delta_x = kInf;
  double t_delta_y = kInf;
  if (step_col != 0) {
    const double boundary = grid_origin.x() + (col + (step_col > 0 ? 1 : 0)) * res;
    t_max_x = (boundary - origin.x()) / dx;
    t_delta_x = res / std::abs(dx);
  }
  if (step_row != 0) {
    const double boundary = grid_origin.y() + (row + (step_row > 0 ? 1 : 0)) * res;
    t_max_y = (boundary - origin.y()) / dy;
    t_delta_y = res / std::abs(dy);
  }

  double t_enter = t0;
  while (true) {
    const double t_next = std::min({t_max_x, t_max_y, t1});
    const CellIndex cell{row, col};
    const bool is_endpoint_cell = end_in_map && cell == end_cell;
    if (!is_endpoint_cell && t_next > t_enter) {
      const double t_mid = 0.5 * (t_enter + t_next);
      out.push_back({cell, origin.z() + t_mid * dz});
    }
    if (t_next >= t1) break;
    if (t_max_x < t_max_y) {
      col += step_col;
      t_max_x += t_delta_x;
      if (col < 0 || col >= spec.width) break;
    } else {
      row += step_row;
      t_max_y += t_delta_y;
      if (row < 0 || row >= spec.height) break;
    }
    t_enter = t_next;
  }
  return out;
}

std::vector<CellIndex> visibilityCleanupOnTraversed(ElevationMap& map,
                                                    const std::vector<RayCell>& traversed,
                                                    const Vec3& ray_dir_unit,
                                                    const CleanupParams& params, double now,
                                                    std::span<const std::int32_t> protect) {
  std::vector<CellIndex> removed;
  for (const RayCell& rc : traversed) {
    const std::size_t i = map.linearIndex(rc.index);
    if (!map.isValid(i)) continue;
    if (!protect.empty() && protect[i] > 0) continue;
    if (now - map.last_update[i] <= params.t_free) continue;
    if (rc.ray_height >= map.elevation[i] - std::sqrt(map.variance[i])) continue;
    if (!map.hasNormal(i)) continue;
    const double alignment = std::abs(ray_dir_unit.x() * map.normal_x[i] +
                                      ray_dir_unit.y() * map.normal_y[i] +
                                      ray_dir_unit.z() * map.normal_z[i]);
    if (alignment <= params.alpha_n) continue;
    // Claim the removal; concurrent rays may race for the same cell and the
    // exchange makes removal idempotent.
    std::atomic_ref<std::uint8_t> flag(map.valid_[i]);
    if (flag.exchange(0, std::memory_order_acq_rel) == 0) continue;
    map.invalidateCell(i);
    removed.push_back(rc.index);
  }
  return removed;
}

std::vector<CellIndex> visibilityCleanup(ElevationMap& map, const Vec3& origin,
                                         const Vec3& endpoint, const CleanupParams& params,
                                         double now, std::span<const std::int32_t> protect) {
  const auto traversed = traverseCells(origin, endpoint, map.spec());
  const Vec3 dir = (endpoint - origin).normalized();
  return visibilityCleanupOnTraversed(map, traversed, dir, params, now, protect);
}

void updateUpperBound(ElevationMap& map, const std::vector<RayCell>& traversed) {
  for (const RayCell& rc : traversed) {
    const std::size_t i = map.linearIndex(rc.index);
    if (map.isValid(i)) continue;
    // Atomic running min; order-independent, so parallel and deterministic
    // traversal schedules agree.
    std::atomic_ref<double> bound(map.upper_bound[i]);
    double current = bound.load(std::memory_order_relaxed);
    while (rc.ray_height < current) {
      if (bound.compare_exchange_weak(current, rc.ray_height, std::memory_order_relaxed)) {
        std::atomic_ref<std::uint8_t>(map.upper_bound_valid[i])
            .store(1, std::memory_order_relaxed);
        break;
      }
    }
  }
}

}  // namespace relief
