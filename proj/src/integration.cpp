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

#include "relief/core/integration.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "relief/core/parallel.hpp"

namespace relief {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class PointFate : std::uint8_t { kKept, kOutOfRange, kExcluded };

}  // namespace

CellUpdate kalmanUpdateCell(double h, double sigma_m2, double p_z, double sigma_p2,
                            int cell_count, const UpdateParams& params) {
  if (sigma_m2 <= 0.0 || sigma_p2 <= 0.0)
    throw Error(ErrorCode::kInvalidVariance, "variances must be positive");

  if (cell_count > params.wall_count_threshold && p_z < h)
    return {h, sigma_m2, Disposition::kIgnoredLow};

  if (std::abs(p_z - h) / std::sqrt(sigma_m2) > params.mahalanobis_threshold)
    return {h, std::min(sigma_m2 + params.sigma_outlier2, params.sigma_max2),
            Disposition::kOutlier};

  const double denom = sigma_m2 + sigma_p2;
  return {(sigma_p2 * h + sigma_m2 * p_z) / denom, sigma_m2 * sigma_p2 / denom,
          Disposition::kFused};
}

void precountScan(ElevationMap& map, const std::vector<Vec3>& points_map_frame) {
  std::fill(map.scan_point_count.begin(), map.scan_point_count.end(), 0);
  std::fill(map.scan_max_height.begin(), map.scan_max_height.end(), 0.0);
  for (const Vec3& p : points_map_frame) {
    const auto idx = map.indexAt({p.x(), p.y()});
    if (!idx) continue;
    const std::size_t i = map.linearIndex(*idx);
    if (map.scan_point_count[i] == 0 || p.z() > map.scan_max_height[i])
      map.scan_max_height[i] = p.z();
    ++map.scan_point_count[i];
  }
}

ScanStats integrateScan(ElevationMap& map, const PointCloud& cloud, const RigidTransform& pose,
                        const PipelineParams& params, double dt_since_last_scan) {
  params.update.validate();
  params.drift.validate();
  params.cleanup.validate();
  if (!pose.isValid()) throw Error(ErrorCode::kInvalidPose, "rotation is not orthonormal");

  ScanStats stats;
  stats.points_in = static_cast<std::int64_t>(cloud.points.size());
  const double now = cloud.stamp;

  // --- point transform & z error count -------------------------------
  auto t0 = Clock::now();
  map.recenter({pose.translation.x(), pose.translation.y()});

  const std::size_t n_in = cloud.points.size();
  std::vector<PointFate> fate(n_in, PointFate::kKept);
  std::vector<Vec3> transformed(n_in);
  const double max_range2 = params.update.max_range * params.update.max_range;
  parallelFor(n_in, params.mode, [&](std::size_t k) {
    const Vec3& p = cloud.points[k];
    if (p.squaredNorm() > max_range2) {
      fate[k] = PointFate::kOutOfRange;
    } else if (isExcluded(p, params.update.exclusion)) {
      fate[k] = PointFate::kExcluded;
    } else {
      transformed[k] = pose.apply(p);
    }
  });

  std::vector<Vec3> pts;          // surviving points, map frame, scan order
  std::vector<double> variances;  // matching sigma_p^2
  pts.reserve(n_in);
  variances.reserve(n_in);
  for (std::size_t k = 0; k < n_in; ++k) {
    switch (fate[k]) {
      case PointFate::kOutOfRange: ++stats.points_out_of_range; break;
      case PointFate::kExcluded: ++stats.points_excluded; break;
      case PointFate::kKept:
        pts.push_back(transformed[k]);
        variances.push_back(pointVariance(cloud.points[k].norm(), params.update.noise));
        break;
    }
  }

  DriftEstimate drift_estimate;
  if (params.drift.enabled) drift_estimate = computeDriftError(map, pts, params.drift);
  stats.t_transform_and_error = secondsSince(t0);

  // --- drift compensation ---------------------------------------------
  t0 = Clock::now();
  if (params.drift.enabled && drift_estimate.n >= params.drift.min_points) {
    const OffsetReport report =
        applyHeightOffset(map, drift_estimate.mean_error, params.drift.max_offset_per_scan);
    stats.drift_offset_applied = report.applied;
    stats.drift_clamped = report.clamped;
    stats.drift_points_used = drift_estimate.n;
  }
  stats.t_drift = secondsSince(t0);

  // --- height update & ray casting ------------------------------------
  t0 = Clock::now();
  precountScan(map, pts);

  const std::size_t n_pts = pts.size();
  std::vector<std::int64_t> point_cell(n_pts, -1);
  for (std::size_t k = 0; k < n_pts; ++k) {
    const auto idx = map.indexAt({pts[k].x(), pts[k].y()});
    if (idx) point_cell[k] = static_cast<std::int64_t>(map.linearIndex(*idx));
    else ++stats.points_out_of_map;
  }

  std::vector<std::uint8_t> fused_this_scan(map.cellCount(), 0);
  const auto fuseOne = [&](std::size_t k) -> Disposition {
    const std::size_t i = static_cast<std::size_t>(point_cell[k]);
    const double p_z = pts[k].z();
    double h;
    double sigma_m2;
    if (map.isValid(i)) {
      h = map.elevation[i];
      sigma_m2 = map.variance[i];
    } else {
      // First passing point initializes the cell.
      h = p_z;
      sigma_m2 = params.update.sigma_init2;
    }
    const CellUpdate result = kalmanUpdateCell(h, sigma_m2, p_z, variances[k],
                                               map.scan_point_count[i], params.update);
    switch (result.disposition) {
      case Disposition::kFused:
        map.setEstimate(i, result.height, result.variance, now);
        fused_this_scan[i] = 1;
        break;
      case Disposition::kOutlier:
        if (map.isValid(i)) map.variance[i] = result.variance;
        break;
      case Disposition::kIgnoredLow:
        break;
    }
    return result.disposition;
  };

  if (params.mode == ExecMode::kDeterministic) {
    for (std::size_t k = 0; k < n_pts; ++k) {
      if (point_cell[k] < 0) continue;
      switch (fuseOne(k)) {
        case Disposition::kFused: ++stats.points_fused; break;
        case Disposition::kOutlier: ++stats.points_rejected_outlier; break;
        case Disposition::kIgnoredLow: ++stats.points_ignored_low; break;
      }
    }
  } else {
    // Per-cell spinlocks serialize updates that share a cell; in-cell order
    // is then scheduling-dependent, which reassociates Eq. fusion within
    // floating-point tolerance but never races.
    std::vector<std::atomic_flag> locks(map.cellCount());
    std::atomic<std::int64_t> fused{0}, outlier{0}, ignored{0};
    parallelFor(n_pts, params.mode, [&](std::size_t k) {
      if (point_cell[k] < 0) return;
      auto& lock = locks[static_cast<std::size_t>(point_cell[k])];
      while (lock.test_and_set(std::memory_order_acquire)) {}
      const Disposition d = fuseOne(k);
      lock.clear(std::memory_order_release);
      switch (d) {
        case Disposition::kFused: ++fused; break;
        case Disposition::kOutlier: ++outlier; break;
        case Disposition::kIgnoredLow: ++ignored; break;
      }
    });
    stats.points_fused = fused.load();
    stats.points_rejected_outlier = outlier.load();
    stats.points_ignored_low = ignored.load();
  }
  stats.cells_updated = std::count(fused_this_scan.begin(), fused_this_scan.end(), 1);

  if (params.cleanup.cleanup_enabled || params.cleanup.upper_bound_enabled) {
    // Runs after the fusion loop, so every cell fused this scan carries
    // last_update == now and the staleness gate protects it. Cells whose
    // points were all rejected stay removable, which is what lets stale
    // obstacle remnants fall to the rays that now pass through them.
    const Vec3 origin = pose.translation;
    std::atomic<std::int64_t> removed_count{0};
    parallelFor(n_pts, params.mode, [&](std::size_t k) {
      const auto traversed = traverseCells(origin, pts[k], map.spec());
      if (traversed.empty()) return;
      if (params.cleanup.cleanup_enabled) {
        const Vec3 dir = (pts[k] - origin).normalized();
        const auto removed =
            visibilityCleanupOnTraversed(map, traversed, dir, params.cleanup, now);
        removed_count += static_cast<std::int64_t>(removed.size());
      }
      if (params.cleanup.upper_bound_enabled) updateUpperBound(map, traversed);
    });
    stats.cells_removed_by_cleanup = removed_count.load();
  }
  stats.t_update_and_raycast = secondsSince(t0);

  // --- overlap clearance -----------------------------------------------
  t0 = Clock::now();
  if (params.overlap.enabled) {
    stats.cells_cleared_by_overlap =
        static_cast<std::int64_t>(overlapClearance(map, pose.translation, params.overlap).size());
  }
  stats.t_overlap = secondsSince(t0);

  // --- normal calculation ----------------------------------------------
  t0 = Clock::now();
  computeNormals(map);
  stats.t_normals = secondsSince(t0);

  // --- traversability ----------------------------------------------------
  t0 = Clock::now();
  if (params.use_convnet_traversability) {
    map.traversability = convFilterInference(map.elevation, map.valid_, map.width(),
                                             map.height(), params.convnet);
  } else {
    traversabilityGeometric(map, params.traversability);
  }
  stats.t_traversability = secondsSince(t0);

  // Cells the scan did not touch grow stale; fold the bookkeeping into the
  // update phase's time budget.
  t0 = Clock::now();
  std::vector<std::uint8_t> updated(map.cellCount(), 0);
  for (std::size_t i = 0; i < updated.size(); ++i) updated[i] = map.scan_point_count[i] > 0;
  map.addTimeVariance(dt_since_last_scan, params.update.sigma_t2, params.update.sigma_max2,
                      params.update.nominal_update_period, updated);
  stats.t_update_and_raycast += secondsSince(t0);

  return stats;
}

}  // namespace relief
