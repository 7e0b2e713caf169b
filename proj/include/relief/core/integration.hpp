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

#ifndef RELIEF_CORE_INTEGRATION_HPP
#define RELIEF_CORE_INTEGRATION_HPP

#include <array>
#include <string>
#include <vector>

#include "relief/core/analysis.hpp"
#include "relief/core/drift.hpp"
#include "relief/core/grid.hpp"
#include "relief/core/raycast.hpp"
#include "relief/core/sensing.hpp"
#include "relief/core/types.hpp"

namespace relief {

struct UpdateParams {
  double mahalanobis_threshold = 2.5;
  double sigma_outlier2 = 0.01;   // variance inflation on rejection
  int wall_count_threshold = 5;   // per-cell point count enabling the wall rule
  double sigma_t2 = 0.01;         // time variance per nominal period
  double sigma_max2 = 100.0;
  double sigma_init2 = 100.0;     // fresh-cell prior variance
  double nominal_update_period = 0.1;  // seconds
  double max_range = 10.0;        // meters, points beyond are dropped
  SensorNoiseParams noise;
  ExclusionParams exclusion;

  void validate() const {
    if (mahalanobis_threshold <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "mahalanobis_threshold must be > 0");
    if (wall_count_threshold < 1)
      throw Error(ErrorCode::kInvalidArgument, "wall_count_threshold must be >= 1");
  }
};

/// Everything integrateScan needs, in pipeline order.
struct PipelineParams {
  UpdateParams update;
  DriftParams drift;
  CleanupParams cleanup;
  TraversabilityParams traversability;
  OverlapParams overlap;
  ExecMode mode = ExecMode::kDeterministic;
  bool use_convnet_traversability = false;
  ConvNetSpec convnet;
};

enum class Disposition { kFused, kOutlier, kIgnoredLow };

struct CellUpdate {
  double height = 0.0;
  double variance = 0.0;
  Disposition disposition = Disposition::kFused;
};

/// One measurement against one cell. Gate order: wall rule, then
/// Mahalanobis, then fuse.
///   wall:       cell_count > wall_count_threshold and p_z < h
///               -> IgnoredLow, state unchanged
///   outlier:    |p_z - h| / sqrt(sigma_m2) > threshold
///               -> Outlier, h kept, variance inflated by sigma_outlier2
///   fuse:       h' = (sigma_p2 h + sigma_m2 p_z) / (sigma_m2 + sigma_p2)
///               var' = sigma_m2 sigma_p2 / (sigma_m2 + sigma_p2)
CellUpdate kalmanUpdateCell(double h, double sigma_m2, double p_z, double sigma_p2,
                            int cell_count, const UpdateParams& params);

/// Tallies per-cell point count and max point height into the map's
/// per-scan scratch layers. Out-of-map points are ignored.
void precountScan(ElevationMap& map, const std::vector<Vec3>& points_map_frame);

/// Per-scan accounting. Counters partition the input points:
///   points_in = excluded + out_of_range + out_of_map
///             + rejected_outlier + ignored_low + fused
struct ScanStats {
  std::int64_t points_in = 0;
  std::int64_t points_excluded = 0;
  std::int64_t points_out_of_range = 0;
  std::int64_t points_out_of_map = 0;
  std::int64_t points_rejected_outlier = 0;
  std::int64_t points_ignored_low = 0;
  std::int64_t points_fused = 0;
  std::int64_t cells_updated = 0;
  std::int64_t cells_removed_by_cleanup = 0;
  std::int64_t cells_cleared_by_overlap = 0;
  double drift_offset_applied = 0.0;
  bool drift_clamped = false;
  int drift_points_used = 0;

  // Phase timings in seconds, keyed like the benchmark taxonomy.
  double t_transform_and_error = 0.0;
  double t_drift = 0.0;
  double t_update_and_raycast = 0.0;
  double t_overlap = 0.0;
  double t_traversability = 0.0;
  double t_normals = 0.0;

  double totalTime() const {
    return t_transform_and_error + t_drift + t_update_and_raycast + t_overlap +
           t_traversability + t_normals;
  }

  static constexpr std::array<const char*, 7> kPhaseLabels = {
      "point transform & z error count",
      "drift compensation",
      "height update & ray casting",
      "overlap clearance",
      "traversability",
      "normal calculation",
      "total"};

  std::array<double, 7> phaseSeconds() const {
    return {t_transform_and_error, t_drift,   t_update_and_raycast, t_overlap,
            t_traversability,      t_normals, totalTime()};
  }
};

/// Runs the full per-scan pipeline on the map:
/// recenter, transform + exclusion + range filter, drift compensation,
/// precount, per-point Kalman update, per-point ray casting (cleanup and
/// upper bound), overlap clearance, normals + traversability, and time
/// variance for cells the scan did not touch.
///
/// dt_since_last_scan scales the time-variance growth; pass 0 for the
/// first scan.
ScanStats integrateScan(ElevationMap& map, const PointCloud& cloud, const RigidTransform& pose,
                        const PipelineParams& params, double dt_since_last_scan);

/// Stateful convenience wrapper tracking the inter-scan time delta.
class MappingPipeline {
 public:
  MappingPipeline(const GridSpec& spec, const PipelineParams& params)
      : map_(spec), params_(params) {}

  ScanStats integrate(const PointCloud& cloud, const RigidTransform& pose) {
    const double dt = has_previous_ ? std::max(0.0, cloud.stamp - last_stamp_) : 0.0;
    ScanStats stats = integrateScan(map_, cloud, pose, params_, dt);
    last_stamp_ = cloud.stamp;
    has_previous_ = true;
    return stats;
  }

  ElevationMap& map() { return map_; }
  const ElevationMap& map() const { return map_; }
  const PipelineParams& params() const { return params_; }
  PipelineParams& params() { return params_; }

 private:
  ElevationMap map_;
  PipelineParams params_;
  double last_stamp_ = 0.0;
  bool has_previous_ = false;
};

}  // namespace relief

#endif  // RELIEF_CORE_INTEGRATION_HPP
