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

#ifndef RELIEF_CORE_RUNNER_HPP
#define RELIEF_CORE_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relief/core/config.hpp"
#include "relief/core/integration.hpp"

namespace relief {

struct RunSummary {
  int scans_processed = 0;
  int scans_skipped = 0;  // replay scans without a pose
  int snapshots_written = 0;
  std::string stats_csv_path;
  std::string final_snapshot_path;
};

/// Renders the configured scene along the trajectory and feeds each scan
/// through the pipeline. Snapshots go to `<out_dir>/snapshot_NNNNN.relief`
/// every publish_every scans, per-scan stats to `<out_dir>/stats.csv`, and
/// the final state to `<out_dir>/final.relief`.
RunSummary runSimulate(const RunConfig& config, const std::string& out_dir);

/// Replays recorded scans. Cloud CSVs are processed in the given order; row
/// k of the poses CSV (time,tx,ty,tz,qw,qx,qy,qz) poses scan k. Scans
/// without a pose row are skipped and counted.
RunSummary runReplay(const RunConfig& config, const std::vector<std::string>& cloud_paths,
                     const std::string& poses_path, const std::string& out_dir);

struct BenchRow {
  std::size_t n_points = 0;
  // median seconds per phase, benchmark taxonomy order plus total
  std::array<double, 7> phase_seconds{};
};

/// Integrates synthetic scans of exactly the requested point counts,
/// `repetitions` times each, and reports per-phase median seconds. Writes
/// a CSV whose columns follow the benchmark phase taxonomy.
std::vector<BenchRow> runBench(const RunConfig& config, const std::vector<std::size_t>& counts,
                               int repetitions, const std::string& out_csv);

enum class ExportFormat { kCsv, kPgm };

/// Writes one snapshot layer as CSV (raw values, `nan` for invalid) or
/// 16-bit PGM (linear min-max scaling recorded in a comment, invalid = 0).
void runExport(const std::string& snapshot_path, const std::string& layer, ExportFormat format,
               const std::string& out_path);

/// Loads a snapshot, segments planes, writes the region document. Normals
/// are computed when the snapshot carries none.
std::size_t runSegment(const std::string& snapshot_path, const PlaneSegParams& params,
                       const std::string& out_path);

/// Point cloud CSV (`x,y,z` header); pose CSV sidecar rows.
std::vector<Vec3> loadCloudCsv(const std::string& path);
struct TimedPose {
  double time = 0.0;
  RigidTransform pose;
};
std::vector<TimedPose> loadPosesCsv(const std::string& path);

void writeStatsCsvHeader(std::ostream& out);
void writeStatsCsvRow(std::ostream& out, int scan, double stamp, const ScanStats& stats,
                      bool skipped_missing_pose);

}  // namespace relief

#endif  // RELIEF_CORE_RUNNER_HPP
