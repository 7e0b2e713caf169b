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

#include "relief/core/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relief/core/analysis.hpp"
#include "relief/core/postprocess.hpp"
#include "relief/core/rng.hpp"
#include "relief/core/snapshot.hpp"

namespace relief {

namespace {

std::string formatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string snapshotName(const std::string& out_dir, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%05d.relief", index);
  return out_dir + "/" + buf;
}

void ensureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create directory: " + dir);
}

PipelineParams preparePipeline(const RunConfig& config) {
  PipelineParams params = config.pipeline;
  if (params.use_convnet_traversability && params.convnet.layers.empty()) {
    if (config.convnet_path.empty())
      throw Error(ErrorCode::kInvalidArgument, "convnet traversability requested without a model");
    params.convnet = loadConvNetSpecFile(config.convnet_path);
  }
  return params;
}

}  // namespace

void writeStatsCsvHeader(std::ostream& out) {
  out << "scan,stamp,points_in,points_excluded,points_out_of_range,points_out_of_map,"
         "points_rejected_outlier,points_ignored_low,points_fused,cells_updated,"
         "cells_removed_by_cleanup,cells_cleared_by_overlap,drift_offset_applied,"
         "drift_clamped,drift_points_used,skipped_missing_pose";
  for (const char* label : ScanStats::kPhaseLabels) out << ',' << label;
  out << '\n';
}

void writeStatsCsvRow(std::ostream& out, int scan, double stamp, const ScanStats& stats,
                      bool skipped_missing_pose) {
  out << scan << ',' << formatDouble(stamp) << ',' << stats.points_in << ','
      << stats.points_excluded << ',' << stats.points_out_of_range << ','
      << stats.points_out_of_map << ',' << stats.points_rejected_outlier << ','
      << stats.points_ignored_low << ',' << stats.points_fused << ',' << stats.cells_updated
      << ',' << stats.cells_removed_by_cleanup << ',' << stats.cells_cleared_by_overlap << ','
      << formatDouble(stats.drift_offset_applied) << ',' << (stats.drift_clamped ? 1 : 0) << ','
      << stats.drift_points_used << ',' << (skipped_missing_pose ? 1 : 0);
  for (const double v : stats.phaseSeconds()) out << ',' << formatDouble(v);
  out << '\n';
}

RunSummary runSimulate(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  config.trajectory.validate();
  ensureDir(out_dir);
  RunSummary summary;

  MappingPipeline pipeline(config.map, preparePipeline(config));
  std::ofstream stats_out(out_dir + "/stats.csv");
  if (!stats_out) throw Error(ErrorCode::kIoError, "cannot write stats.csv in " + out_dir);
  writeStatsCsvHeader(stats_out);

  const double t_start = config.trajectory.waypoints.front().time;
  for (int s = 0; s < config.scans; ++s) {
    const double time = t_start + s / config.sensor.rate;
    const PoseSample poses = poseAt(config.trajectory, time);
    const PointCloud cloud =
        renderScan(config.scene, poses.true_pose, config.sensor, time, config.seed,
                   static_cast<std::uint64_t>(s));
    // The pipeline sees the drifting estimate, not ground truth.
    const ScanStats stats = pipeline.integrate(cloud, poses.estimated_pose);
    writeStatsCsvRow(stats_out, s, time, stats, false);
    if ((s + 1) % config.publish_every == 0) {
      saveSnapshotFile(pipeline.map(), snapshotName(out_dir, s + 1));
      ++summary.snapshots_written;
    }
    ++summary.scans_processed;
  }

  summary.final_snapshot_path = out_dir + "/final.relief";
  saveSnapshotFile(pipeline.map(), summary.final_snapshot_path);
  summary.stats_csv_path = out_dir + "/stats.csv";
  return summary;
}

std::vector<Vec3> loadCloudCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open cloud: " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw Error(ErrorCode::kParseError, path + ": empty cloud file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z")
    throw Error(ErrorCode::kParseError, path + " line 1: expected header 'x,y,z'");
  std::vector<Vec3> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    Vec3 p;
    char comma1, comma2;
    std::istringstream row(line);
    if (!(row >> p.x() >> comma1 >> p.y() >> comma2 >> p.z()) || comma1 != ',' || comma2 != ',')
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": expected 'x,y,z' row");
    if (!p.allFinite())
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": non-finite coordinate");
    points.push_back(p);
  }
  return points;
}

std::vector<TimedPose> loadPosesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open poses: " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, path + ": empty poses file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time,tx,ty,tz,qw,qx,qy,qz")
    throw Error(ErrorCode::kParseError,
                path + " line 1: expected header 'time,tx,ty,tz,qw,qx,qy,qz'");
  std::vector<TimedPose> poses;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    TimedPose tp;
    double qw, qx, qy, qz;
    if (!(row >> tp.time >> tp.pose.translation.x() >> tp.pose.translation.y() >>
          tp.pose.translation.z() >> qw >> qx >> qy >> qz))
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": expected 8 values");
    Eigen::Quaterniond q(qw, qx, qy, qz);
    if (std::abs(q.norm() - 1.0) > 1e-6)
      throw Error(ErrorCode::kParseError, path + " line " + std::to_string(line_no) +
                                              ": quaternion is not normalized");
    q.normalize();
    tp.pose.rotation = q.toRotationMatrix();
    poses.push_back(tp);
  }
  return poses;
}

RunSummary runReplay(const RunConfig& config, const std::vector<std::string>& cloud_paths,
                     const std::string& poses_path, const std::string& out_dir) {
  config.validate();
  ensureDir(out_dir);
  RunSummary summary;

  const std::vector<TimedPose> poses = loadPosesCsv(poses_path);
  MappingPipeline pipeline(config.map, preparePipeline(config));
  std::ofstream stats_out(out_dir + "/stats.csv");
  if (!stats_out) throw Error(ErrorCode::kIoError, "cannot write stats.csv in " + out_dir);
  writeStatsCsvHeader(stats_out);

  for (std::size_t k = 0; k < cloud_paths.size(); ++k) {
    const int scan = static_cast<int>(k);
    if (k >= poses.size()) {
      writeStatsCsvRow(stats_out, scan, 0.0, ScanStats{}, true);
      ++summary.scans_skipped;
      continue;
    }
    PointCloud cloud;
    cloud.points = loadCloudCsv(cloud_paths[k]);
    cloud.stamp = poses[k].time;
    const ScanStats stats = pipeline.integrate(cloud, poses[k].pose);
    writeStatsCsvRow(stats_out, scan, cloud.stamp, stats, false);
    ++summary.scans_processed;
    if ((summary.scans_processed % config.publish_every) == 0) {
      saveSnapshotFile(pipeline.map(), snapshotName(out_dir, summary.scans_processed));
      ++summary.snapshots_written;
    }
  }

  summary.final_snapshot_path = out_dir + "/final.relief";
  saveSnapshotFile(pipeline.map(), summary.final_snapshot_path);
  summary.stats_csv_path = out_dir + "/stats.csv";
  return summary;
}

std::vector<BenchRow> runBench(const RunConfig& config, const std::vector<std::size_t>& counts,
                               int repetitions, const std::string& out_csv) {
  config.validate();
  if (repetitions < 1) throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");

  // Reference scan with the configured sensor over the configured scene;
  // benchmark clouds resample it to the exact requested point counts.
  Scene scene = config.scene;
  if (!scene.hasGround() && scene.solids().empty()) scene.addGround(0.0);
  RigidTransform pose;
  pose.translation = {0.0, 0.0, 1.0};
  if (!config.trajectory.waypoints.empty()) {
    const PoseSample sample = poseAt(config.trajectory, config.trajectory.waypoints.front().time);
    pose = sample.true_pose;
  }
  const PointCloud reference_scan = renderScan(scene, pose, config.sensor, 0.0, config.seed, 0);
  if (reference_scan.points.empty())
    throw Error(ErrorCode::kInvalidArgument, "benchmark scene yields no returns");

  std::vector<BenchRow> rows;
  for (const std::size_t count : counts) {
    Rng rng(Rng::mix(config.seed, count));
    PointCloud cloud;
    cloud.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t pick = rng.nextU64() % reference_scan.points.size();
      cloud.points.push_back(reference_scan.points[pick]);
    }

    MappingPipeline pipeline(config.map, preparePipeline(config));
    {
      // Warm start on a fully mapped grid: one untimed synthetic scan with a
      // point at every cell center, so the per-cell phases measure their
      // real mission cost rather than an empty map.
      PointCloud fill;
      fill.stamp = -1.0;
      fill.points.reserve(pipeline.map().cellCount());
      const Mat3 to_sensor = pose.rotation.transpose();
      for (int r = 0; r < config.map.height; ++r) {
        for (int c = 0; c < config.map.width; ++c) {
          const Vec2 xy = pipeline.map().indexToWorld({r, c});
          fill.points.push_back(to_sensor * (Vec3{xy.x(), xy.y(), 0.0} - pose.translation));
        }
      }
      pipeline.integrate(fill, pose);
    }

    std::vector<std::array<double, 7>> samples;
    samples.reserve(static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
      cloud.stamp = rep / config.sensor.rate;
      const ScanStats stats = pipeline.integrate(cloud, pose);
      samples.push_back(stats.phaseSeconds());
    }
    BenchRow row;
    row.n_points = count;
    for (std::size_t phase = 0; phase < row.phase_seconds.size(); ++phase) {
      std::vector<double> values;
      values.reserve(samples.size());
      for (const auto& s : samples) values.push_back(s[phase]);
      std::sort(values.begin(), values.end());
      row.phase_seconds[phase] = values[values.size() / 2];
    }
    rows.push_back(row);
  }

  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_csv);
    out << "number of points";
    for (const char* label : ScanStats::kPhaseLabels) out << ',' << label;
    out << '\n';
    for (const BenchRow& row : rows) {
      out << row.n_points;
      for (const double v : row.phase_seconds) out << ',' << formatDouble(v);
      out << '\n';
    }
  }
  return rows;
}

void runExport(const std::string& snapshot_path, const std::string& layer, ExportFormat format,
               const std::string& out_path) {
  const ElevationMap map = loadSnapshotFile(snapshot_path);
  const std::vector<double> values = layerValues(map, layer);
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_path);

  if (format == ExportFormat::kCsv) {
    for (int r = 0; r < map.height(); ++r) {
      for (int c = 0; c < map.width(); ++c) {
        const double v = values[static_cast<std::size_t>(r) * map.width() + c];
        if (c) out << ',';
        if (std::isnan(v)) out << "nan";
        else out << formatDouble(v);
      }
      out << '\n';
    }
    return;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double v : values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 0.0;
  }
  out << "P2\n";
  out << "# scale min " << formatDouble(lo) << " max " << formatDouble(hi)
      << " invalid 0\n";
  out << map.width() << " " << map.height() << "\n65535\n";
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const double v = values[static_cast<std::size_t>(r) * map.width() + c];
      int gray = 0;
      if (!std::isnan(v)) gray = hi > lo ? static_cast<int>(std::lround((v - lo) / (hi - lo) * 65535.0)) : 65535;
      if (c) out << ' ';
      out << gray;
    }
    out << '\n';
  }
}

std::size_t runSegment(const std::string& snapshot_path, const PlaneSegParams& params,
                       const std::string& out_path) {
  ElevationMap map = loadSnapshotFile(snapshot_path);
  bool any_normal = false;
  for (std::size_t i = 0; i < map.cellCount() && !any_normal; ++i)
    any_normal = map.isValid(i) && map.hasNormal(i);
  if (!any_normal) computeNormals(map);

  const std::vector<PlanarRegion> regions = segmentPlanes(map, params);
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  writeRegions(regions, out);
  return regions.size();
}

}  // namespace relief
