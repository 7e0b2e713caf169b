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

#include "relief/relief.h"

#include <cstring>
#include <string>

#include "relief/core/config.hpp"
#include "relief/core/integration.hpp"
#include "relief/core/runner.hpp"
#include "relief/core/snapshot.hpp"

struct relief_config {
  relief::RunConfig config;
};

struct relief_map {
  explicit relief_map(const relief::GridSpec& spec) : map(spec) {}
  explicit relief_map(relief::ElevationMap&& m) : map(std::move(m)) {}
  relief::ElevationMap map;
  double last_stamp = 0.0;
  bool has_last = false;
};

namespace {

thread_local std::string g_last_error;

relief_status statusFor(relief::ErrorCode code) {
  using relief::ErrorCode;
  switch (code) {
    case ErrorCode::kOutOfMap: return RELIEF_ERROR_OUT_OF_MAP;
    case ErrorCode::kInvalidPose: return RELIEF_ERROR_INVALID_POSE;
    case ErrorCode::kInvalidVariance: return RELIEF_ERROR_INVALID_VARIANCE;
    case ErrorCode::kInvalidModel: return RELIEF_ERROR_INVALID_MODEL;
    case ErrorCode::kDegeneratePlane: return RELIEF_ERROR_DEGENERATE_PLANE;
    case ErrorCode::kNothingToInpaint: return RELIEF_ERROR_NOTHING_TO_INPAINT;
    case ErrorCode::kOutOfTrajectory: return RELIEF_ERROR_OUT_OF_TRAJECTORY;
    case ErrorCode::kParseError: return RELIEF_ERROR_PARSE;
    case ErrorCode::kIoError: return RELIEF_ERROR_IO;
    case ErrorCode::kInvalidArgument: return RELIEF_ERROR_USAGE;
  }
  return RELIEF_ERROR_DATA;
}

template <typename Fn>
relief_status guarded(Fn&& fn) {
  try {
    fn();
    return RELIEF_OK;
  } catch (const relief::Error& e) {
    g_last_error = e.what();
    return statusFor(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RELIEF_ERROR_DATA;
  }
}

template <typename T, typename Fn>
T* guardedCreate(Fn&& fn) {
  try {
    return fn();
  } catch (const relief::Error& e) {
    g_last_error = e.what();
    return nullptr;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

relief_status parseMode(const char* mode, relief::ExecMode& out) {
  if (mode == nullptr) return RELIEF_OK;
  const std::string m = mode;
  if (m == "det" || m == "deterministic") out = relief::ExecMode::kDeterministic;
  else if (m == "par" || m == "parallel") out = relief::ExecMode::kParallel;
  else {
    g_last_error = "mode must be det or par";
    return RELIEF_ERROR_USAGE;
  }
  return RELIEF_OK;
}

relief::RunConfig loadOrDefault(const char* config_path) {
  if (config_path == nullptr) return relief::RunConfig{};
  return relief::loadRunConfigFile(config_path);
}

}  // namespace

extern "C" {

const char* relief_last_error(void) { return g_last_error.c_str(); }

const char* relief_version(void) { return "reliefmap 1.0.0"; }

relief_config* relief_config_default(void) {
  return guardedCreate<relief_config>([] { return new relief_config{relief::RunConfig{}}; });
}

relief_config* relief_config_load(const char* path) {
  if (path == nullptr) {
    g_last_error = "config path is null";
    return nullptr;
  }
  return guardedCreate<relief_config>(
      [&] { return new relief_config{relief::loadRunConfigFile(path)}; });
}

void relief_config_free(relief_config* config) { delete config; }

relief_status relief_config_set_mode(relief_config* config, const char* mode) {
  if (config == nullptr) {
    g_last_error = "config handle is null";
    return RELIEF_ERROR_USAGE;
  }
  return parseMode(mode, config->config.pipeline.mode);
}

relief_status relief_config_set_seed(relief_config* config, uint64_t seed) {
  if (config == nullptr) {
    g_last_error = "config handle is null";
    return RELIEF_ERROR_USAGE;
  }
  config->config.seed = seed;
  return RELIEF_OK;
}

relief_map* relief_map_create(double resolution, int width, int height, double center_x,
                              double center_y) {
  return guardedCreate<relief_map>([&] {
    relief::GridSpec spec;
    spec.resolution = resolution;
    spec.width = width;
    spec.height = height;
    spec.center = {center_x, center_y};
    spec.validate();
    return new relief_map(spec);
  });
}

relief_map* relief_map_load(const char* path) {
  if (path == nullptr) {
    g_last_error = "snapshot path is null";
    return nullptr;
  }
  return guardedCreate<relief_map>(
      [&] { return new relief_map(relief::loadSnapshotFile(path)); });
}

relief_status relief_map_save(const relief_map* map, const char* path) {
  if (map == nullptr || path == nullptr) {
    g_last_error = "map handle or path is null";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] { relief::saveSnapshotFile(map->map, path); });
}

void relief_map_free(relief_map* map) { delete map; }

int relief_map_width(const relief_map* map) { return map ? map->map.width() : 0; }
int relief_map_height(const relief_map* map) { return map ? map->map.height() : 0; }
double relief_map_resolution(const relief_map* map) {
  return map ? map->map.resolution() : 0.0;
}

relief_status relief_map_center(const relief_map* map, double* x, double* y) {
  if (map == nullptr || x == nullptr || y == nullptr) {
    g_last_error = "null argument";
    return RELIEF_ERROR_USAGE;
  }
  *x = map->map.spec().center.x();
  *y = map->map.spec().center.y();
  return RELIEF_OK;
}

relief_status relief_map_layer(const relief_map* map, const char* layer, double* out,
                               size_t capacity) {
  if (map == nullptr || layer == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return RELIEF_ERROR_USAGE;
  }
  if (capacity < map->map.cellCount()) {
    g_last_error = "output buffer too small";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] {
    const std::vector<double> values = relief::layerValues(map->map, layer);
    std::memcpy(out, values.data(), values.size() * sizeof(double));
  });
}

relief_status relief_map_integrate(relief_map* map, const relief_config* config,
                                   const double* xyz, size_t n_points, const double pose[12],
                                   double stamp, relief_scan_stats* stats_out) {
  if (map == nullptr || pose == nullptr || (xyz == nullptr && n_points > 0)) {
    g_last_error = "null argument";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] {
    relief::PointCloud cloud;
    cloud.stamp = stamp;
    cloud.points.reserve(n_points);
    for (size_t k = 0; k < n_points; ++k)
      cloud.points.emplace_back(xyz[3 * k], xyz[3 * k + 1], xyz[3 * k + 2]);

    relief::RigidTransform rt;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) rt.rotation(r, c) = pose[4 * r + c];
      rt.translation(r) = pose[4 * r + 3];
    }

    const relief::PipelineParams params =
        config ? config->config.pipeline : relief::PipelineParams{};
    const double dt = map->has_last ? std::max(0.0, stamp - map->last_stamp) : 0.0;
    const relief::ScanStats stats =
        relief::integrateScan(map->map, cloud, rt, params, dt);
    map->last_stamp = stamp;
    map->has_last = true;

    if (stats_out != nullptr) {
      stats_out->points_in = stats.points_in;
      stats_out->points_excluded = stats.points_excluded;
      stats_out->points_out_of_range = stats.points_out_of_range;
      stats_out->points_out_of_map = stats.points_out_of_map;
      stats_out->points_rejected_outlier = stats.points_rejected_outlier;
      stats_out->points_ignored_low = stats.points_ignored_low;
      stats_out->points_fused = stats.points_fused;
      stats_out->cells_updated = stats.cells_updated;
      stats_out->cells_removed_by_cleanup = stats.cells_removed_by_cleanup;
      stats_out->cells_cleared_by_overlap = stats.cells_cleared_by_overlap;
      stats_out->drift_offset_applied = stats.drift_offset_applied;
      stats_out->total_seconds = stats.totalTime();
    }
  });
}

relief_status relief_run_simulate(const char* config_path, const char* out_dir, uint64_t seed,
                                  int has_seed, const char* mode) {
  if (config_path == nullptr || out_dir == nullptr) {
    g_last_error = "config path and output directory are required";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] {
    relief::RunConfig config = relief::loadRunConfigFile(config_path);
    if (has_seed) config.seed = seed;
    relief::ExecMode m = config.pipeline.mode;
    if (parseMode(mode, m) != RELIEF_OK) throw relief::Error(relief::ErrorCode::kInvalidArgument, g_last_error);
    config.pipeline.mode = m;
    relief::runSimulate(config, out_dir);
  });
}

relief_status relief_run_replay(const char* config_path, const char* const* cloud_paths,
                                size_t n_clouds, const char* poses_path, const char* out_dir,
                                const char* mode) {
  if (config_path == nullptr || poses_path == nullptr || out_dir == nullptr ||
      (cloud_paths == nullptr && n_clouds > 0)) {
    g_last_error = "config, poses, clouds and output directory are required";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] {
    relief::RunConfig config = relief::loadRunConfigFile(config_path);
    relief::ExecMode m = config.pipeline.mode;
    if (parseMode(mode, m) != RELIEF_OK) throw relief::Error(relief::ErrorCode::kInvalidArgument, g_last_error);
    config.pipeline.mode = m;
    std::vector<std::string> clouds(cloud_paths, cloud_paths + n_clouds);
    relief::runReplay(config, clouds, poses_path, out_dir);
  });
}

relief_status relief_run_bench(const char* config_path, const size_t* counts, size_t n_counts,
                               int repetitions, const char* out_csv, const char* mode) {
  if (config_path == nullptr || counts == nullptr || n_counts == 0 || out_csv == nullptr) {
    g_last_error = "config, point counts and output CSV are required";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] {
    relief::RunConfig config = relief::loadRunConfigFile(config_path);
    relief::ExecMode m = config.pipeline.mode;
    if (parseMode(mode, m) != RELIEF_OK) throw relief::Error(relief::ErrorCode::kInvalidArgument, g_last_error);
    config.pipeline.mode = m;
    relief::runBench(config, std::vector<std::size_t>(counts, counts + n_counts), repetitions,
                     out_csv);
  });
}

relief_status relief_run_export(const char* snapshot_path, const char* layer, const char* format,
                                const char* out_path) {
  if (snapshot_path == nullptr || layer == nullptr || format == nullptr || out_path == nullptr) {
    g_last_error = "snapshot, layer, format and output path are required";
    return RELIEF_ERROR_USAGE;
  }
  const std::string f = format;
  relief::ExportFormat fmt;
  if (f == "csv") fmt = relief::ExportFormat::kCsv;
  else if (f == "pgm") fmt = relief::ExportFormat::kPgm;
  else {
    g_last_error = "format must be csv or pgm";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] { relief::runExport(snapshot_path, layer, fmt, out_path); });
}

relief_status relief_run_segment(const char* snapshot_path, const char* config_path,
                                 const char* out_path, size_t* n_regions_out) {
  if (snapshot_path == nullptr || out_path == nullptr) {
    g_last_error = "snapshot and output path are required";
    return RELIEF_ERROR_USAGE;
  }
  return guarded([&] {
    relief::PlaneSegParams params;
    if (config_path != nullptr) params = relief::loadRunConfigFile(config_path).segmentation;
    const std::size_t n = relief::runSegment(snapshot_path, params, out_path);
    if (n_regions_out != nullptr) *n_regions_out = n;
  });
}

}  // extern "C"
