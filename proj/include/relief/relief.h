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

/* C interface of the reliefmap engine. Handles are opaque; every call that
 * can fail returns a relief_status, with a human-readable message available
 * from relief_last_error() (thread local). */

#ifndef RELIEF_H
#define RELIEF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RELIEF_API __declspec(dllexport)
#else
#define RELIEF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum relief_status {
  RELIEF_OK = 0,
  RELIEF_ERROR_USAGE = 1,
  RELIEF_ERROR_DATA = 2,
  RELIEF_ERROR_OUT_OF_MAP = 3,
  RELIEF_ERROR_INVALID_POSE = 4,
  RELIEF_ERROR_INVALID_VARIANCE = 5,
  RELIEF_ERROR_INVALID_MODEL = 6,
  RELIEF_ERROR_DEGENERATE_PLANE = 7,
  RELIEF_ERROR_NOTHING_TO_INPAINT = 8,
  RELIEF_ERROR_OUT_OF_TRAJECTORY = 9,
  RELIEF_ERROR_PARSE = 10,
  RELIEF_ERROR_IO = 11
} relief_status;

typedef struct relief_config relief_config; /* run configuration, opaque */
typedef struct relief_map relief_map;       /* elevation map, opaque */

/* Message describing the most recent failure on this thread. */
RELIEF_API const char* relief_last_error(void);
RELIEF_API const char* relief_version(void);

/* ---- configuration ---------------------------------------------------- */

RELIEF_API relief_config* relief_config_default(void);
RELIEF_API relief_config* relief_config_load(const char* path);
RELIEF_API void relief_config_free(relief_config* config);
/* mode is "det" or "par" */
RELIEF_API relief_status relief_config_set_mode(relief_config* config, const char* mode);
RELIEF_API relief_status relief_config_set_seed(relief_config* config, uint64_t seed);

/* ---- map lifecycle ----------------------------------------------------- */

RELIEF_API relief_map* relief_map_create(double resolution, int width, int height,
                                         double center_x, double center_y);
RELIEF_API relief_map* relief_map_load(const char* path);
RELIEF_API relief_status relief_map_save(const relief_map* map, const char* path);
RELIEF_API void relief_map_free(relief_map* map);

RELIEF_API int relief_map_width(const relief_map* map);
RELIEF_API int relief_map_height(const relief_map* map);
RELIEF_API double relief_map_resolution(const relief_map* map);
RELIEF_API relief_status relief_map_center(const relief_map* map, double* x, double* y);

/* Copies one layer into out (width*height doubles, row-major); cells
 * without data are NaN. Unknown layer names list the available layers in
 * relief_last_error(). */
RELIEF_API relief_status relief_map_layer(const relief_map* map, const char* layer, double* out,
                                          size_t capacity);

/* ---- scan integration -------------------------------------------------- */

typedef struct relief_scan_stats {
  int64_t points_in;
  int64_t points_excluded;
  int64_t points_out_of_range;
  int64_t points_out_of_map;
  int64_t points_rejected_outlier;
  int64_t points_ignored_low;
  int64_t points_fused;
  int64_t cells_updated;
  int64_t cells_removed_by_cleanup;
  int64_t cells_cleared_by_overlap;
  double drift_offset_applied;
  double total_seconds;
} relief_scan_stats;

/* Fuses one scan. xyz packs n_points sensor-frame points [x y z ...];
 * pose is a row-major 3x4 [R | t] taking sensor coordinates to the map
 * frame; stamp is seconds. config may be NULL for defaults. stats_out may
 * be NULL. */
RELIEF_API relief_status relief_map_integrate(relief_map* map, const relief_config* config,
                                              const double* xyz, size_t n_points,
                                              const double pose[12], double stamp,
                                              relief_scan_stats* stats_out);

/* ---- batch runners (the CLI surface) ----------------------------------- */

RELIEF_API relief_status relief_run_simulate(const char* config_path, const char* out_dir,
                                             uint64_t seed, int has_seed, const char* mode);
RELIEF_API relief_status relief_run_replay(const char* config_path,
                                           const char* const* cloud_paths, size_t n_clouds,
                                           const char* poses_path, const char* out_dir,
                                           const char* mode);
RELIEF_API relief_status relief_run_bench(const char* config_path, const size_t* counts,
                                          size_t n_counts, int repetitions, const char* out_csv,
                                          const char* mode);
/* format is "csv" or "pgm" */
RELIEF_API relief_status relief_run_export(const char* snapshot_path, const char* layer,
                                           const char* format, const char* out_path);
/* config_path may be NULL for default segmentation parameters */
RELIEF_API relief_status relief_run_segment(const char* snapshot_path, const char* config_path,
                                            const char* out_path, size_t* n_regions_out);

#ifdef __cplusplus
}
#endif

#endif /* RELIEF_H */
