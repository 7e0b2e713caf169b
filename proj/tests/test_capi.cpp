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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "relief/relief.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("relief_capi_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Row-major 3x4 [R | t] with identity rotation.
void identityPose(double* pose, double tx, double ty, double tz) {
  for (int i = 0; i < 12; ++i) pose[i] = 0.0;
  pose[0] = pose[5] = pose[10] = 1.0;
  pose[3] = tx;
  pose[7] = ty;
  pose[11] = tz;
}

}  // namespace

TEST_CASE("map handles create, integrate, save, load") {
  relief_map* map = relief_map_create(0.04, 100, 100, 0.0, 0.0);
  REQUIRE(map != nullptr);
  CHECK(relief_map_width(map) == 100);
  CHECK(relief_map_height(map) == 100);
  CHECK(relief_map_resolution(map) == 0.04);

  // Flat ground one meter below the sensor.
  std::vector<double> xyz;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      xyz.push_back(-1.0 + 0.05 * i);
      xyz.push_back(-1.0 + 0.05 * j);
      xyz.push_back(-1.0);
    }
  }
  double pose[12];
  identityPose(pose, 0.0, 0.0, 1.0);

  relief_scan_stats stats{};
  const relief_status status =
      relief_map_integrate(map, nullptr, xyz.data(), xyz.size() / 3, pose, 0.0, &stats);
  REQUIRE(status == RELIEF_OK);
  CHECK(stats.points_in == 1600);
  CHECK(stats.points_fused == 1600);
  CHECK(stats.cells_updated > 0);

  std::vector<double> layer(100 * 100);
  REQUIRE(relief_map_layer(map, "elevation", layer.data(), layer.size()) == RELIEF_OK);
  int valid = 0;
  for (const double v : layer) {
    if (!std::isnan(v)) {
      ++valid;
      CHECK(std::abs(v) < 1e-9);
    }
  }
  CHECK(valid > 0);

  // Unknown layers fail and describe the choices.
  CHECK(relief_map_layer(map, "bogus", layer.data(), layer.size()) != RELIEF_OK);
  CHECK(std::string(relief_last_error()).find("elevation") != std::string::npos);

  TempDir dir;
  const std::string snap = (dir.path / "map.relief").string();
  REQUIRE(relief_map_save(map, snap.c_str()) == RELIEF_OK);
  relief_map* loaded = relief_map_load(snap.c_str());
  REQUIRE(loaded != nullptr);
  CHECK(relief_map_width(loaded) == 100);
  std::vector<double> layer2(100 * 100);
  REQUIRE(relief_map_layer(loaded, "elevation", layer2.data(), layer2.size()) == RELIEF_OK);
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (std::isnan(layer[i])) CHECK(std::isnan(layer2[i]));
    else CHECK(layer[i] == layer2[i]);
  }
  relief_map_free(loaded);
  relief_map_free(map);
}

TEST_CASE("bad inputs produce status codes and messages") {
  CHECK(relief_map_create(-1.0, 10, 10, 0.0, 0.0) == nullptr);
  CHECK(std::string(relief_last_error()).find("resolution") != std::string::npos);

  relief_map* map = relief_map_create(0.1, 10, 10, 0.0, 0.0);
  REQUIRE(map != nullptr);
  double pose[12];
  identityPose(pose, 0.0, 0.0, 0.0);
  pose[0] = 5.0;  // not orthonormal
  const double xyz[3] = {0.0, 0.0, 0.0};
  CHECK(relief_map_integrate(map, nullptr, xyz, 1, pose, 0.0, nullptr) ==
        RELIEF_ERROR_INVALID_POSE);
  relief_map_free(map);

  CHECK(relief_map_load("/nonexistent/path.relief") == nullptr);
  CHECK(relief_config_load("/nonexistent/config") == nullptr);
}

TEST_CASE("config handles and the simulate runner") {
  TempDir dir;
  const std::string config_path = (dir.path / "run.config").string();
  {
    std::ofstream out(config_path);
    out << "map.width = 80\n"
           "map.height = 80\n"
           "scene.ground = 0.0\n"
           "noise.alpha_d = 0.0001\n"
           "sensor.ring_elevations_deg = -75 -65 -55 -47 -40 -35\n"
           "sensor.azimuth_steps = 300\n"
           "traj.waypoint = 0 0 0 1\n"
           "traj.waypoint = 5 0.5 0 1\n"
           "run.scans = 9\n"
           "run.publish_every = 3\n";
  }

  relief_config* config = relief_config_load(config_path.c_str());
  REQUIRE(config != nullptr);
  CHECK(relief_config_set_mode(config, "det") == RELIEF_OK);
  CHECK(relief_config_set_mode(config, "sideways") == RELIEF_ERROR_USAGE);
  CHECK(relief_config_set_seed(config, 7) == RELIEF_OK);
  relief_config_free(config);

  const std::string out_dir = (dir.path / "sim").string();
  REQUIRE(relief_run_simulate(config_path.c_str(), out_dir.c_str(), 7, 1, "det") == RELIEF_OK);
  CHECK(fs::exists(out_dir + "/final.relief"));
  CHECK(fs::exists(out_dir + "/stats.csv"));
  CHECK(fs::exists(out_dir + "/snapshot_00003.relief"));
  CHECK(fs::exists(out_dir + "/snapshot_00009.relief"));

  // Export and segment against the produced snapshot.
  const std::string csv = (dir.path / "layer.csv").string();
  REQUIRE(relief_run_export((out_dir + "/final.relief").c_str(), "elevation", "csv",
                            csv.c_str()) == RELIEF_OK);
  CHECK(fs::file_size(csv) > 0);
  CHECK(relief_run_export((out_dir + "/final.relief").c_str(), "elevation", "tiff",
                          csv.c_str()) == RELIEF_ERROR_USAGE);

  const std::string regions = (dir.path / "regions.txt").string();
  size_t n_regions = 0;
  REQUIRE(relief_run_segment((out_dir + "/final.relief").c_str(), nullptr, regions.c_str(),
                             &n_regions) == RELIEF_OK);
  CHECK(n_regions >= 1);
}

TEST_CASE("replay and bench runners over the C surface") {
  TempDir dir;
  const std::string config_path = (dir.path / "run.config").string();
  {
    std::ofstream out(config_path);
    out << "map.width = 60\nmap.height = 60\nscene.ground = 0.0\n"
           "drift.enabled = false\n";
  }

  // One simple cloud + pose pair.
  const std::string cloud_path = (dir.path / "scan0.csv").string();
  {
    std::ofstream out(cloud_path);
    out << "x,y,z\n";
    for (int i = 0; i < 100; ++i) out << 0.01 * i << ",0.0,-1.0\n";
  }
  const std::string poses_path = (dir.path / "poses.csv").string();
  {
    std::ofstream out(poses_path);
    out << "time,tx,ty,tz,qw,qx,qy,qz\n0,0,0,1,1,0,0,0\n";
  }
  const char* clouds[] = {cloud_path.c_str()};
  const std::string replay_out = (dir.path / "replay").string();
  REQUIRE(relief_run_replay(config_path.c_str(), clouds, 1, poses_path.c_str(),
                            replay_out.c_str(), nullptr) == RELIEF_OK);
  CHECK(fs::exists(replay_out + "/final.relief"));

  const size_t counts[] = {200, 1000};
  const std::string bench_csv = (dir.path / "bench.csv").string();
  REQUIRE(relief_run_bench(config_path.c_str(), counts, 2, 2, bench_csv.c_str(), "det") ==
          RELIEF_OK);
  std::ifstream in(bench_csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("number of points") == 0);
  CHECK(header.find("traversability") != std::string::npos);
}

TEST_CASE("version string is present") {
  CHECK(std::string(relief_version()).find("reliefmap") == 0);
}
