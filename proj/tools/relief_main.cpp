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

// Command-line front end. Talks to the engine exclusively through the C
// API, the same surface external embedders get.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relief/relief.h"

namespace {

// exit codes: 0 success, 1 usage, 2 data error
int exitCodeFor(relief_status status) {
  if (status == RELIEF_OK) return 0;
  if (status == RELIEF_ERROR_USAGE) return 1;
  return 2;
}

int report(relief_status status) {
  if (status != RELIEF_OK) std::fprintf(stderr, "error: %s\n", relief_last_error());
  return exitCodeFor(status);
}

std::vector<std::string> expandCloudArgs(const std::vector<std::string>& args) {
  std::vector<std::string> files;
  for (const std::string& arg : args) {
    if (std::filesystem::is_directory(arg)) {
      std::vector<std::string> found;
      for (const auto& entry : std::filesystem::directory_iterator(arg)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
          found.push_back(entry.path().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(arg);
    }
  }
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reliefmap: robot-centric 2.5D elevation mapping"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string mode;

  auto addCommon = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "run configuration file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--mode", mode, "execution mode: det or par")
        ->check(CLI::IsMember({"det", "par"}));
  };

  auto* simulate = app.add_subcommand("simulate", "render a scene and build the map");
  addCommon(simulate, true);

  auto* replay = app.add_subcommand("replay", "feed recorded scans through the pipeline");
  addCommon(replay, true);
  std::vector<std::string> cloud_args;
  std::string poses_path;
  replay->add_option("--clouds", cloud_args, "cloud CSV files or a directory of them")
      ->required();
  replay->add_option("--poses", poses_path, "poses CSV (time,tx,ty,tz,qw,qx,qy,qz)")->required();

  auto* bench = app.add_subcommand("bench", "time the pipeline at several point counts");
  addCommon(bench, true);
  std::vector<std::size_t> counts = {1000, 10000, 43017, 100000, 400000};
  int repetitions = 5;
  bench->add_option("--points", counts, "point counts to sweep")->delimiter(',');
  bench->add_option("--reps", repetitions, "repetitions per count");
  std::string bench_csv;
  bench->add_option("--csv", bench_csv, "output CSV path (default <out>/bench.csv)");

  auto* do_export = app.add_subcommand("export", "write one snapshot layer to csv or pgm");
  std::string snapshot_path, layer = "elevation", format = "csv", export_out;
  do_export->add_option("--snapshot", snapshot_path, "snapshot file")->required();
  do_export->add_option("--layer", layer, "layer name");
  do_export->add_option("--format", format, "csv or pgm")->check(CLI::IsMember({"csv", "pgm"}));
  do_export->add_option("--out", export_out, "output file")->required();

  auto* segment = app.add_subcommand("segment", "extract planar regions from a snapshot");
  std::string seg_snapshot, seg_out;
  std::string seg_config;
  segment->add_option("--snapshot", seg_snapshot, "snapshot file")->required();
  segment->add_option("--out", seg_out, "region document output")->required();
  segment->add_option("--config", seg_config, "config supplying segmentation parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  const char* mode_arg = mode.empty() ? nullptr : mode.c_str();

  if (simulate->parsed()) {
    return report(relief_run_simulate(config_path.c_str(), out_dir.c_str(), seed,
                                      seed_set ? 1 : 0, mode_arg));
  }

  if (replay->parsed()) {
    const std::vector<std::string> files = expandCloudArgs(cloud_args);
    std::vector<const char*> file_ptrs;
    file_ptrs.reserve(files.size());
    for (const std::string& f : files) file_ptrs.push_back(f.c_str());
    return report(relief_run_replay(config_path.c_str(), file_ptrs.data(), file_ptrs.size(),
                                    poses_path.c_str(), out_dir.c_str(), mode_arg));
  }

  if (bench->parsed()) {
    if (bench_csv.empty()) {
      std::filesystem::create_directories(out_dir);
      bench_csv = out_dir + "/bench.csv";
    }
    const relief_status status =
        relief_run_bench(config_path.c_str(), counts.data(), counts.size(), repetitions,
                         bench_csv.c_str(), mode_arg);
    if (status == RELIEF_OK) std::printf("wrote %s\n", bench_csv.c_str());
    return report(status);
  }

  if (do_export->parsed()) {
    return report(relief_run_export(snapshot_path.c_str(), layer.c_str(), format.c_str(),
                                    export_out.c_str()));
  }

  if (segment->parsed()) {
    size_t n_regions = 0;
    const relief_status status =
        relief_run_segment(seg_snapshot.c_str(), seg_config.empty() ? nullptr : seg_config.c_str(),
                           seg_out.c_str(), &n_regions);
    if (status == RELIEF_OK) std::printf("%zu regions\n", n_regions);
    return report(status);
  }

  return 1;
}
