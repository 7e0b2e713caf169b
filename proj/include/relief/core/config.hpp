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

#ifndef RELIEF_CORE_CONFIG_HPP
#define RELIEF_CORE_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "relief/core/integration.hpp"
#include "relief/core/postprocess.hpp"
#include "relief/core/sim.hpp"

namespace relief {

/// Everything a run needs: grid geometry, pipeline tunables, the simulated
/// scene/sensor/trajectory, and execution knobs.
struct RunConfig {
  GridSpec map;
  PipelineParams pipeline;
  PlaneSegParams segmentation;
  Scene scene;
  SensorSpec sensor;
  TrajectorySpec trajectory;
  int scans = 50;
  int publish_every = 5;  // emit a snapshot every N scans
  std::uint64_t seed = 0;
  std::string convnet_path;

  void validate() const;
};

/// Flat `section.key = value` text. Repeated keys are allowed only for the
/// list-like entries (scene primitives, trajectory waypoints, ring
/// elevations). Unknown keys are rejected with their line number.
RunConfig loadRunConfig(std::istream& in);
RunConfig loadRunConfigFile(const std::string& path);

}  // namespace relief

#endif  // RELIEF_CORE_CONFIG_HPP
