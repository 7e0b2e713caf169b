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

#ifndef RELIEF_CORE_SNAPSHOT_HPP
#define RELIEF_CORE_SNAPSHOT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "relief/core/grid.hpp"

namespace relief {

/// Names of the persistent layers, in serialization order.
const std::vector<std::string>& snapshotLayerNames();

/// One layer as doubles with invalid cells mapped to NaN (matching the file
/// body). Throws for unknown names, listing the valid ones.
std::vector<double> layerValues(const ElevationMap& map, const std::string& layer);

/// Text snapshot, `reliefmap-snapshot v1`. Values are serialized with full
/// precision so load(save(m)) reproduces every layer bit-exactly; invalid
/// cells are the literal token `nan`.
void saveSnapshot(const ElevationMap& map, std::ostream& out);
void saveSnapshotFile(const ElevationMap& map, const std::string& path);

ElevationMap loadSnapshot(std::istream& in);
ElevationMap loadSnapshotFile(const std::string& path);

}  // namespace relief

#endif  // RELIEF_CORE_SNAPSHOT_HPP
