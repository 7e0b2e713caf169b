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

#include "relief/core/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace relief {

namespace {

constexpr const char* kMagic = "reliefmap-snapshot v1";

std::string formatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parseFail(int line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError, "snapshot line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

const std::vector<std::string>& snapshotLayerNames() {
  static const std::vector<std::string> names = {
      "elevation",   "variance", "last_update",    "upper_bound", "upper_bound_valid",
      "traversability", "normal_x", "normal_y",    "normal_z",    "valid"};
  return names;
}

std::vector<double> layerValues(const ElevationMap& map, const std::string& layer) {
  const std::size_t n = map.cellCount();
  std::vector<double> out(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const bool valid = map.isValid(i);
    if (layer == "elevation") out[i] = valid ? map.elevation[i] : nan;
    else if (layer == "variance") out[i] = valid ? map.variance[i] : nan;
    else if (layer == "last_update") out[i] = valid ? map.last_update[i] : nan;
    else if (layer == "upper_bound") out[i] = map.upper_bound_valid[i] ? map.upper_bound[i] : nan;
    else if (layer == "upper_bound_valid") out[i] = map.upper_bound_valid[i];
    else if (layer == "traversability") out[i] = valid ? map.traversability[i] : nan;
    else if (layer == "normal_x") out[i] = valid ? map.normal_x[i] : nan;
    else if (layer == "normal_y") out[i] = valid ? map.normal_y[i] : nan;
    else if (layer == "normal_z") out[i] = valid ? map.normal_z[i] : nan;
    else if (layer == "valid") out[i] = valid ? 1.0 : 0.0;
    else {
      std::string available;
      for (const auto& name : snapshotLayerNames()) {
        if (!available.empty()) available += ", ";
        available += name;
      }
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown layer '" + layer + "'; available: " + available);
    }
  }
  return out;
}

void saveSnapshot(const ElevationMap& map, std::ostream& out) {
  const GridSpec& spec = map.spec();
  out << kMagic << "\n";
  out << "resolution: " << formatDouble(spec.resolution) << "\n";
  out << "width: " << spec.width << "\n";
  out << "height: " << spec.height << "\n";
  out << "center_x: " << formatDouble(spec.center.x()) << "\n";
  out << "center_y: " << formatDouble(spec.center.y()) << "\n";
  out << "layers: ";
  const auto& names = snapshotLayerNames();
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << "\n";
  for (const auto& name : names) {
    out << "layer: " << name << "\n";
    const std::vector<double> values = layerValues(map, name);
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        const double v = values[static_cast<std::size_t>(r) * spec.width + c];
        if (c) out << ' ';
        if (std::isnan(v)) out << "nan";
        else out << formatDouble(v);
      }
      out << "\n";
    }
  }
}

void saveSnapshotFile(const ElevationMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open for writing: " + path);
  saveSnapshot(map, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

ElevationMap loadSnapshot(std::istream& in) {
  int line_no = 0;
  std::string line;
  const auto getLine = [&]() -> std::string& {
    if (!std::getline(in, line)) parseFail(line_no + 1, "unexpected end of file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (getLine() != kMagic) parseFail(line_no, "bad magic, expected '" + std::string(kMagic) + "'");

  const auto headerValue = [&](const std::string& key) -> std::string {
    getLine();
    if (line.rfind(key + ": ", 0) != 0) parseFail(line_no, "expected '" + key + ":'");
    return line.substr(key.size() + 2);
  };

  GridSpec spec;
  try {
    spec.resolution = std::stod(headerValue("resolution"));
    spec.width = std::stoi(headerValue("width"));
    spec.height = std::stoi(headerValue("height"));
    spec.center.x() = std::stod(headerValue("center_x"));
    spec.center.y() = std::stod(headerValue("center_y"));
  } catch (const std::logic_error&) {
    parseFail(line_no, "bad header number");
  }
  spec.validate();

  std::vector<std::string> declared;
  {
    const std::string list = headerValue("layers");
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) declared.push_back(item);
  }
  const auto& known = snapshotLayerNames();
  for (const auto& name : declared) {
    if (std::find(known.begin(), known.end(), name) == known.end())
      parseFail(line_no, "unknown layer '" + name + "'");
  }

  ElevationMap map(spec);
  const std::size_t n = map.cellCount();
  std::vector<std::vector<double>> layers;
  std::vector<std::uint8_t> is_nan(n * declared.size(), 0);

  for (std::size_t li = 0; li < declared.size(); ++li) {
    getLine();
    if (line != "layer: " + declared[li])
      parseFail(line_no, "expected 'layer: " + declared[li] + "'");
    std::vector<double> values(n, 0.0);
    for (int r = 0; r < spec.height; ++r) {
      getLine();
      const char* p = line.c_str();
      for (int c = 0; c < spec.width; ++c) {
        while (*p == ' ') ++p;
        const std::size_t i = static_cast<std::size_t>(r) * spec.width + c;
        if (std::strncmp(p, "nan", 3) == 0) {
          is_nan[li * n + i] = 1;
          p += 3;
        } else {
          char* end = nullptr;
          values[i] = std::strtod(p, &end);
          if (end == p) parseFail(line_no, "row has fewer than width values");
          p = end;
        }
      }
      while (*p == ' ') ++p;
      if (*p != '\0') parseFail(line_no, "row has more than width values");
    }
    layers.push_back(std::move(values));
  }
  if (in >> std::ws, !in.eof()) {
    std::getline(in, line);
    if (!line.empty()) parseFail(line_no + 1, "trailing content after layers");
  }

  for (std::size_t li = 0; li < declared.size(); ++li) {
    const std::string& name = declared[li];
    const std::vector<double>& values = layers[li];
    for (std::size_t i = 0; i < n; ++i) {
      const bool nan = is_nan[li * n + i];
      if (name == "elevation") map.elevation[i] = nan ? ElevationMap::kInvalidValue : values[i];
      else if (name == "variance") map.variance[i] = nan ? ElevationMap::kInvalidValue : values[i];
      else if (name == "last_update") map.last_update[i] = nan ? 0.0 : values[i];
      else if (name == "upper_bound") map.upper_bound[i] = nan ? ElevationMap::kNoUpperBound : values[i];
      else if (name == "upper_bound_valid") map.upper_bound_valid[i] = values[i] != 0.0;
      else if (name == "traversability") map.traversability[i] = nan ? 0.0 : values[i];
      else if (name == "normal_x") map.normal_x[i] = nan ? 0.0 : values[i];
      else if (name == "normal_y") map.normal_y[i] = nan ? 0.0 : values[i];
      else if (name == "normal_z") map.normal_z[i] = nan ? 0.0 : values[i];
      else if (name == "valid") map.valid_[i] = values[i] != 0.0;
    }
  }
  return map;
}

ElevationMap loadSnapshotFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open: " + path);
  return loadSnapshot(in);
}

}  // namespace relief
