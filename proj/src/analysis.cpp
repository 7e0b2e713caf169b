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

#include "relief/core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace relief {

void ConvNetSpec::validate() const {
  if (layers.empty()) throw Error(ErrorCode::kInvalidModel, "model has no layers");
  for (const ConvLayer& layer : layers) {
    if (layer.kernel_size < 1 || layer.kernel_size % 2 == 0)
      throw Error(ErrorCode::kInvalidModel, "kernel size must be odd and positive");
    if (layer.kernel.size() !=
        static_cast<std::size_t>(layer.kernel_size) * layer.kernel_size)
      throw Error(ErrorCode::kInvalidModel, "kernel element count mismatch");
    for (double w : layer.kernel)
      if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidModel, "non-finite kernel weight");
    if (!std::isfinite(layer.bias)) throw Error(ErrorCode::kInvalidModel, "non-finite bias");
  }
}

void computeNormals(ElevationMap& map) {
  const int w = map.width();
  const int h = map.height();
  const double res = map.resolution();
  // Gradients are read from the pre-pass elevation, so the output does not
  // depend on cell visit order.
  std::vector<double> nx(map.cellCount(), 0.0), ny(map.cellCount(), 0.0),
      nz(map.cellCount(), 0.0);

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!map.isValid(i)) continue;
      const auto valueAt = [&](int rr, int cc) -> const double* {
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) return nullptr;
        const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
        return map.isValid(j) ? &map.elevation[j] : nullptr;
      };
      const double* left = valueAt(r, c - 1);
      const double* right = valueAt(r, c + 1);
      const double* down = valueAt(r - 1, c);
      const double* up = valueAt(r + 1, c);
      const double center = map.elevation[i];

      double dhdx = 0.0;
      if (left && right) dhdx = (*right - *left) / (2.0 * res);
      else if (right) dhdx = (*right - center) / res;
      else if (left) dhdx = (center - *left) / res;
      else continue;  // no usable neighbor along x

      double dhdy = 0.0;
      if (down && up) dhdy = (*up - *down) / (2.0 * res);
      else if (up) dhdy = (*up - center) / res;
      else if (down) dhdy = (center - *down) / res;
      else continue;

      const double norm = std::sqrt(dhdx * dhdx + dhdy * dhdy + 1.0);
      nx[i] = -dhdx / norm;
      ny[i] = -dhdy / norm;
      nz[i] = 1.0 / norm;
    }
  }
  map.normal_x.swap(nx);
  map.normal_y.swap(ny);
  map.normal_z.swap(nz);
}

void traversabilityGeometric(ElevationMap& map, const TraversabilityParams& params) {
  params.validate();
  const int w = map.width();
  const int h = map.height();
  const int radius = params.window / 2;
  std::vector<double> out(map.cellCount(), 0.0);

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!map.isValid(i)) continue;
      if (!map.hasNormal(i)) continue;

      const double slope = std::acos(std::clamp(map.normal_z[i], -1.0, 1.0));
      const double s_slope = std::clamp(1.0 - slope / params.slope_max, 0.0, 1.0);

      const double center = map.elevation[i];
      double max_step = 0.0;
      double sum = 0.0, sum_sq = 0.0;
      int n = 0;
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        for (int dc = -radius; dc <= radius; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= w) continue;
          const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
          if (!map.isValid(j)) continue;
          const double v = map.elevation[j];
          max_step = std::max(max_step, std::abs(v - center));
          sum += v;
          sum_sq += v * v;
          ++n;
        }
      }
      const double s_step = std::clamp(1.0 - max_step / params.step_max, 0.0, 1.0);
      const double mean = sum / n;
      const double var = std::max(0.0, sum_sq / n - mean * mean);
      const double s_rough = std::clamp(1.0 - std::sqrt(var) / params.roughness_max, 0.0, 1.0);

      out[i] = params.w_slope * s_slope + params.w_step * s_step + params.w_roughness * s_rough;
    }
  }
  map.traversability.swap(out);
}

namespace {

// Fills invalid cells with the value of the nearest valid cell (BFS over the
// 8-neighborhood, row-major tie-break). All-invalid input fills with zero.
std::vector<double> fillNearestValid(const std::vector<double>& layer,
                                     const std::vector<std::uint8_t>& validity, int width,
                                     int height) {
  std::vector<double> filled(layer.size(), 0.0);
  std::vector<std::uint8_t> known(layer.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (validity[i]) {
      filled[i] = layer[i];
      known[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int r = static_cast<int>(i) / width;
    const int c = static_cast<int>(i) % width;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int rr = r + dr;
        const int cc = c + dc;
        if (rr < 0 || rr >= height || cc < 0 || cc >= width) continue;
        const std::size_t j = static_cast<std::size_t>(rr) * width + cc;
        if (known[j]) continue;
        known[j] = 1;
        filled[j] = filled[i];
        queue.push_back(j);
      }
    }
  }
  return filled;
}

double applyActivation(double x, Activation a) {
  switch (a) {
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::kIdentity: return x;
  }
  return x;
}

}  // namespace

std::vector<double> convFilterInference(const std::vector<double>& layer,
                                        const std::vector<std::uint8_t>& validity, int width,
                                        int height, const ConvNetSpec& spec) {
  spec.validate();
  if (layer.size() != static_cast<std::size_t>(width) * height ||
      validity.size() != layer.size())
    throw Error(ErrorCode::kInvalidArgument, "layer size does not match grid dimensions");

  std::vector<double> current = fillNearestValid(layer, validity, width, height);
  std::vector<double> next(current.size());
  for (std::size_t li = 0; li < spec.layers.size(); ++li) {
    const ConvLayer& cl = spec.layers[li];
    const int radius = cl.kernel_size / 2;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        double acc = cl.bias;
        for (int kr = -radius; kr <= radius; ++kr) {
          const int rr = std::clamp(r + kr, 0, height - 1);  // border replicate
          for (int kc = -radius; kc <= radius; ++kc) {
            const int cc = std::clamp(c + kc, 0, width - 1);
            acc += cl.kernel[static_cast<std::size_t>(kr + radius) * cl.kernel_size +
                             (kc + radius)] *
                   current[static_cast<std::size_t>(rr) * width + cc];
          }
        }
        next[static_cast<std::size_t>(r) * width + c] = applyActivation(acc, cl.activation);
      }
    }
    current.swap(next);
  }
  for (double& v : current) v = std::clamp(v, 0.0, 1.0);
  return current;
}

namespace {

std::string nextContentLine(std::istream& in, int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    return line.substr(first);
  }
  throw Error(ErrorCode::kInvalidModel,
              "unexpected end of model file at line " + std::to_string(line_no));
}

double parseTaggedNumber(const std::string& line, const std::string& tag, int line_no) {
  if (line.rfind(tag, 0) != 0)
    throw Error(ErrorCode::kInvalidModel,
                "expected '" + tag + "' at line " + std::to_string(line_no));
  try {
    return std::stod(line.substr(tag.size()));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidModel, "bad number at line " + std::to_string(line_no));
  }
}

}  // namespace

ConvNetSpec loadConvNetSpec(std::istream& in) {
  ConvNetSpec spec;
  int line_no = 0;
  const int n_layers = static_cast<int>(parseTaggedNumber(nextContentLine(in, line_no),
                                                          "layers:", line_no));
  if (n_layers < 1) throw Error(ErrorCode::kInvalidModel, "layer count must be >= 1");
  for (int li = 0; li < n_layers; ++li) {
    ConvLayer layer;
    layer.kernel_size = static_cast<int>(parseTaggedNumber(nextContentLine(in, line_no),
                                                           "kernel:", line_no));
    if (layer.kernel_size < 1 || layer.kernel_size % 2 == 0)
      throw Error(ErrorCode::kInvalidModel,
                  "kernel size must be odd, line " + std::to_string(line_no));
    layer.kernel.reserve(static_cast<std::size_t>(layer.kernel_size) * layer.kernel_size);
    for (int r = 0; r < layer.kernel_size; ++r) {
      std::istringstream row(nextContentLine(in, line_no));
      for (int c = 0; c < layer.kernel_size; ++c) {
        double v;
        if (!(row >> v))
          throw Error(ErrorCode::kInvalidModel,
                      "kernel row too short at line " + std::to_string(line_no));
        layer.kernel.push_back(v);
      }
    }
    layer.bias = parseTaggedNumber(nextContentLine(in, line_no), "bias:", line_no);
    const std::string act_line = nextContentLine(in, line_no);
    if (act_line.rfind("activation:", 0) != 0)
      throw Error(ErrorCode::kInvalidModel,
                  "expected 'activation:' at line " + std::to_string(line_no));
    std::string act = act_line.substr(11);
    act.erase(0, act.find_first_not_of(" \t"));
    act.erase(act.find_last_not_of(" \t\r") + 1);
    if (act == "relu") layer.activation = Activation::kRelu;
    else if (act == "sigmoid") layer.activation = Activation::kSigmoid;
    else if (act == "identity") layer.activation = Activation::kIdentity;
    else
      throw Error(ErrorCode::kInvalidModel,
                  "unknown activation '" + act + "' at line " + std::to_string(line_no));
    spec.layers.push_back(std::move(layer));
  }
  spec.validate();
  return spec;
}

ConvNetSpec loadConvNetSpecFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open model file: " + path);
  return loadConvNetSpec(in);
}

std::vector<CellIndex> overlapClearance(ElevationMap& map, const Vec3& robot_position,
                                        const OverlapParams& params) {
  params.validate();
  std::vector<CellIndex> cleared;
  const int w = map.width();
  const int h = map.height();
  const double r2 = params.radius * params.radius;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!map.isValid(i)) continue;
      const Vec2 pos = map.indexToWorld({r, c});
      const double dx = pos.x() - robot_position.x();
      const double dy = pos.y() - robot_position.y();
      if (dx * dx + dy * dy > r2) continue;
      if (std::abs(map.elevation[i] - robot_position.z()) <= params.height_threshold) continue;
      map.invalidateCell(i);
      cleared.push_back({r, c});
    }
  }
  return cleared;
}

}  // namespace relief
