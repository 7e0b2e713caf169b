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

#ifndef RELIEF_CORE_ANALYSIS_HPP
#define RELIEF_CORE_ANALYSIS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "relief/core/grid.hpp"
#include "relief/core/types.hpp"

namespace relief {

struct TraversabilityParams {
  double slope_max = 0.785398163397448;  // radians
  double step_max = 0.2;                 // meters
  double roughness_max = 0.1;            // meters (height std over window)
  int window = 5;                        // odd, >= 3
  double w_slope = 0.4;
  double w_step = 0.3;
  double w_roughness = 0.3;

  void validate() const {
    if (window < 3 || window % 2 == 0)
      throw Error(ErrorCode::kInvalidArgument, "window must be odd and >= 3");
    if (slope_max <= 0.0 || step_max <= 0.0 || roughness_max <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "traversability maxima must be > 0");
    if (w_slope < 0.0 || w_step < 0.0 || w_roughness < 0.0 ||
        std::abs(w_slope + w_step + w_roughness - 1.0) > 1e-9)
      throw Error(ErrorCode::kInvalidArgument, "weights must be nonnegative and sum to 1");
  }
};

enum class Activation { kRelu, kSigmoid, kIdentity };

struct ConvLayer {
  int kernel_size = 1;  // odd
  std::vector<double> kernel;  // kernel_size * kernel_size, row-major
  double bias = 0.0;
  Activation activation = Activation::kIdentity;
};

/// Executable stack of 2D convolutions. Weights come from an external file;
/// the engine only runs them.
struct ConvNetSpec {
  std::string input_layer = "elevation";
  std::vector<ConvLayer> layers;

  void validate() const;
};

struct OverlapParams {
  bool enabled = true;
  double radius = 1.0;            // meters
  double height_threshold = 1.5;  // meters

  void validate() const {
    if (radius <= 0.0 || height_threshold <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "overlap radius and threshold must be > 0");
  }
};

/// Surface normals from central differences on the elevation layer,
/// one-sided at borders and next to invalid cells. A valid cell needs at
/// least one valid neighbor per axis; otherwise it gets no normal.
void computeNormals(ElevationMap& map);

/// Slope / step / roughness scores blended into [0, 1]. Requires normals;
/// valid cells without a normal keep traversability 0.
void traversabilityGeometric(ElevationMap& map, const TraversabilityParams& params);

/// Runs the convolution stack on a layer. Invalid cells are filled with the
/// nearest valid value first; padding replicates the border. The final
/// output is clamped to [0, 1].
std::vector<double> convFilterInference(const std::vector<double>& layer,
                                        const std::vector<std::uint8_t>& validity, int width,
                                        int height, const ConvNetSpec& spec);

/// Parses the weight-file format:
///   layers: N
///   kernel: k
///   <k rows of k reals>
///   bias: x
///   activation: relu|sigmoid|identity
ConvNetSpec loadConvNetSpec(std::istream& in);
ConvNetSpec loadConvNetSpecFile(const std::string& path);

/// Invalidates valid cells within `radius` of the robot whose height differs
/// from the robot's by more than the threshold. Clears their upper bound
/// too. Returns the cleared cells.
std::vector<CellIndex> overlapClearance(ElevationMap& map, const Vec3& robot_position,
                                        const OverlapParams& params);

}  // namespace relief

#endif  // RELIEF_CORE_ANALYSIS_HPP
