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

#ifndef RELIEF_CORE_POSTPROCESS_HPP
#define RELIEF_CORE_POSTPROCESS_HPP

#include <iosfwd>
#include <vector>

#include "relief/core/grid.hpp"
#include "relief/core/types.hpp"

namespace relief {

struct FilterStep {
  enum class Kind { kGaussian, kBox, kMedian, kMinInpaint };
  Kind kind = Kind::kBox;
  int radius = 1;      // cells; kernel spans 2*radius+1
  double sigma = 1.0;  // cells; gaussian only

  void validate() const {
    if (kind != Kind::kMinInpaint && radius < 1)
      throw Error(ErrorCode::kInvalidArgument, "filter radius must be >= 1");
    if (kind == Kind::kGaussian && sigma <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "gaussian sigma must be > 0");
  }
};

struct FilterChainSpec {
  std::vector<FilterStep> steps;
};

/// A value layer plus its validity mask; the unit the smoothing filters and
/// the inpainter operate on.
struct MaskedLayer {
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
  int width = 0;
  int height = 0;
};

/// Fills each 4-connected component of invalid cells with the minimum value
/// among the valid cells 8-adjacent to that component. Components with no
/// valid border cell remain invalid. Throws NothingToInpaint when the whole
/// layer is invalid.
MaskedLayer inpaintMin(const MaskedLayer& layer);

/// Applies the chain in order. Linear kernels are normalized over valid
/// cells only; the median is taken over valid cells in the window. Validity
/// changes only through min_inpaint steps.
MaskedLayer smoothChain(const MaskedLayer& layer, const FilterChainSpec& chain);

struct PlaneSegParams {
  double normal_angle_max = 0.3490658503988659;  // radians (20 deg)
  double dist_max = 0.02;                        // meters point-to-plane
  int min_region_cells = 50;
  double polygon_simplify_tol = 0.0;  // meters; 0 keeps exact traced polygons

  void validate() const {
    if (normal_angle_max <= 0.0 || dist_max <= 0.0 || min_region_cells <= 0 ||
        polygon_simplify_tol < 0.0)
      throw Error(ErrorCode::kInvalidArgument, "plane segmentation params must be positive");
  }
};

struct Plane {
  Vec3 normal = Vec3::UnitZ();  // unit, normal.z() > 0
  double offset = 0.0;          // normal . p = offset for points on the plane

  double distance(const Vec3& p) const { return std::abs(normal.dot(p) - offset); }
};

struct PlaneFit {
  Plane plane;
  double rms_residual = 0.0;
};

/// Total-least-squares plane through the given points via the covariance
/// eigen-decomposition; the smallest eigenvector is the normal. Throws
/// DegeneratePlane for fewer than 3 points or collinear input.
PlaneFit fitPlane(const std::vector<Vec3>& points);

using Polygon = std::vector<Vec2>;  // world-xy vertices

/// Planar region: plane coefficients plus boundary polygons in map-frame
/// coordinates. The outer ring is counterclockwise, holes clockwise.
struct PlanarRegion {
  Plane plane;
  double rms_residual = 0.0;
  Polygon outer;
  std::vector<Polygon> holes;
  int cell_count = 0;
  std::vector<CellIndex> cells;
};

/// Greedy region growing over valid cells with normals. Seeds are processed
/// flattest-first (normal z descending, row-major tie-break); a 4-connected
/// neighbor joins when its normal is within normal_angle_max of the region
/// plane normal and its center lies within dist_max of the plane. The plane
/// is refit after every growth round. Regions below min_region_cells are
/// dropped. Boundaries are traced along cell-footprint corners and then
/// simplified with polygon_simplify_tol.
std::vector<PlanarRegion> segmentPlanes(const ElevationMap& map, const PlaneSegParams& params);

/// Text export: per region a `plane:` line (nx ny nz offset), a `cells:`
/// line, an `outer:` block of `x y` vertex lines, and one `hole:` block per
/// hole.
void writeRegions(const std::vector<PlanarRegion>& regions, std::ostream& out);

double polygonArea(const Polygon& poly);  // signed, positive when counterclockwise

}  // namespace relief

#endif  // RELIEF_CORE_POSTPROCESS_HPP
