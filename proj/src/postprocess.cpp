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

#include "relief/core/postprocess.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <ostream>

namespace relief {

namespace {

void checkLayer(const MaskedLayer& layer) {
  const std::size_t n = static_cast<std::size_t>(layer.width) * layer.height;
  if (layer.width <= 0 || layer.height <= 0 || layer.values.size() != n ||
      layer.valid.size() != n)
    throw Error(ErrorCode::kInvalidArgument, "malformed masked layer");
}

}  // namespace

MaskedLayer inpaintMin(const MaskedLayer& layer) {
  checkLayer(layer);
  const int w = layer.width;
  const int h = layer.height;
  if (std::find(layer.valid.begin(), layer.valid.end(), std::uint8_t{1}) == layer.valid.end())
    throw Error(ErrorCode::kNothingToInpaint, "layer has no valid cells");

  MaskedLayer out = layer;
  std::vector<std::int32_t> component(layer.values.size(), -1);
  std::int32_t n_components = 0;
  std::vector<double> component_min;
  std::vector<std::uint8_t> component_has_border;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t start = static_cast<std::size_t>(r) * w + c;
      if (layer.valid[start] || component[start] >= 0) continue;
      // Flood one 4-connected invalid component, collecting the minimum
      // valid value over the 8-neighborhood of its members.
      const std::int32_t id = n_components++;
      double border_min = std::numeric_limits<double>::infinity();
      bool has_border = false;
      std::deque<std::size_t> queue{start};
      component[start] = id;
      while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const int ir = static_cast<int>(i) / w;
        const int ic = static_cast<int>(i) % w;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int rr = ir + dr;
            const int cc = ic + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
            if (layer.valid[j]) {
              if (layer.values[j] < border_min) border_min = layer.values[j];
              has_border = true;
            } else if (std::abs(dr) + std::abs(dc) == 1 && component[j] < 0) {
              component[j] = id;
              queue.push_back(j);
            }
          }
        }
      }
      component_min.push_back(border_min);
      component_has_border.push_back(has_border);
    }
  }

  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (layer.valid[i]) continue;
    const std::int32_t id = component[i];
    if (!component_has_border[id]) continue;  // nothing to borrow from
    out.values[i] = component_min[id];
    out.valid[i] = 1;
  }
  return out;
}

namespace {

MaskedLayer applyLinearKernel(const MaskedLayer& layer, int radius,
                              const std::vector<double>& weights) {
  const int w = layer.width;
  const int h = layer.height;
  MaskedLayer out = layer;
  const int k = 2 * radius + 1;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!layer.valid[i]) continue;
      double acc = 0.0;
      double weight_sum = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        for (int dc = -radius; dc <= radius; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= w) continue;
          const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
          if (!layer.valid[j]) continue;  // invalid cells carry zero weight
          const double weight = weights[static_cast<std::size_t>(dr + radius) * k + (dc + radius)];
          acc += weight * layer.values[j];
          weight_sum += weight;
        }
      }
      out.values[i] = acc / weight_sum;
    }
  }
  return out;
}

MaskedLayer applyMedian(const MaskedLayer& layer, int radius) {
  const int w = layer.width;
  const int h = layer.height;
  MaskedLayer out = layer;
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (!layer.valid[i]) continue;
      window.clear();
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        for (int dc = -radius; dc <= radius; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= w) continue;
          const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
          if (layer.valid[j]) window.push_back(layer.values[j]);
        }
      }
      std::sort(window.begin(), window.end());
      const std::size_t n = window.size();
      out.values[i] = (n % 2 == 1) ? window[n / 2]
                                   : 0.5 * (window[n / 2 - 1] + window[n / 2]);
    }
  }
  return out;
}

}  // namespace

MaskedLayer smoothChain(const MaskedLayer& layer, const FilterChainSpec& chain) {
  checkLayer(layer);
  MaskedLayer current = layer;
  for (const FilterStep& step : chain.steps) {
    step.validate();
    switch (step.kind) {
      case FilterStep::Kind::kGaussian: {
        const int k = 2 * step.radius + 1;
        std::vector<double> weights(static_cast<std::size_t>(k) * k);
        for (int dr = -step.radius; dr <= step.radius; ++dr)
          for (int dc = -step.radius; dc <= step.radius; ++dc)
            weights[static_cast<std::size_t>(dr + step.radius) * k + (dc + step.radius)] =
                std::exp(-(dr * dr + dc * dc) / (2.0 * step.sigma * step.sigma));
        current = applyLinearKernel(current, step.radius, weights);
        break;
      }
      case FilterStep::Kind::kBox: {
        const int k = 2 * step.radius + 1;
        current = applyLinearKernel(current, step.radius,
                                    std::vector<double>(static_cast<std::size_t>(k) * k, 1.0));
        break;
      }
      case FilterStep::Kind::kMedian:
        current = applyMedian(current, step.radius);
        break;
      case FilterStep::Kind::kMinInpaint:
        current = inpaintMin(current);
        break;
    }
  }
  return current;
}

PlaneFit fitPlane(const std::vector<Vec3>& points) {
  if (points.size() < 3)
    throw Error(ErrorCode::kDegeneratePlane, "plane fit needs at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  const Vec3 eigenvalues = solver.eigenvalues();  // ascending
  // Collinear input leaves two near-zero eigenvalues and no unique normal.
  const double scale = std::max(eigenvalues(2), 1e-30);
  if (eigenvalues(1) <= 1e-12 * scale || eigenvalues(2) <= 0.0)
    throw Error(ErrorCode::kDegeneratePlane, "points are collinear or coincident");

  Vec3 normal = solver.eigenvectors().col(0);
  if (normal.z() < 0.0 || (normal.z() == 0.0 && (normal.x() < 0.0 ||
                                                 (normal.x() == 0.0 && normal.y() < 0.0))))
    normal = -normal;
  normal.normalize();

  PlaneFit fit;
  fit.plane.normal = normal;
  fit.plane.offset = normal.dot(centroid);
  double sq = 0.0;
  for (const Vec3& p : points) {
    const double d = normal.dot(p) - fit.plane.offset;
    sq += d * d;
  }
  fit.rms_residual = std::sqrt(sq / static_cast<double>(points.size()));
  return fit;
}

namespace {

struct Corner {
  int r, c;
  bool operator<(const Corner& o) const { return r != o.r ? r < o.r : c < o.c; }
  bool operator==(const Corner&) const = default;
};

// Directed boundary edges keep the region on the left, which orients outer
// rings counterclockwise and holes clockwise.
struct DirectedEdge {
  Corner from, to;
};

std::vector<Polygon> traceBoundary(const std::vector<std::uint8_t>& mask, const GridSpec& spec,
                                   std::vector<double>* signed_areas) {
  const int w = spec.width;
  const int h = spec.height;
  const auto inRegion = [&](int r, int c) {
    return r >= 0 && r < h && c >= 0 && c < w && mask[static_cast<std::size_t>(r) * w + c];
  };

  // from-corner -> outgoing edges, ordered by direction for determinism.
  std::map<Corner, std::vector<DirectedEdge>> edges;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!inRegion(r, c)) continue;
      if (!inRegion(r - 1, c))
        edges[{r, c}].push_back({{r, c}, {r, c + 1}});  // bottom, +x
      if (!inRegion(r, c + 1))
        edges[{r, c + 1}].push_back({{r, c + 1}, {r + 1, c + 1}});  // right, +y
      if (!inRegion(r + 1, c))
        edges[{r + 1, c + 1}].push_back({{r + 1, c + 1}, {r + 1, c}});  // top, -x
      if (!inRegion(r, c - 1))
        edges[{r + 1, c}].push_back({{r + 1, c}, {r, c}});  // left, -y
    }
  }

  const Vec2 origin = spec.origin();
  const auto cornerWorld = [&](Corner k) -> Vec2 {
    return {origin.x() + k.c * spec.resolution, origin.y() + k.r * spec.resolution};
  };

  std::vector<Polygon> rings;
  while (!edges.empty()) {
    auto first_it = edges.begin();
    DirectedEdge edge = first_it->second.back();
    first_it->second.pop_back();
    if (first_it->second.empty()) edges.erase(first_it);

    std::vector<Corner> ring{edge.from};
    const Corner start = edge.from;
    while (!(edge.to == start)) {
      ring.push_back(edge.to);
      auto it = edges.find(edge.to);
      if (it == edges.end())
        throw Error(ErrorCode::kInvalidArgument, "boundary tracing found an open chain");
      auto& candidates = it->second;
      // Prefer the sharpest left turn so loops through pinch corners stay
      // simple.
      const int dr = edge.to.r - edge.from.r;
      const int dc = edge.to.c - edge.from.c;
      const Corner left{edge.to.r + dc, edge.to.c - dr};
      const Corner straight{edge.to.r + dr, edge.to.c + dc};
      std::size_t pick = 0;
      if (candidates.size() > 1) {
        for (std::size_t k = 0; k < candidates.size(); ++k)
          if (candidates[k].to == left) pick = k;
        if (!(candidates[pick].to == left))
          for (std::size_t k = 0; k < candidates.size(); ++k)
            if (candidates[k].to == straight) pick = k;
      }
      edge = candidates[pick];
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
      if (candidates.empty()) edges.erase(it);
    }

    Polygon poly;
    poly.reserve(ring.size());
    for (const Corner& k : ring) poly.push_back(cornerWorld(k));
    if (signed_areas) signed_areas->push_back(polygonArea(poly));
    rings.push_back(std::move(poly));
  }
  return rings;
}

double pointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

void douglasPeucker(const Polygon& pts, std::size_t lo, std::size_t hi, double tol,
                    std::vector<std::uint8_t>& keep) {
  if (hi <= lo + 1) return;
  double max_dist = -1.0;
  std::size_t max_i = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = pointSegmentDistance(pts[i], pts[lo], pts[hi]);
    if (d > max_dist) {
      max_dist = d;
      max_i = i;
    }
  }
  if (max_dist > tol) {
    keep[max_i] = 1;
    douglasPeucker(pts, lo, max_i, tol, keep);
    douglasPeucker(pts, max_i, hi, tol, keep);
  }
}

Polygon simplifyRing(const Polygon& ring, double tol) {
  if (tol <= 0.0 || ring.size() <= 4) return ring;
  // Anchor the two most distant vertices so the closed ring keeps its shape.
  std::size_t anchor = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const double d = (ring[i] - ring[0]).squaredNorm();
    if (d > best) {
      best = d;
      anchor = i;
    }
  }
  std::vector<std::uint8_t> keep(ring.size(), 0);
  keep[0] = keep[anchor] = 1;
  douglasPeucker(ring, 0, anchor, tol, keep);
  Polygon wrapped = ring;
  wrapped.push_back(ring[0]);
  std::vector<std::uint8_t> keep_back(wrapped.size(), 0);
  keep_back[anchor] = keep_back[wrapped.size() - 1] = 1;
  douglasPeucker(wrapped, anchor, wrapped.size() - 1, tol, keep_back);
  Polygon out;
  for (std::size_t i = 0; i < ring.size(); ++i)
    if (keep[i] || keep_back[i]) out.push_back(ring[i]);
  return out;
}

}  // namespace

double polygonArea(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

std::vector<PlanarRegion> segmentPlanes(const ElevationMap& map, const PlaneSegParams& params) {
  params.validate();
  const int w = map.width();
  const int h = map.height();
  const std::size_t n = map.cellCount();

  std::vector<std::size_t> seeds;
  seeds.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (map.isValid(i) && map.hasNormal(i)) seeds.push_back(i);
  std::stable_sort(seeds.begin(), seeds.end(), [&](std::size_t a, std::size_t b) {
    return map.normal_z[a] > map.normal_z[b];
  });

  const double cos_max = std::cos(params.normal_angle_max);
  std::vector<std::int8_t> state(n, 0);  // 0 free, 1 assigned/consumed

  const auto cellPoint = [&](std::size_t i) -> Vec3 {
    const CellIndex idx{static_cast<int>(i) / w, static_cast<int>(i) % w};
    const Vec2 xy = map.indexToWorld(idx);
    return {xy.x(), xy.y(), map.elevation[i]};
  };
  const auto cellNormal = [&](std::size_t i) -> Vec3 {
    return {map.normal_x[i], map.normal_y[i], map.normal_z[i]};
  };

  std::vector<PlanarRegion> regions;
  std::vector<std::size_t> members;
  std::vector<std::size_t> frontier;
  std::vector<std::size_t> next;

  for (const std::size_t seed : seeds) {
    if (state[seed]) continue;
    members.clear();
    frontier.clear();
    members.push_back(seed);
    frontier.push_back(seed);
    state[seed] = 1;

    Plane plane;
    plane.normal = cellNormal(seed);
    plane.offset = plane.normal.dot(cellPoint(seed));

    while (!frontier.empty()) {
      next.clear();
      for (const std::size_t i : frontier) {
        const int r = static_cast<int>(i) / w;
        const int c = static_cast<int>(i) % w;
        const std::array<CellIndex, 4> neighbors{
            CellIndex{r - 1, c}, CellIndex{r + 1, c}, CellIndex{r, c - 1}, CellIndex{r, c + 1}};
        for (const CellIndex& nb : neighbors) {
          if (nb.row < 0 || nb.row >= h || nb.col < 0 || nb.col >= w) continue;
          const std::size_t j = static_cast<std::size_t>(nb.row) * w + nb.col;
          if (state[j] || !map.isValid(j) || !map.hasNormal(j)) continue;
          if (cellNormal(j).dot(plane.normal) < cos_max) continue;
          if (plane.distance(cellPoint(j)) > params.dist_max) continue;
          state[j] = 1;
          members.push_back(j);
          next.push_back(j);
        }
      }
      if (!next.empty() && members.size() >= 3) {
        std::vector<Vec3> pts;
        pts.reserve(members.size());
        for (const std::size_t i : members) pts.push_back(cellPoint(i));
        try {
          plane = fitPlane(pts).plane;
        } catch (const Error&) {
          // Degenerate interim fit (e.g. a collinear strip); keep the
          // previous plane until the region thickens.
        }
      }
      frontier.swap(next);
    }

    if (members.size() < static_cast<std::size_t>(params.min_region_cells)) continue;

    // Final refit plus audit so each member satisfies the published plane's
    // membership criteria; violators go back to the free pool.
    PlaneFit fit;
    for (int pass = 0; pass < 8; ++pass) {
      std::vector<Vec3> pts;
      pts.reserve(members.size());
      for (const std::size_t i : members) pts.push_back(cellPoint(i));
      try {
        fit = fitPlane(pts);
      } catch (const Error&) {
        members.clear();
        break;
      }
      std::vector<std::size_t> kept;
      kept.reserve(members.size());
      for (const std::size_t i : members) {
        if (cellNormal(i).dot(fit.plane.normal) >= cos_max &&
            fit.plane.distance(cellPoint(i)) <= params.dist_max) {
          kept.push_back(i);
        } else {
          state[i] = 0;
        }
      }
      const bool stable = kept.size() == members.size();
      members.swap(kept);
      if (stable) break;
    }
    if (members.size() < static_cast<std::size_t>(params.min_region_cells)) {
      for (const std::size_t i : members) state[i] = 0;
      continue;
    }

    PlanarRegion region;
    region.plane = fit.plane;
    region.rms_residual = fit.rms_residual;
    region.cell_count = static_cast<int>(members.size());
    region.cells.reserve(members.size());
    std::vector<std::uint8_t> mask(n, 0);
    for (const std::size_t i : members) {
      mask[i] = 1;
      region.cells.push_back({static_cast<int>(i) / w, static_cast<int>(i) % w});
    }

    std::vector<double> areas;
    std::vector<Polygon> rings = traceBoundary(mask, map.spec(), &areas);
    std::size_t outer_idx = 0;
    double outer_area = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rings.size(); ++k) {
      if (areas[k] > outer_area) {
        outer_area = areas[k];
        outer_idx = k;
      }
    }
    for (std::size_t k = 0; k < rings.size(); ++k) {
      Polygon simplified = simplifyRing(rings[k], params.polygon_simplify_tol);
      if (k == outer_idx) region.outer = std::move(simplified);
      else region.holes.push_back(std::move(simplified));
    }
    regions.push_back(std::move(region));
  }
  return regions;
}

void writeRegions(const std::vector<PlanarRegion>& regions, std::ostream& out) {
  out.precision(17);
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const PlanarRegion& region = regions[k];
    out << "region: " << k << "\n";
    out << "plane: " << region.plane.normal.x() << " " << region.plane.normal.y() << " "
        << region.plane.normal.z() << " " << region.plane.offset << "\n";
    out << "cells: " << region.cell_count << "\n";
    out << "outer:\n";
    for (const Vec2& v : region.outer) out << v.x() << " " << v.y() << "\n";
    for (const Polygon& hole : region.holes) {
      out << "hole:\n";
      for (const Vec2& v : hole) out << v.x() << " " << v.y() << "\n";
    }
    out << "\n";
  }
}

}  // namespace relief
