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

#include "relief/core/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace relief {

void RunConfig::validate() const {
  map.validate();
  pipeline.update.validate();
  pipeline.update.exclusion.validate();
  pipeline.drift.validate();
  pipeline.cleanup.validate();
  pipeline.traversability.validate();
  pipeline.overlap.validate();
  segmentation.validate();
  sensor.validate();
  if (scans < 0) throw Error(ErrorCode::kInvalidArgument, "run.scans must be >= 0");
  if (publish_every < 1) throw Error(ErrorCode::kInvalidArgument, "run.publish_every must be >= 1");
}

namespace {

constexpr double kDegToRad = 0.017453292519943295;

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError, "config line " + std::to_string(line_no) + ": " + what);
}

struct ValueParser {
  std::istringstream stream;
  int line_no;

  explicit ValueParser(const std::string& text, int line) : stream(text), line_no(line) {}

  double number() {
    double v;
    if (!(stream >> v)) fail(line_no, "expected a number");
    return v;
  }
  int integer() { return static_cast<int>(number()); }
  bool flag() {
    std::string word;
    if (!(stream >> word)) fail(line_no, "expected true/false");
    if (word == "true" || word == "1" || word == "on") return true;
    if (word == "false" || word == "0" || word == "off") return false;
    fail(line_no, "expected true/false, got '" + word + "'");
  }
  std::string word() {
    std::string w;
    if (!(stream >> w)) fail(line_no, "expected a word");
    return w;
  }
  bool hasMore() {
    stream >> std::ws;
    return stream.peek() != EOF;
  }
  void finish() {
    if (hasMore()) fail(line_no, "trailing values");
  }
  Axis axis() {
    if (!hasMore()) return Axis::kPosX;
    const std::string w = word();
    if (w == "+x") return Axis::kPosX;
    if (w == "-x") return Axis::kNegX;
    if (w == "+y") return Axis::kPosY;
    if (w == "-y") return Axis::kNegY;
    fail(line_no, "axis must be one of +x -x +y -y");
  }
};

}  // namespace

RunConfig loadRunConfig(std::istream& in) {
  RunConfig cfg;
  bool sensor_pattern_set = false;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);
    ValueParser p(value, line_no);

    if (key == "map.resolution") cfg.map.resolution = p.number();
    else if (key == "map.width") cfg.map.width = p.integer();
    else if (key == "map.height") cfg.map.height = p.integer();
    else if (key == "map.center_x") cfg.map.center.x() = p.number();
    else if (key == "map.center_y") cfg.map.center.y() = p.number();

    else if (key == "update.mahalanobis_threshold") cfg.pipeline.update.mahalanobis_threshold = p.number();
    else if (key == "update.sigma_outlier2") cfg.pipeline.update.sigma_outlier2 = p.number();
    else if (key == "update.wall_count_threshold") cfg.pipeline.update.wall_count_threshold = p.integer();
    else if (key == "update.sigma_t2") cfg.pipeline.update.sigma_t2 = p.number();
    else if (key == "update.sigma_max2") cfg.pipeline.update.sigma_max2 = p.number();
    else if (key == "update.sigma_init2") cfg.pipeline.update.sigma_init2 = p.number();
    else if (key == "update.nominal_period") cfg.pipeline.update.nominal_update_period = p.number();
    else if (key == "update.max_range") cfg.pipeline.update.max_range = p.number();

    // One noise model: the virtual sensor renders with it and the fusion
    // pipeline weighs measurements by it.
    else if (key == "noise.alpha_d") {
      cfg.pipeline.update.noise.alpha_d = p.number();
      cfg.sensor.noise.alpha_d = cfg.pipeline.update.noise.alpha_d;
    } else if (key == "noise.sigma_p_min2") {
      cfg.pipeline.update.noise.sigma_p_min2 = p.number();
      cfg.sensor.noise.sigma_p_min2 = cfg.pipeline.update.noise.sigma_p_min2;
    }

    else if (key == "exclusion.enabled") cfg.pipeline.update.exclusion.enabled = p.flag();
    else if (key == "exclusion.theta_a_deg") cfg.pipeline.update.exclusion.theta_a = p.number() * kDegToRad;
    else if (key == "exclusion.b") cfg.pipeline.update.exclusion.b = p.number();
    else if (key == "exclusion.c") cfg.pipeline.update.exclusion.c = p.number();
    else if (key == "exclusion.d_max") cfg.pipeline.update.exclusion.d_max = p.number();

    else if (key == "drift.enabled") cfg.pipeline.drift.enabled = p.flag();
    else if (key == "drift.traversability_threshold") cfg.pipeline.drift.traversability_threshold = p.number();
    else if (key == "drift.min_points") cfg.pipeline.drift.min_points = p.integer();
    else if (key == "drift.max_offset") cfg.pipeline.drift.max_offset_per_scan = p.number();

    else if (key == "cleanup.enabled") cfg.pipeline.cleanup.cleanup_enabled = p.flag();
    else if (key == "cleanup.upper_bound_enabled") cfg.pipeline.cleanup.upper_bound_enabled = p.flag();
    else if (key == "cleanup.alpha_n") cfg.pipeline.cleanup.alpha_n = p.number();
    else if (key == "cleanup.t_free") cfg.pipeline.cleanup.t_free = p.number();

    else if (key == "traversability.slope_max_deg") cfg.pipeline.traversability.slope_max = p.number() * kDegToRad;
    else if (key == "traversability.step_max") cfg.pipeline.traversability.step_max = p.number();
    else if (key == "traversability.roughness_max") cfg.pipeline.traversability.roughness_max = p.number();
    else if (key == "traversability.window") cfg.pipeline.traversability.window = p.integer();
    else if (key == "traversability.weights") {
      cfg.pipeline.traversability.w_slope = p.number();
      cfg.pipeline.traversability.w_step = p.number();
      cfg.pipeline.traversability.w_roughness = p.number();
    } else if (key == "traversability.convnet") {
      cfg.convnet_path = p.word();
      cfg.pipeline.use_convnet_traversability = true;
    }

    else if (key == "overlap.enabled") cfg.pipeline.overlap.enabled = p.flag();
    else if (key == "overlap.radius") cfg.pipeline.overlap.radius = p.number();
    else if (key == "overlap.height_threshold") cfg.pipeline.overlap.height_threshold = p.number();

    else if (key == "segmentation.normal_angle_max_deg") cfg.segmentation.normal_angle_max = p.number() * kDegToRad;
    else if (key == "segmentation.dist_max") cfg.segmentation.dist_max = p.number();
    else if (key == "segmentation.min_region_cells") cfg.segmentation.min_region_cells = p.integer();
    else if (key == "segmentation.simplify_tol") cfg.segmentation.polygon_simplify_tol = p.number();

    else if (key == "sensor.pattern") {
      const std::string w = p.word();
      if (w == "grid") cfg.sensor.pattern = SensorSpec::Pattern::kGrid;
      else if (w == "rings") cfg.sensor.pattern = SensorSpec::Pattern::kRings;
      else fail(line_no, "sensor.pattern must be grid or rings");
      sensor_pattern_set = true;
    } else if (key == "sensor.h_fov_deg") cfg.sensor.h_fov = p.number() * kDegToRad;
    else if (key == "sensor.v_fov_deg") cfg.sensor.v_fov = p.number() * kDegToRad;
    else if (key == "sensor.cols") cfg.sensor.cols = p.integer();
    else if (key == "sensor.rows") cfg.sensor.rows = p.integer();
    else if (key == "sensor.ring_elevations_deg") {
      cfg.sensor.ring_elevations.clear();
      while (p.hasMore()) cfg.sensor.ring_elevations.push_back(p.number() * kDegToRad);
      if (!sensor_pattern_set) cfg.sensor.pattern = SensorSpec::Pattern::kRings;
    } else if (key == "sensor.azimuth_steps") cfg.sensor.azimuth_steps = p.integer();
    else if (key == "sensor.max_range") cfg.sensor.max_range = p.number();
    else if (key == "sensor.rate") cfg.sensor.rate = p.number();

    else if (key == "scene.ground") cfg.scene.addGround(p.number());
    else if (key == "scene.box") {
      const double cx = p.number(), cy = p.number(), cz = p.number();
      const double sx = p.number(), sy = p.number(), sz = p.number();
      cfg.scene.addBox({cx, cy, cz}, {sx, sy, sz});
    } else if (key == "scene.moving_box") {
      const double cx = p.number(), cy = p.number(), cz = p.number();
      const double sx = p.number(), sy = p.number(), sz = p.number();
      const double vx = p.number(), vy = p.number(), vz = p.number();
      const double t0 = p.number(), t1 = p.number();
      cfg.scene.addMovingBox({cx, cy, cz}, {sx, sy, sz}, {vx, vy, vz}, t0, t1);
    } else if (key == "scene.stairs") {
      const double ox = p.number(), oy = p.number(), oz = p.number();
      const double sh = p.number(), sd = p.number();
      const int count = p.integer();
      const double width = p.number();
      cfg.scene.addStairs({ox, oy, oz}, sh, sd, count, width, p.axis());
    } else if (key == "scene.ramp") {
      const double x0 = p.number(), y0 = p.number(), x1 = p.number(), y1 = p.number();
      const double zb = p.number(), slope = p.number();
      cfg.scene.addRamp({x0, y0}, {x1, y1}, zb, slope, p.axis());
    } else if (key == "scene.wall") {
      const double x0 = p.number(), y0 = p.number(), x1 = p.number(), y1 = p.number();
      const double height = p.number(), thickness = p.number();
      cfg.scene.addWall({x0, y0}, {x1, y1}, height, thickness);
    } else if (key == "scene.slab_overhang") {
      const double x0 = p.number(), y0 = p.number(), x1 = p.number(), y1 = p.number();
      const double z = p.number();
      const double thickness = p.hasMore() ? p.number() : 0.1;
      cfg.scene.addSlabOverhang({x0, y0}, {x1, y1}, z, thickness);
    } else if (key == "scene.floor2") {
      const double x0 = p.number(), y0 = p.number(), x1 = p.number(), y1 = p.number();
      const double z = p.number();
      const double hx0 = p.number(), hy0 = p.number(), hx1 = p.number(), hy1 = p.number();
      const double thickness = p.hasMore() ? p.number() : 0.1;
      cfg.scene.addFloor2({x0, y0}, {x1, y1}, z, {hx0, hy0}, {hx1, hy1}, thickness);
    }

    else if (key == "traj.waypoint") {
      Waypoint wp;
      wp.time = p.number();
      wp.position = {p.number(), p.number(), p.number()};
      if (p.hasMore()) {
        const double qw = p.number(), qx = p.number(), qy = p.number(), qz = p.number();
        wp.orientation = Eigen::Quaterniond(qw, qx, qy, qz);
        if (std::abs(wp.orientation.norm() - 1.0) > 1e-6)
          fail(line_no, "waypoint quaternion is not normalized");
        wp.orientation.normalize();
      }
      cfg.trajectory.waypoints.push_back(wp);
    } else if (key == "traj.drift_rate") cfg.trajectory.drift_rate = p.number();
    else if (key == "traj.drift_start") cfg.trajectory.drift_start = p.number();

    else if (key == "run.scans") cfg.scans = p.integer();
    else if (key == "run.publish_every") cfg.publish_every = p.integer();
    else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(p.number());
    else if (key == "run.mode") {
      const std::string w = p.word();
      if (w == "det" || w == "deterministic") cfg.pipeline.mode = ExecMode::kDeterministic;
      else if (w == "par" || w == "parallel") cfg.pipeline.mode = ExecMode::kParallel;
      else fail(line_no, "run.mode must be det or par");
    }

    else fail(line_no, "unknown key '" + key + "'");

    if (key != "sensor.ring_elevations_deg") p.finish();
  }

  cfg.validate();
  return cfg;
}

RunConfig loadRunConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config: " + path);
  return loadRunConfig(in);
}

}  // namespace relief
