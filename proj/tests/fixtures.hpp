#pragma once

// Small synthetic maps shared by the tests. Each is trained once per process.

#include <cmath>
#include <numbers>
#include <vector>

#include "akp/occupancy.hpp"
#include "akp/world.hpp"

namespace akp::testing {

inline Box square(double lo, double hi) { return Box{Eigen::Vector2d(lo, lo), Eigen::Vector2d(hi, hi)}; }

/// Scans from `count` poses on a circle of `radius` around `center`.
inline std::vector<Pose2> ring_poses(const Eigen::Vector2d& center, double radius, int count) {
  std::vector<Pose2> poses;
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * std::numbers::pi * i / count;
    poses.push_back({center.x() + radius * std::cos(a), center.y() + radius * std::sin(a), 0.0});
  }
  return poses;
}

inline HilbertMap train_world(const SyntheticWorld& world, int features, double lengthscale, int epochs = 10) {
  ScanToPointsOptions opts;
  opts.bounds = world.bounds;
  opts.seed = 1;
  const auto scans = simulate_scans(world);
  const auto points = scans_to_points(scans, opts);
  TrainOptions train;
  train.step = 0.5;
  train.epochs = epochs;
  train.seed = 2;
  return train_map(points, FeatureMap::rff(features, lengthscale, 5, world.bounds), train);
}

/// Disc of radius 1 at (3, 3) in [0, 6]^2, observed from all sides.
inline SyntheticWorld disc_world() {
  SyntheticWorld w;
  w.bounds = square(0.0, 6.0);
  w.obstacles.push_back(DiscObstacle{Eigen::Vector2d(3, 3), 1.0});
  w.scans.poses = ring_poses(Eigen::Vector2d(3, 3), 2.2, 8);
  w.scans.beams = 360;
  w.scans.max_range = 8.0;
  return w;
}

inline const HilbertMap& disc_map() {
  static const HilbertMap map = train_world(disc_world(), 800, 0.3);
  return map;
}

/// Walls only at the border of [0, 6]^2: the interior is observed free.
inline SyntheticWorld empty_room() {
  SyntheticWorld w;
  w.bounds = square(0.0, 6.0);
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(0, 0), Eigen::Vector2d(6, 0.1)});
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(0, 5.9), Eigen::Vector2d(6, 6)});
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(0, 0), Eigen::Vector2d(0.1, 6)});
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(5.9, 0), Eigen::Vector2d(6, 6)});
  w.scans.poses = {{1.5, 1.5, 0}, {4.5, 1.5, 0}, {1.5, 4.5, 0}, {4.5, 4.5, 0}, {3, 3, 0}};
  w.scans.beams = 360;
  w.scans.max_range = 10.0;
  return w;
}

inline const HilbertMap& empty_room_map() {
  static const HilbertMap map = train_world(empty_room(), 600, 0.4);
  return map;
}

}  // namespace akp::testing
