#include "akp/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace akp::scenarios {
namespace {

RectObstacle rect(double x0, double y0, double x1, double y1) { return RectObstacle{{x0, y0}, {x1, y1}}; }

}  // namespace

SyntheticWorld two_rectangle_world() {
  SyntheticWorld w;
  w.bounds = Box{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(10.0, 10.0)};
  w.obstacles = {rect(3.0, 4.9, 4.0, 6.9), rect(6.0, 3.1, 7.0, 5.1)};
  w.scans.poses = {{1.0, 5.0, 0.0}, {9.0, 5.0, 0.0}, {5.0, 8.0, 0.0}, {5.0, 2.0, 0.0}, {2.0, 2.0, 0.0},
                   {8.0, 8.0, 0.0}, {2.0, 8.0, 0.0}, {8.0, 2.0, 0.0}, {5.0, 5.0, 0.0}};
  w.scans.beams = 360;
  w.scans.fov = 2.0 * std::numbers::pi;
  w.scans.max_range = 10.0;
  w.scans.noise_sigma = 0.02;
  w.scans.seed = 17;
  return w;
}

Eigen::Vector2d two_rectangle_start() { return {1.0, 5.0}; }
Eigen::Vector2d two_rectangle_goal() { return {9.0, 5.0}; }

SyntheticWorld office_world() {
  SyntheticWorld w;
  w.bounds = Box{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(16.0, 12.0)};
  w.obstacles = {
      // outer walls
      rect(0.0, 0.0, 16.0, 0.2), rect(0.0, 11.8, 16.0, 12.0), rect(0.0, 0.0, 0.2, 12.0), rect(15.8, 0.0, 16.0, 12.0),
      // block of rooms inside the corridor loop, seen from the corridor only
      rect(3.0, 3.0, 13.0, 3.2), rect(3.0, 8.8, 13.0, 9.0), rect(3.0, 3.0, 3.2, 9.0), rect(12.8, 3.0, 13.0, 9.0),
  };
  return w;
}

Eigen::Vector2d office_start() { return {1.6, 1.6}; }
Eigen::Vector2d office_goal() { return {14.4, 10.4}; }

std::vector<LaserScan> office_tour_scans(std::uint64_t seed) {
  const SyntheticWorld world = office_world();
  // Corridor loop through the four corridor corners.
  const std::vector<Eigen::Vector2d> loop = {{1.6, 1.6}, {14.4, 1.6}, {14.4, 10.4}, {1.6, 10.4}, {1.6, 1.6}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<LaserScan> scans;
  Pose2 drift;
  double stamp = 0.0;
  for (std::size_t seg = 0; seg + 1 < loop.size(); ++seg) {
    const Eigen::Vector2d a = loop[seg];
    const Eigen::Vector2d b = loop[seg + 1];
    const double heading = std::atan2(b.y() - a.y(), b.x() - a.x());
    const int steps = static_cast<int>(std::ceil((b - a).norm() / 0.4));
    for (int k = 0; k < steps; ++k) {
      const Eigen::Vector2d p = a + (b - a) * (static_cast<double>(k) / steps);
      const Pose2 pose{p.x(), p.y(), heading};
      LaserScan scan = simulate_laser(world, pose, 181, std::numbers::pi, 30.0, 0.02, rng);
      drift.x += 0.01 * noise(rng);
      drift.y += 0.01 * noise(rng);
      drift.theta += 0.002 * noise(rng);
      scan.odometry = Pose2{pose.x + drift.x, pose.y + drift.y, pose.theta + drift.theta};
      scan.timestamp = scan.logger_timestamp = stamp;
      stamp += 0.2;
      scans.push_back(std::move(scan));
    }
  }
  return scans;
}

}  // namespace akp::scenarios
