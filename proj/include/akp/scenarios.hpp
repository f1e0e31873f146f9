#pragma once

#include <Eigen/Core>

#include "akp/world.hpp"

namespace akp::scenarios {

/// Two rectangles, one above and one below the straight line between the
/// endpoints, each overlapping it by 0.1 m so the initial line collides.
/// Observed by simulated 360-degree scans.
SyntheticWorld two_rectangle_world();
Eigen::Vector2d two_rectangle_start();
Eigen::Vector2d two_rectangle_goal();

/// Office-style floor plan (rooms off a corridor loop) used to produce a
/// CARMEN log when the real Intel-Lab recording is not available.
SyntheticWorld office_world();
Eigen::Vector2d office_start();
Eigen::Vector2d office_goal();
/// Scans taken along a robot tour of the office, with odometry drift in
/// the raw pose fields.
std::vector<LaserScan> office_tour_scans(std::uint64_t seed);

}  // namespace akp::scenarios
