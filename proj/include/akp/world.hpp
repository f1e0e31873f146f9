#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "akp/features.hpp"
#include "akp/occupancy.hpp"

namespace akp {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// One planar range scan. Beam i points at theta + fov * (i / (n - 1) - 1/2)
/// in the world frame (a single beam points straight ahead).
struct LaserScan {
  Pose2 pose;
  std::vector<double> ranges;
  double fov = 0.0;
  double max_range = 0.0;
  double timestamp = 0.0;
  Pose2 odometry;
  std::string host = "akp";
  double logger_timestamp = 0.0;

  double beam_angle(std::size_t i) const;
};

struct RectObstacle {
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;
};

struct DiscObstacle {
  Eigen::Vector2d center;
  double radius = 0.0;
};

/// Convex polygon, vertices in either winding order.
struct PolygonObstacle {
  std::vector<Eigen::Vector2d> vertices;
};

using Obstacle = std::variant<RectObstacle, DiscObstacle, PolygonObstacle>;

bool obstacle_contains(const Obstacle& obstacle, const Eigen::Vector2d& p);
/// Smallest t >= 0 with origin + t dir on the obstacle boundary, or +inf;
/// 0 when the origin lies inside the obstacle.
/// `dir` must be a unit vector.
double ray_distance(const Obstacle& obstacle, const Eigen::Vector2d& origin, const Eigen::Vector2d& dir);

/// Scan acquisition plan stored alongside a synthetic world.
struct ScanPlan {
  std::vector<Pose2> poses;
  int beams = 360;
  double fov = 2.0 * 3.14159265358979323846;
  double max_range = 10.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticWorld {
  Box bounds;
  std::vector<Obstacle> obstacles;
  ScanPlan scans;

  bool occupied(const Eigen::Vector2d& p) const;
  /// Minimum hit distance over all obstacles, +inf when nothing is hit.
  double cast(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir) const;
  void validate() const;
};

/// JSON document {bounds: [xmin, ymin, xmax, ymax], obstacles: [{type, params}],
/// scans: {poses: [[x, y, theta]], beams, fov, max_range, noise_sigma, seed}}.
/// Obstacle types: rect [xmin, ymin, xmax, ymax], disc [cx, cy, r],
/// polygon [x1, y1, x2, y2, ...].
SyntheticWorld load_world(const std::filesystem::path& path);
SyntheticWorld parse_world(const std::string& json_text);
std::string world_to_json(const SyntheticWorld& world);

/// Ray-cast scan from `pose`. Ranges get N(0, noise_sigma) noise clamped to
/// [0, max_range]; beams that hit nothing read exactly max_range.
LaserScan simulate_laser(const SyntheticWorld& world, const Pose2& pose, int beams, double fov, double max_range,
                         double noise_sigma, std::mt19937_64& rng);
LaserScan simulate_laser(const SyntheticWorld& world, const Pose2& pose, int beams, double fov, double max_range,
                         double noise_sigma, std::uint64_t seed);

/// Runs the world's scan plan.
std::vector<LaserScan> simulate_scans(const SyntheticWorld& world);

struct ScanToPointsOptions {
  int free_per_beam = 4;
  double hit_label_margin = 0.05;
  bool max_range_discard = false;
  std::uint64_t seed = 0;
  /// Points outside this box are dropped (unused when empty).
  Box bounds;
};

/// One +1 point per beam endpoint below max range plus `free_per_beam` -1
/// points uniform along the ray, short of the endpoint by the margin.
std::vector<LabeledPoint> scans_to_points(std::span<const LaserScan> scans, const ScanToPointsOptions& options);

/// CSV `x,y,label` with header.
void write_points_csv(std::ostream& os, std::span<const LabeledPoint> points);

/// Every k-th scan, starting with the first.
std::vector<LaserScan> subsample(std::span<const LaserScan> scans, int every);

}  // namespace akp
