#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "akp/occupancy.hpp"

namespace akp {

struct RrtConfig {
  long max_samples = 20000;
  double steer_step = 0.5;
  /// Scale of the shrinking radius gamma (log n / n)^(1/D); 0 selects the
  /// asymptotic-optimality bound from the domain volume.
  double neighbor_radius_gamma = 0.0;
  double collision_resolution = 0.05;
  double p_safe = 0.55;
  double goal_bias = 0.05;
  std::uint64_t seed = 0;
  /// Stop once the best goal cost improved by less than this fraction over
  /// `stall_samples` consecutive samples. 0 disables the early stop.
  long stall_samples = 0;
  double stall_improvement = 1e-3;

  void validate() const;
};

enum class RrtStatus { kSolved, kNoPath };

const char* to_string(RrtStatus status);

struct RrtNode {
  Eigen::VectorXd x;
  int parent = -1;
  double cost = 0.0;
};

struct RrtResult {
  RrtStatus status = RrtStatus::kNoPath;
  /// D x K waypoints from start to goal; empty when no path was found.
  Eigen::MatrixXd polyline;
  double cost = 0.0;
  long samples = 0;
  /// -1 when the goal was never reached.
  long samples_to_first_solution = -1;
  double gamma = 0.0;
  std::vector<RrtNode> tree;
  /// (samples drawn, best goal cost) each time the best cost changed.
  std::vector<std::pair<long, double>> cost_history;
};

/// RRT* on the occupancy model: a configuration is free iff its occupancy
/// is at most P_safe, and edges are checked every `collision_resolution`.
/// Throws InvalidEndpoint if start or goal is not free.
RrtResult rrt_star_plan(const HilbertMap& map, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                        const RrtConfig& config);

/// Sum of segment lengths of a D x K polyline.
double polyline_length(const Eigen::MatrixXd& polyline);

/// Writes `x,y` (or `x_1..x_D`) rows, one waypoint per row.
void write_polyline_csv(std::ostream& os, const Eigen::MatrixXd& polyline);

}  // namespace akp
