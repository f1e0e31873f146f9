#pragma once

#include <vector>

#include <Eigen/Core>

#include "akp/occupancy.hpp"
#include "akp/path.hpp"

namespace akp {

/// Rigid-translation body: workspace point x(xi, u) = xi + u, Jacobian I.
struct BodyModel {
  std::vector<Eigen::VectorXd> points;

  /// Single body point at the origin.
  static BodyModel point_robot(int dim);
  /// Center plus `count` points on a circle of radius `radius`.
  static BodyModel disc(double radius, int count);

  std::size_t size() const noexcept { return points.size(); }
  Eigen::VectorXd workspace_point(const Eigen::VectorXd& config, std::size_t body_index) const;
  void validate(int dim) const;
};

/// One stochastic probe of the functional gradient.
struct GradientSample {
  double t = 0.0;
  std::size_t body_index = 0;
  double occupancy = 0.0;
  Eigen::VectorXd obstacle_gradient;  ///< empty when rejected
  Eigen::VectorXd dynamics_gradient;
  bool accepted = false;
};

/// J^T grad_x c at x(xi(t), u), with c the occupancy probability.
Eigen::VectorXd obstacle_gradient(const Path& path, const HilbertMap& map, const BodyModel& body, double t,
                                  const Eigen::VectorXd& u);

/// Functional gradient of the velocity energy: -xi''(t).
Eigen::VectorXd dynamics_gradient(const Path& path, double t);

struct ObjectiveValue {
  double obstacle = 0.0;
  double dynamics = 0.0;
  double total = 0.0;
};

/// Diagnostic evaluation on a uniform grid of `resolution` times.
/// obstacle: mean occupancy over the (t, u) grid; dynamics: trapezoidal
/// 1/2 int |xi'|^2 dt (of xi' - xi_o' when `relative_to_offset`);
/// total = obstacle + lambda * dynamics.
ObjectiveValue evaluate_objective(const Path& path, const HilbertMap& map, const BodyModel& body, double lambda,
                                  int resolution, bool relative_to_offset = false);

}  // namespace akp
