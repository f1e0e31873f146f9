#include "akp/objective.hpp"

#include <cmath>
#include <numbers>

#include "akp/error.hpp"

namespace akp {

BodyModel BodyModel::point_robot(int dim) {
  if (dim < 1) throw InvalidArgument("body dimension must be positive");
  return BodyModel{{Eigen::VectorXd::Zero(dim)}};
}

BodyModel BodyModel::disc(double radius, int count) {
  if (!(radius >= 0.0) || count < 0) throw InvalidArgument("disc body parameters are malformed");
  BodyModel body = point_robot(2);
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * std::numbers::pi * i / count;
    body.points.push_back(Eigen::Vector2d(radius * std::cos(a), radius * std::sin(a)));
  }
  return body;
}

Eigen::VectorXd BodyModel::workspace_point(const Eigen::VectorXd& config, std::size_t body_index) const {
  return config + points.at(body_index);
}

void BodyModel::validate(int dim) const {
  if (points.empty()) throw InvalidArgument("body model needs at least one point");
  for (const auto& u : points) {
    if (u.size() != dim || !u.allFinite()) throw InvalidArgument("body point dimension mismatch");
  }
}

Eigen::VectorXd obstacle_gradient(const Path& path, const HilbertMap& map, const BodyModel&, double t,
                                  const Eigen::VectorXd& u) {
  const Eigen::VectorXd x = path.eval(t) + u;
  return map.gradient(x);
}

Eigen::VectorXd dynamics_gradient(const Path& path, double t) { return -path.eval(t, 2); }

ObjectiveValue evaluate_objective(const Path& path, const HilbertMap& map, const BodyModel& body, double lambda,
                                  int resolution, bool relative_to_offset) {
  if (resolution < 2) throw InvalidArgument("objective resolution must be at least 2");
  if (!(lambda >= 0.0)) throw InvalidArgument("objective lambda must be non-negative");
  body.validate(path.dim());

  double occupancy = 0.0;
  double energy = 0.0;
  double prev_sq = 0.0;
  const double h = 1.0 / (resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    const double t = i * h;
    const Eigen::VectorXd x = path.eval(t);
    for (std::size_t b = 0; b < body.size(); ++b) occupancy += map.query(body.workspace_point(x, b));
    Eigen::VectorXd v = path.eval(t, 1);
    if (relative_to_offset) v -= path.offset().eval(t, 1);
    const double sq = v.squaredNorm();
    if (i > 0) energy += 0.5 * h * (prev_sq + sq);
    prev_sq = sq;
  }
  ObjectiveValue out;
  out.obstacle = occupancy / static_cast<double>(resolution * body.size());
  out.dynamics = 0.5 * energy;
  out.total = out.obstacle + lambda * out.dynamics;
  return out;
}

}  // namespace akp
