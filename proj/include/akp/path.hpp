#pragma once

#include <iosfwd>
#include <memory>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "akp/features.hpp"

namespace akp {

/// Metric tensor on feature-weight space, stored factorized. Updates are
/// preconditioned by its inverse.
class Metric {
 public:
  enum class Kind { kIdentity, kGram };

  static Metric identity(int size);
  /// (1/n) sum_g phi(t_g) phi(t_g)^T + ridge I over n uniform times in [0,1].
  static Metric gram(const FeatureMap& features, int grid_points = 200, double ridge = 1e-6);

  Kind kind() const noexcept { return kind_; }
  int size() const noexcept { return size_; }
  int grid_points() const noexcept { return grid_points_; }
  double ridge() const noexcept { return ridge_; }

  /// M^{-1} v.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& v) const;

 private:
  Kind kind_ = Kind::kIdentity;
  int size_ = 0;
  int grid_points_ = 0;
  double ridge_ = 0.0;
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> factor_;
};

/// Piecewise-linear offset path through waypoints, parameterized by
/// normalized arc length on [0,1].
class OffsetPath {
 public:
  static OffsetPath straight(const Eigen::VectorXd& start, const Eigen::VectorXd& goal);
  /// D x K waypoint matrix, K >= 2.
  static OffsetPath polyline(Eigen::MatrixXd waypoints);

  int dim() const noexcept { return static_cast<int>(waypoints_.rows()); }
  const Eigen::MatrixXd& waypoints() const noexcept { return waypoints_; }
  Eigen::VectorXd start() const { return waypoints_.col(0); }
  Eigen::VectorXd goal() const { return waypoints_.col(waypoints_.cols() - 1); }

  Eigen::VectorXd eval(double t, int order = 0) const;

 private:
  Eigen::MatrixXd waypoints_;
  Eigen::VectorXd knots_;
};

/// Two Nystrom landmarks at t = 0 and t = 1.
FeatureMap default_boundary_features(double lengthscale = 0.2);

/// xi(t) = xi_o(t) + W_b phi_b(t) + W phi(t), with W a D x M matrix and W_b
/// a D x M_b matrix.
class Path {
 public:
  Path(FeatureMap features, FeatureMap boundary_features, OffsetPath offset);

  /// Straight-line offset from `start` to `goal`, zero weights.
  static Path straight_line(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, FeatureMap features,
                            FeatureMap boundary_features = default_boundary_features());

  int dim() const noexcept { return offset_.dim(); }
  const FeatureMap& features() const noexcept { return features_; }
  const FeatureMap& boundary_features() const noexcept { return boundary_features_; }
  const OffsetPath& offset() const noexcept { return offset_; }

  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  Eigen::MatrixXd& weights() noexcept { return weights_; }
  const Eigen::MatrixXd& boundary_weights() const noexcept { return boundary_weights_; }
  Eigen::MatrixXd& boundary_weights() noexcept { return boundary_weights_; }

  const Metric& metric() const noexcept { return metric_; }
  void set_metric(Metric metric);

  /// order-th time derivative of the path at t, order in {0, 1, 2}.
  Eigen::VectorXd eval(double t, int order = 0) const;

  /// Path points at `samples` uniform times, one column each.
  Eigen::MatrixXd sample(int samples) const;

 private:
  FeatureMap features_;
  FeatureMap boundary_features_;
  OffsetPath offset_;
  Eigen::MatrixXd weights_;
  Eigen::MatrixXd boundary_weights_;
  Metric metric_;
};

/// CSV rows `t,x_1,...,x_D` at `resolution` uniform times (with header).
void write_path_csv(std::ostream& os, const Path& path, int resolution);

}  // namespace akp
