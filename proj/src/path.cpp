#include "akp/path.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "akp/error.hpp"

namespace akp {

Metric Metric::identity(int size) {
  if (size < 1) throw InvalidArgument("metric size must be positive");
  Metric m;
  m.size_ = size;
  return m;
}

Metric Metric::gram(const FeatureMap& features, int grid_points, double ridge) {
  if (grid_points < 2) throw InvalidArgument("Gram metric needs at least two grid points");
  if (!(ridge >= 0.0)) throw InvalidArgument("Gram metric ridge must be non-negative");
  const int m = features.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < grid_points; ++i) {
    const Eigen::VectorXd phi = features.eval_time(static_cast<double>(i) / (grid_points - 1));
    g.selfadjointView<Eigen::Lower>().rankUpdate(phi, 1.0 / grid_points);
  }
  g = g.selfadjointView<Eigen::Lower>();
  g.diagonal().array() += ridge;
  auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(g);
  if (llt->info() != Eigen::Success) {
    throw NumericalError("Gram metric is not positive definite; increase the ridge");
  }
  Metric out;
  out.kind_ = Kind::kGram;
  out.size_ = m;
  out.grid_points_ = grid_points;
  out.ridge_ = ridge;
  out.factor_ = std::move(llt);
  return out;
}

Eigen::VectorXd Metric::solve(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != size_) throw InvalidArgument("metric dimension mismatch");
  if (kind_ == Kind::kIdentity) return v;
  return factor_->solve(v);
}

OffsetPath OffsetPath::straight(const Eigen::VectorXd& start, const Eigen::VectorXd& goal) {
  if (start.size() != goal.size()) throw InvalidArgument("start and goal dimensions differ");
  Eigen::MatrixXd w(start.size(), 2);
  w.col(0) = start;
  w.col(1) = goal;
  return polyline(std::move(w));
}

OffsetPath OffsetPath::polyline(Eigen::MatrixXd waypoints) {
  if (waypoints.rows() < 1 || waypoints.cols() < 2) {
    throw InvalidArgument("offset polyline needs at least two waypoints");
  }
  if (!waypoints.allFinite()) throw InvalidArgument("offset waypoints must be finite");
  const Eigen::Index k = waypoints.cols();
  Eigen::VectorXd knots(k);
  knots(0) = 0.0;
  for (Eigen::Index i = 1; i < k; ++i) {
    knots(i) = knots(i - 1) + (waypoints.col(i) - waypoints.col(i - 1)).norm();
  }
  const double total = knots(k - 1);
  if (total > 0.0) {
    knots /= total;
  } else {
    knots = Eigen::VectorXd::LinSpaced(k, 0.0, 1.0);
  }
  knots(k - 1) = 1.0;

  OffsetPath p;
  p.waypoints_ = std::move(waypoints);
  p.knots_ = std::move(knots);
  return p;
}

Eigen::VectorXd OffsetPath::eval(double t, int order) const {
  if (order < 0 || order > 2) throw InvalidArgument("unsupported derivative order");
  if (order == 2) return Eigen::VectorXd::Zero(dim());
  t = std::clamp(t, 0.0, 1.0);
  const Eigen::Index k = knots_.size();
  // Segment i spans [knots_(i), knots_(i+1)]; zero-length segments are skipped.
  Eigen::Index i = std::upper_bound(knots_.data(), knots_.data() + k, t) - knots_.data() - 1;
  i = std::clamp<Eigen::Index>(i, 0, k - 2);
  while (i > 0 && knots_(i + 1) <= knots_(i)) --i;
  const double span = knots_(i + 1) - knots_(i);
  if (!(span > 0.0)) {
    return order == 0 ? Eigen::VectorXd(waypoints_.col(i)) : Eigen::VectorXd::Zero(dim());
  }
  const Eigen::VectorXd delta = waypoints_.col(i + 1) - waypoints_.col(i);
  if (order == 1) return delta / span;
  if (k == 2) return waypoints_.col(0) + t * delta;
  return waypoints_.col(i) + ((t - knots_(i)) / span) * delta;
}

FeatureMap default_boundary_features(double lengthscale) {
  Eigen::MatrixXd landmarks(1, 2);
  landmarks << 0.0, 1.0;
  return FeatureMap::nystrom(std::move(landmarks), lengthscale);
}

Path::Path(FeatureMap features, FeatureMap boundary_features, OffsetPath offset)
    : features_(std::move(features)),
      boundary_features_(std::move(boundary_features)),
      offset_(std::move(offset)),
      weights_(Eigen::MatrixXd::Zero(offset_.dim(), features_.size())),
      boundary_weights_(Eigen::MatrixXd::Zero(offset_.dim(), boundary_features_.size())),
      metric_(Metric::identity(features_.size())) {
  if (features_.input_dim() != 1 || boundary_features_.input_dim() != 1) {
    throw InvalidArgument("path features must be defined over time");
  }
}

Path Path::straight_line(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, FeatureMap features,
                         FeatureMap boundary_features) {
  return Path(std::move(features), std::move(boundary_features), OffsetPath::straight(start, goal));
}

void Path::set_metric(Metric metric) {
  if (metric.size() != features_.size()) throw InvalidArgument("metric size does not match the feature count");
  metric_ = std::move(metric);
}

Eigen::VectorXd Path::eval(double t, int order) const {
  Eigen::VectorXd out = offset_.eval(t, order);
  out.noalias() += boundary_weights_ * boundary_features_.eval_time(t, order);
  out.noalias() += weights_ * features_.eval_time(t, order);
  return out;
}

Eigen::MatrixXd Path::sample(int samples) const {
  if (samples < 2) throw InvalidArgument("path sampling needs at least two samples");
  Eigen::MatrixXd out(dim(), samples);
  for (int i = 0; i < samples; ++i) out.col(i) = eval(static_cast<double>(i) / (samples - 1));
  return out;
}

void write_path_csv(std::ostream& os, const Path& path, int resolution) {
  if (resolution < 2) throw InvalidArgument("path export resolution must be at least 2");
  os << 't';
  for (int d = 0; d < path.dim(); ++d) os << ",x_" << (d + 1);
  os << '\n' << std::setprecision(17);
  for (int i = 0; i < resolution; ++i) {
    const double t = static_cast<double>(i) / (resolution - 1);
    const Eigen::VectorXd x = path.eval(t);
    os << t;
    for (int d = 0; d < path.dim(); ++d) os << ',' << x(d);
    os << '\n';
  }
}

}  // namespace akp
