#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "akp/features.hpp"

namespace akp {

/// Workspace point with label +1 (occupied) or -1 (free).
struct LabeledPoint {
  Eigen::VectorXd x;
  int label = 0;
};

struct TrainOptions {
  int epochs = 5;
  double step = 0.01;
  double l2 = 1e-4;
  int batch = 1;
  std::uint64_t seed = 0;
};

struct TrainStats {
  std::size_t occupied = 0;
  std::size_t free = 0;
  double log_loss = 0.0;        ///< mean training log-loss after fitting
  double prior_log_loss = 0.0;  ///< log 2, the loss of the 0.5 prior
};

/// Continuous occupancy model p(occupied | x) = sigmoid(w . phi(x) + b) over
/// spatial kernel features. Immutable after training; concurrent queries
/// are safe.
class HilbertMap {
 public:
  /// Untrained map: zero weights, p = 0.5 everywhere.
  explicit HilbertMap(FeatureMap features);
  HilbertMap(FeatureMap features, Eigen::VectorXd weights, double bias, TrainOptions train_options = {});

  const FeatureMap& features() const noexcept { return features_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const TrainOptions& train_options() const noexcept { return train_options_; }
  int workspace_dim() const noexcept { return features_.input_dim(); }
  const Box& domain() const noexcept { return features_.domain(); }

  double logit(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Occupancy probability, always strictly inside (0,1).
  double query(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// d p / d x = p (1 - p) J^T w.
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double query_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> gradient) const;

 private:
  void check_point(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  FeatureMap features_;
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
  TrainOptions train_options_;
};

/// Fits an L2-regularized logistic classifier by mini-batch SGD. The input
/// is put into a canonical order before sampling, so the result depends on
/// the point set and the seed only.
HilbertMap train_map(std::span<const LabeledPoint> points, FeatureMap features, const TrainOptions& options,
                     TrainStats* stats = nullptr);

/// Mean logistic loss of the map on the labeled points.
double mean_log_loss(const HilbertMap& map, std::span<const LabeledPoint> points);

/// Bounding box of the points, grown by `margin` on every side.
Box bounding_box(std::span<const LabeledPoint> points, double margin = 0.0);

}  // namespace akp
