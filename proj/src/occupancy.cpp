#include "akp/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "akp/error.hpp"

namespace akp {
namespace {

constexpr double kProbFloor = 1e-15;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

bool point_less(const LabeledPoint& a, const LabeledPoint& b) {
  if (a.label != b.label) return a.label < b.label;
  return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
}

}  // namespace

HilbertMap::HilbertMap(FeatureMap features)
    : features_(std::move(features)), weights_(Eigen::VectorXd::Zero(features_.size())) {}

HilbertMap::HilbertMap(FeatureMap features, Eigen::VectorXd weights, double bias, TrainOptions train_options)
    : features_(std::move(features)), weights_(std::move(weights)), bias_(bias), train_options_(train_options) {
  if (weights_.size() != features_.size()) throw InvalidArgument("map weight count does not match the features");
  if (!weights_.allFinite() || !std::isfinite(bias_)) throw InvalidArgument("map weights must be finite");
}

void HilbertMap::check_point(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != workspace_dim()) throw InvalidArgument("query point dimension does not match the map");
}

double HilbertMap::logit(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_point(x);
  return features_.dot(weights_, x) + bias_;
}

double HilbertMap::query(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return std::clamp(sigmoid(logit(x)), kProbFloor, 1.0 - kProbFloor);
}

Eigen::VectorXd HilbertMap::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd g(workspace_dim());
  query_with_gradient(x, g);
  return g;
}

double HilbertMap::query_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       Eigen::Ref<Eigen::VectorXd> gradient) const {
  check_point(x);
  const double z = features_.dot_with_gradient(weights_, x, gradient) + bias_;
  const double p = sigmoid(z);
  gradient *= p * (1.0 - p);
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

Box bounding_box(std::span<const LabeledPoint> points, double margin) {
  if (points.empty()) throw InvalidArgument("bounding box of an empty point set");
  Box box{points.front().x, points.front().x};
  for (const auto& p : points) {
    box.lo = box.lo.cwiseMin(p.x);
    box.hi = box.hi.cwiseMax(p.x);
  }
  box.lo.array() -= margin;
  box.hi.array() += margin;
  return box;
}

double mean_log_loss(const HilbertMap& map, std::span<const LabeledPoint> points) {
  if (points.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : points) total += logistic_loss(p.label * map.logit(p.x));
  return total / static_cast<double>(points.size());
}

HilbertMap train_map(std::span<const LabeledPoint> points, FeatureMap features, const TrainOptions& options,
                     TrainStats* stats) {
  if (options.epochs < 1 || options.batch < 1) throw InvalidArgument("training epochs and batch must be positive");
  if (!(options.step > 0.0) || !(options.l2 >= 0.0)) throw InvalidArgument("training step must be positive");
  if (points.empty()) throw DegenerateData("no training points");

  const int dim = features.input_dim();
  std::size_t occupied = 0;
  std::size_t free = 0;
  for (const auto& p : points) {
    if (p.x.size() != dim) throw InvalidArgument("training point dimension does not match the features");
    if (!p.x.allFinite()) throw InvalidArgument("training point has non-finite coordinates");
    if (p.label == 1) {
      ++occupied;
    } else if (p.label == -1) {
      ++free;
    } else {
      throw InvalidArgument("training labels must be +1 or -1");
    }
  }
  if (occupied == 0 || free == 0) {
    throw DegenerateData("training data needs both occupied and free points (got " + std::to_string(occupied) +
                         " occupied, " + std::to_string(free) + " free)");
  }
  const Box& domain = features.domain();
  const Box box = bounding_box(points);
  if (!domain.contains(box.lo) || !domain.contains(box.hi)) {
    throw InvalidArgument("feature domain does not cover the training points");
  }

  std::vector<const LabeledPoint*> order(points.size());
  std::transform(points.begin(), points.end(), order.begin(), [](const LabeledPoint& p) { return &p; });
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return point_less(*a, *b); });

  const int m = features.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  double b = 0.0;
  Eigen::VectorXd grad_w(m);
  std::vector<std::size_t> perm(order.size());
  std::mt19937_64 rng(options.seed);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(options.batch)) {
      const std::size_t end = std::min(perm.size(), start + static_cast<std::size_t>(options.batch));
      grad_w.setZero();
      double grad_b = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const LabeledPoint& p = *order[perm[k]];
        const Eigen::VectorXd phi = features.eval(p.x);
        const double z = w.dot(phi) + b;
        // d/dz log(1 + exp(-y z)) = -y sigmoid(-y z)
        const double dz = -p.label * sigmoid(-p.label * z);
        grad_w.noalias() += dz * phi;
        grad_b += dz;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      w -= options.step * (grad_w * inv + options.l2 * w);
      b -= options.step * grad_b * inv;
    }
  }
  if (!w.allFinite() || !std::isfinite(b)) throw NumericalError("map training diverged");

  HilbertMap map(std::move(features), std::move(w), b, options);
  if (stats != nullptr) {
    stats->occupied = occupied;
    stats->free = free;
    stats->log_loss = mean_log_loss(map, points);
    stats->prior_log_loss = std::log(2.0);
  }
  return map;
}

}  // namespace akp
