#include "akp/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "akp/error.hpp"
#include "akp/log.hpp"

namespace akp {
namespace {

constexpr int kMaxJitterEscalations = 12;

void check_lengthscale(double lengthscale) {
  if (!(lengthscale > 0.0)) {
    throw InvalidArgument("feature lengthscale must be positive");
  }
}

Box cube(int dim) {
  return Box{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

// k(z, x) and its derivatives for the RBF kernel, one landmark at a time.
Eigen::VectorXd landmark_kernel(const Eigen::MatrixXd& landmarks, const Eigen::Ref<const Eigen::VectorXd>& x,
                                double lengthscale) {
  Eigen::VectorXd k(landmarks.cols());
  for (Eigen::Index i = 0; i < landmarks.cols(); ++i) {
    k(i) = rbf_kernel(landmarks.col(i), x, lengthscale);
  }
  return k;
}

std::string landmark_diagnostic(const Eigen::MatrixXd& landmarks, double lengthscale) {
  double min_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < landmarks.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < landmarks.cols(); ++j) {
      min_dist = std::min(min_dist, (landmarks.col(i) - landmarks.col(j)).norm());
    }
  }
  std::ostringstream os;
  os << landmarks.cols() << " landmarks, min pairwise distance " << min_dist << ", lengthscale " << lengthscale;
  return os.str();
}

}  // namespace

Box Box::unit_interval() { return cube(1); }

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.size() == lo.size() && (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Eigen::VectorXd Box::clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                  double lengthscale) {
  if (std::isinf(lengthscale)) return 1.0;
  return std::exp(-(x - y).squaredNorm() / (2.0 * lengthscale * lengthscale));
}

const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::kRff ? "rff" : "nystrom";
}

FeatureKind feature_kind_from_string(const std::string& name) {
  if (name == "rff") return FeatureKind::kRff;
  if (name == "nystrom") return FeatureKind::kNystrom;
  throw InvalidArgument("unknown feature kind '" + name + "'");
}

FeatureMap FeatureMap::rff(int count, double lengthscale, std::uint64_t seed, int input_dim) {
  if (input_dim < 1) throw InvalidArgument("feature input dimension must be positive");
  return rff(count, lengthscale, seed, cube(input_dim));
}

FeatureMap FeatureMap::rff(int count, double lengthscale, std::uint64_t seed, Box domain) {
  if (count < 1) throw InvalidArgument("feature count must be at least 1");
  check_lengthscale(lengthscale);
  if (domain.lo.size() < 1 || domain.lo.size() != domain.hi.size()) {
    throw InvalidArgument("feature domain box is malformed");
  }

  FeatureMap f;
  f.kind_ = FeatureKind::kRff;
  f.size_ = count;
  f.lengthscale_ = lengthscale;
  f.seed_ = seed;
  f.domain_ = std::move(domain);

  const int dim = f.input_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  // Spectral density of the RBF kernel: N(0, I / l^2). Drawing unit normals
  // and dividing keeps l = inf (constant features) well defined.
  f.frequencies_.resize(count, dim);
  for (int j = 0; j < count; ++j) {
    for (int k = 0; k < dim; ++k) f.frequencies_(j, k) = normal(rng) / lengthscale;
  }
  f.phases_.resize(count);
  for (int j = 0; j < count; ++j) f.phases_(j) = phase(rng);
  return f;
}

FeatureMap FeatureMap::nystrom(Eigen::MatrixXd landmarks, double lengthscale, double jitter) {
  const auto dim = static_cast<int>(landmarks.rows());
  if (dim < 1) throw InvalidArgument("Nystrom landmarks must have at least one coordinate");
  return nystrom(std::move(landmarks), lengthscale, jitter, cube(dim));
}

FeatureMap FeatureMap::nystrom(Eigen::MatrixXd landmarks, double lengthscale, double jitter, Box domain) {
  check_lengthscale(lengthscale);
  if (landmarks.cols() < 1) throw InvalidArgument("Nystrom features need at least one landmark");
  if (!landmarks.allFinite()) throw InvalidArgument("Nystrom landmarks must be finite");
  if (!(jitter >= 0.0)) throw InvalidArgument("Nystrom jitter must be non-negative");
  if (domain.lo.size() != landmarks.rows() || domain.hi.size() != landmarks.rows()) {
    throw InvalidArgument("Nystrom domain dimension does not match the landmarks");
  }

  const Eigen::Index n = landmarks.cols();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = rbf_kernel(landmarks.col(i), landmarks.col(j), lengthscale);
    }
  }

  double used = jitter;
  for (int attempt = 0; attempt <= kMaxJitterEscalations; ++attempt) {
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += used;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    Eigen::MatrixXd factor = llt.matrixL();
    if (llt.info() == Eigen::Success && factor.allFinite() && (factor.diagonal().array() > 0.0).all()) {
      FeatureMap f;
      f.kind_ = FeatureKind::kNystrom;
      f.size_ = static_cast<int>(n);
      f.lengthscale_ = lengthscale;
      f.jitter_ = used;
      f.domain_ = std::move(domain);
      f.landmarks_ = std::move(landmarks);
      f.gram_factor_ = std::move(factor);
      return f;
    }
    used = used > 0.0 ? used * 10.0 : 1e-12;
  }
  throw NumericalError("Nystrom Gram factorization failed after jitter escalation to " + std::to_string(used) +
                       " (" + landmark_diagnostic(landmarks, lengthscale) + ")");
}

FeatureMap FeatureMap::nystrom_uniform(int count, double lengthscale, double jitter) {
  if (count < 1) throw InvalidArgument("feature count must be at least 1");
  Eigen::MatrixXd landmarks(1, count);
  if (count == 1) {
    landmarks(0, 0) = 0.5;
  } else {
    for (int i = 0; i < count; ++i) landmarks(0, i) = static_cast<double>(i) / (count - 1);
  }
  return nystrom(std::move(landmarks), lengthscale, jitter);
}

Eigen::VectorXd FeatureMap::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (kind_ == FeatureKind::kRff) {
    const double scale = std::sqrt(2.0 / size_);
    return scale * (frequencies_ * x + phases_).array().cos().matrix();
  }
  return gram_factor_.triangularView<Eigen::Lower>().solve(landmark_kernel(landmarks_, x, lengthscale_));
}

Eigen::MatrixXd FeatureMap::jacobian(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (kind_ == FeatureKind::kRff) {
    const double scale = std::sqrt(2.0 / size_);
    const Eigen::ArrayXd s = (frequencies_ * x + phases_).array().sin();
    return -scale * (frequencies_.array().colwise() * s).matrix();
  }
  const double inv_l2 = std::isinf(lengthscale_) ? 0.0 : 1.0 / (lengthscale_ * lengthscale_);
  Eigen::MatrixXd dk(landmarks_.cols(), x.size());
  for (Eigen::Index i = 0; i < landmarks_.cols(); ++i) {
    const double k = rbf_kernel(landmarks_.col(i), x, lengthscale_);
    dk.row(i) = (-(x - landmarks_.col(i)) * inv_l2 * k).transpose();
  }
  return gram_factor_.triangularView<Eigen::Lower>().solve(dk);
}

double FeatureMap::dot_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& w,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     Eigen::Ref<Eigen::VectorXd> gradient) const {
  if (kind_ == FeatureKind::kRff) {
    const double scale = std::sqrt(2.0 / size_);
    const Eigen::ArrayXd arg = (frequencies_ * x + phases_).array();
    const Eigen::ArrayXd ws = w.array() * scale;
    gradient = -(frequencies_.transpose() * (ws * arg.sin()).matrix());
    return (ws * arg.cos()).sum();
  }
  gradient = jacobian(x).transpose() * w;
  return w.dot(eval(x));
}

double FeatureMap::dot(const Eigen::Ref<const Eigen::VectorXd>& w, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (kind_ == FeatureKind::kRff) {
    const double scale = std::sqrt(2.0 / size_);
    return scale * (w.array() * (frequencies_ * x + phases_).array().cos()).sum();
  }
  return w.dot(eval(x));
}

Eigen::VectorXd FeatureMap::eval_time(double t, int order) const {
  if (input_dim() != 1) throw InvalidArgument("eval_time needs a one-dimensional feature map");
  if (order < 0 || order > 2) {
    throw InvalidArgument("unsupported derivative order " + std::to_string(order) + " (expected 0, 1 or 2)");
  }
  const double lo = domain_.lo(0);
  const double hi = domain_.hi(0);
  if (!(t >= lo && t <= hi)) {
    const double clamped = std::isnan(t) ? lo : std::clamp(t, lo, hi);
    warn("time " + std::to_string(t) + " outside feature domain, clamped to " + std::to_string(clamped));
    t = clamped;
  }

  if (kind_ == FeatureKind::kRff) {
    const double scale = std::sqrt(2.0 / size_);
    const Eigen::ArrayXd w = frequencies_.col(0).array();
    const Eigen::ArrayXd arg = w * t + phases_.array();
    switch (order) {
      case 0:
        return scale * arg.cos().matrix();
      case 1:
        return (-scale * w * arg.sin()).matrix();
      default:
        return (-scale * w.square() * arg.cos()).matrix();
    }
  }

  const double inv_l2 = std::isinf(lengthscale_) ? 0.0 : 1.0 / (lengthscale_ * lengthscale_);
  Eigen::VectorXd dk(landmarks_.cols());
  for (Eigen::Index i = 0; i < landmarks_.cols(); ++i) {
    const double d = t - landmarks_(0, i);
    const double k = std::isinf(lengthscale_) ? 1.0 : std::exp(-0.5 * d * d * inv_l2);
    switch (order) {
      case 0:
        dk(i) = k;
        break;
      case 1:
        dk(i) = -d * inv_l2 * k;
        break;
      default:
        dk(i) = (d * d * inv_l2 * inv_l2 - inv_l2) * k;
        break;
    }
  }
  return gram_factor_.triangularView<Eigen::Lower>().solve(dk);
}

double FeatureMap::kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return eval(x).dot(eval(y));
}

}  // namespace akp
