#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace akp {

/// Axis-aligned box; the time domain is the 1-D box [0,1].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box unit_interval();
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Squared-exponential kernel exp(-|x - y|^2 / (2 l^2)).
double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                  double lengthscale);

enum class FeatureKind { kRff, kNystrom };

const char* to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& name);

/// Finite feature set whose inner products approximate an RBF kernel.
///
/// Random Fourier features: phi_j(x) = sqrt(2/M) cos(w_j . x + b_j) with
/// w_j ~ N(0, I / l^2) and b_j ~ U[0, 2 pi).
///
/// Nystrom features: phi(x) = L^{-1} k(Z, x), where L L^T = K_ZZ + jitter I
/// is the Cholesky factor of the landmark Gram matrix.
///
/// Instances are immutable once built and may be shared across threads.
class FeatureMap {
 public:
  /// `input_dim` is 1 for time features; `domain` defaults to [0,1]^input_dim.
  static FeatureMap rff(int count, double lengthscale, std::uint64_t seed, int input_dim = 1);
  static FeatureMap rff(int count, double lengthscale, std::uint64_t seed, Box domain);

  /// `landmarks` holds one landmark per column. The jitter is escalated by
  /// factors of ten when the Cholesky factorization fails; the value that
  /// succeeded is reported by jitter().
  static FeatureMap nystrom(Eigen::MatrixXd landmarks, double lengthscale, double jitter = 1e-8);
  static FeatureMap nystrom(Eigen::MatrixXd landmarks, double lengthscale, double jitter, Box domain);

  /// `count` landmarks evenly spaced on [0,1] (a single landmark sits at 0.5).
  static FeatureMap nystrom_uniform(int count, double lengthscale, double jitter = 1e-8);

  FeatureKind kind() const noexcept { return kind_; }
  int size() const noexcept { return size_; }
  int input_dim() const noexcept { return static_cast<int>(domain_.lo.size()); }
  double lengthscale() const noexcept { return lengthscale_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double jitter() const noexcept { return jitter_; }
  const Box& domain() const noexcept { return domain_; }

  /// RFF only: M x d frequencies and M phases.
  const Eigen::MatrixXd& frequencies() const noexcept { return frequencies_; }
  const Eigen::VectorXd& phases() const noexcept { return phases_; }
  /// Nystrom only: d x L landmarks and the lower Cholesky factor.
  const Eigen::MatrixXd& landmarks() const noexcept { return landmarks_; }
  const Eigen::MatrixXd& gram_factor() const noexcept { return gram_factor_; }

  Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// M x d matrix of partial derivatives d phi_j / d x_k.
  Eigen::MatrixXd jacobian(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Value of w . phi(x) together with its spatial gradient.
  double dot_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& w, const Eigen::Ref<const Eigen::VectorXd>& x,
                           Eigen::Ref<Eigen::VectorXd> gradient) const;
  double dot(const Eigen::Ref<const Eigen::VectorXd>& w, const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Time features (input_dim == 1): the order-th derivative of phi at t,
  /// order in {0, 1, 2}. t outside [0,1] is clamped with a warning.
  Eigen::VectorXd eval_time(double t, int order = 0) const;

  /// Induced approximate kernel phi(x) . phi(y).
  double kernel(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  FeatureMap() = default;

  FeatureKind kind_ = FeatureKind::kRff;
  int size_ = 0;
  double lengthscale_ = 1.0;
  std::uint64_t seed_ = 0;
  double jitter_ = 0.0;
  Box domain_;
  Eigen::MatrixXd frequencies_;
  Eigen::VectorXd phases_;
  Eigen::MatrixXd landmarks_;
  Eigen::MatrixXd gram_factor_;
};

}  // namespace akp
