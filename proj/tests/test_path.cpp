#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "akp/error.hpp"
#include "akp/path.hpp"

using namespace akp;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

Path make_path(int m = 30) {
  return Path::straight_line(Eigen::Vector2d(1, 2), Eigen::Vector2d(4, -1), FeatureMap::rff(m, 0.15, 3));
}

}  // namespace

TEST_CASE("zero weights reproduce the straight offset") {
  const Path p = make_path();
  const Eigen::Vector2d a(1, 2), b(4, -1);
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    const Eigen::Vector2d expected = a + t * (b - a);
    CHECK((p.eval(t) - expected).norm() <= 1e-15 * 8);
    CHECK(p.eval(t, 2).isZero(0.0));
    CHECK((p.eval(t, 1) - (b - a)).norm() <= 1e-12);
  }
  CHECK(p.eval(0.0) == a);
}

TEST_CASE("evaluation recomposes offset, boundary and weighted features") {
  Path p = make_path();
  p.weights() = random_matrix(2, 30, 1);
  p.boundary_weights() = random_matrix(2, 2, 2);
  for (int order = 0; order <= 2; ++order) {
    for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      const Eigen::VectorXd expected = p.offset().eval(t, order) +
                                       p.boundary_weights() * p.boundary_features().eval_time(t, order) +
                                       p.weights() * p.features().eval_time(t, order);
      CHECK((p.eval(t, order) - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
    }
  }
}

TEST_CASE("evaluation is linear in the weights") {
  Path base = make_path();
  const Eigen::MatrixXd w1 = random_matrix(2, 30, 4);
  const Eigen::MatrixXd w2 = random_matrix(2, 30, 5);
  const double alpha = 0.7, beta = -1.3;
  base.boundary_weights() = random_matrix(2, 2, 6);

  Path p1 = base, p2 = base, p12 = base;
  p1.weights() = w1;
  p2.weights() = w2;
  p12.weights() = alpha * w1 + beta * w2;
  for (double t : {0.05, 0.4, 0.9}) {
    const Eigen::VectorXd fixed = base.eval(t);
    const Eigen::VectorXd combo = fixed + alpha * (p1.eval(t) - fixed) + beta * (p2.eval(t) - fixed);
    CHECK((p12.eval(t) - combo).norm() <= 1e-10);
  }
}

TEST_CASE("path derivatives match finite differences") {
  Path p = make_path(50);
  p.weights() = 0.1 * random_matrix(2, 50, 9);
  const double h = 1e-5;
  for (double t : {0.2, 0.45, 0.8}) {
    const Eigen::VectorXd fd1 = (p.eval(t + h) - p.eval(t - h)) / (2 * h);
    const Eigen::VectorXd fd2 = (p.eval(t + h, 1) - p.eval(t - h, 1)) / (2 * h);
    CHECK((fd1 - p.eval(t, 1)).norm() / p.eval(t, 1).norm() <= 1e-5);
    CHECK((fd2 - p.eval(t, 2)).norm() / p.eval(t, 2).norm() <= 1e-4);
  }
}

TEST_CASE("default boundary features sit at the endpoints") {
  const FeatureMap b = default_boundary_features();
  CHECK(b.kind() == FeatureKind::kNystrom);
  CHECK(b.size() == 2);
  CHECK(b.landmarks()(0, 0) == 0.0);
  CHECK(b.landmarks()(0, 1) == 1.0);
}

TEST_CASE("polyline offset interpolates by arc length") {
  Eigen::MatrixXd w(2, 3);
  w << 0, 3, 3,  //
      0, 0, 1;
  const OffsetPath o = OffsetPath::polyline(w);
  CHECK(o.start() == Eigen::Vector2d(0, 0));
  CHECK(o.goal() == Eigen::Vector2d(3, 1));
  CHECK((o.eval(0.75) - Eigen::Vector2d(3, 0)).norm() <= 1e-12);
  CHECK((o.eval(0.375) - Eigen::Vector2d(1.5, 0)).norm() <= 1e-12);
  CHECK((o.eval(0.9) - Eigen::Vector2d(3, 0.6)).norm() <= 1e-12);
  // Velocity has constant magnitude equal to the total length.
  CHECK(o.eval(0.3, 1).norm() == doctest::Approx(4.0));
  CHECK(o.eval(0.9, 1).norm() == doctest::Approx(4.0));
  CHECK(o.eval(0.3, 2).isZero(0.0));
  CHECK_THROWS_AS(OffsetPath::polyline(Eigen::MatrixXd::Zero(2, 1)), InvalidArgument);
}

TEST_CASE("gram metric solves against the averaged feature outer products") {
  const FeatureMap f = FeatureMap::rff(12, 0.3, 4);
  const Metric m = Metric::gram(f, 64, 1e-3);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 0; i < 64; ++i) {
    const Eigen::VectorXd phi = f.eval_time(i / 63.0);
    g += phi * phi.transpose();
  }
  g = g / 64.0 + 1e-3 * Eigen::MatrixXd::Identity(12, 12);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(12, -1, 2);
  CHECK((g * m.solve(v) - v).norm() <= 1e-8 * v.norm());
  CHECK(Metric::identity(12).solve(v) == v);
}

TEST_CASE("dense export writes t and coordinates") {
  const Path p = make_path();
  std::ostringstream os;
  write_path_csv(os, p, 3);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x_1,x_2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  CHECK(p.sample(5).cols() == 5);
}
