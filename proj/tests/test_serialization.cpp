#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "akp/error.hpp"
#include "akp/serialization.hpp"
#include "fixtures.hpp"

using namespace akp;
using namespace akp::testing;
using nlohmann::json;

namespace {

// Through text, as a file would be.
json reparse(const json& doc) { return json::parse(doc.dump(2)); }

Eigen::MatrixXd noise(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng) * std::pow(10.0, (i + j) % 7 - 3);
  return m;
}

}  // namespace

TEST_CASE("matrices round-trip bit-exactly") {
  const Eigen::MatrixXd m = noise(3, 5, 1);
  CHECK(matrix_from_json(reparse(to_json(m))) == m);
  const Eigen::MatrixXd empty(2, 0);
  CHECK(matrix_from_json(reparse(to_json(empty))).rows() == 2);
  CHECK_THROWS_AS(matrix_from_json(json{{"rows", 2}, {"cols", 1}, {"data", {{1.0}}}}), ParseError);
  CHECK_THROWS_AS(matrix_from_json(json{{"rows", 1}, {"cols", 2}, {"data", {{1.0}}}}), ParseError);
}

TEST_CASE("feature maps are rebuilt from their parameters") {
  const FeatureMap rff = FeatureMap::rff(64, 0.137, 12345);
  const FeatureMap r2 = feature_map_from_json(reparse(to_json(rff)));
  CHECK(r2.kind() == FeatureKind::kRff);
  CHECK(r2.frequencies() == rff.frequencies());
  CHECK(r2.phases() == rff.phases());
  CHECK(r2.eval_time(0.3) == rff.eval_time(0.3));

  Eigen::MatrixXd z(1, 4);
  z << 0.1, 0.35, 0.6, 0.95;
  const FeatureMap ny = FeatureMap::nystrom(z, 0.2, 1e-7);
  const FeatureMap n2 = feature_map_from_json(reparse(to_json(ny)));
  CHECK(n2.landmarks() == ny.landmarks());
  CHECK(n2.gram_factor() == ny.gram_factor());
  CHECK(n2.jitter() == ny.jitter());

  const FeatureMap spatial = FeatureMap::rff(30, 0.4, 2, square(-1.5, 7.25));
  const FeatureMap s2 = feature_map_from_json(reparse(to_json(spatial)));
  CHECK(s2.domain().lo == spatial.domain().lo);
  CHECK(s2.domain().hi == spatial.domain().hi);
  CHECK(s2.frequencies() == spatial.frequencies());

  const FeatureMap flat = FeatureMap::rff(3, std::numeric_limits<double>::infinity(), 1);
  CHECK(std::isinf(feature_map_from_json(reparse(to_json(flat))).lengthscale()));
}

TEST_CASE("paths round-trip bit-exactly") {
  Path p = Path::straight_line(Eigen::Vector2d(0.1, -2.0 / 3.0), Eigen::Vector2d(5.5, 1e-9), FeatureMap::rff(25, 0.1, 4));
  p.weights() = noise(2, 25, 2);
  p.boundary_weights() = noise(2, 2, 3);
  p.set_metric(Metric::gram(p.features(), 40, 1e-4));
  const Path q = path_from_json(reparse(to_json(p)));
  CHECK(q.weights() == p.weights());
  CHECK(q.boundary_weights() == p.boundary_weights());
  CHECK(q.metric().kind() == Metric::Kind::kGram);
  CHECK(q.metric().grid_points() == 40);
  for (double t : {0.0, 0.25, 0.5, 1.0}) CHECK(q.eval(t) == p.eval(t));

  Eigen::MatrixXd w(2, 3);
  w << 0, 1, 2,  //
      0, 1, 0;
  Path poly(FeatureMap::nystrom_uniform(7, 0.2), default_boundary_features(), OffsetPath::polyline(w));
  poly.weights() = noise(2, 7, 5);
  const Path poly2 = path_from_json(reparse(to_json(poly)));
  CHECK(poly2.offset().waypoints() == w);
  for (double t : {0.1, 0.7}) CHECK(poly2.eval(t, 2) == poly.eval(t, 2));
}

TEST_CASE("hilbert maps round-trip bit-exactly") {
  const HilbertMap& map = disc_map();
  const HilbertMap back = hilbert_map_from_json(reparse(to_json(map)));
  CHECK(back.weights() == map.weights());
  CHECK(back.bias() == map.bias());
  CHECK(back.train_options().step == map.train_options().step);
  for (double x : {0.3, 2.2, 4.9}) CHECK(back.query(Eigen::Vector2d(x, 6 - x)) == map.query(Eigen::Vector2d(x, 6 - x)));
}

TEST_CASE("documents are checked for format and version") {
  const FeatureMap f = FeatureMap::rff(4, 0.1, 1);
  json doc = to_json(f);
  CHECK(doc["format"] == "akp-feature-map");
  CHECK(doc["version"] == kDocumentVersion);
  CHECK_THROWS_AS(path_from_json(doc), ParseError);
  doc["version"] = kDocumentVersion + 1;
  CHECK_THROWS_AS(feature_map_from_json(doc), ParseError);
  json broken = to_json(f);
  broken.erase("size");
  CHECK_THROWS_AS(feature_map_from_json(broken), ParseError);
  CHECK_THROWS_AS(hilbert_map_from_json(json::array()), ParseError);
}

TEST_CASE("json files") {
  const auto dir = std::filesystem::temp_directory_path() / "akp_test_serialization";
  std::filesystem::create_directories(dir);
  const json doc = {{"a", 0.1}, {"b", {1, 2, 3}}};
  write_json_file(dir / "doc.json", doc);
  CHECK(read_json_file(dir / "doc.json") == doc);
  std::ifstream in(dir / "doc.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == doc.dump(2) + "\n");

  std::ofstream(dir / "bad.json") << "{\"a\": ";
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ParseError);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), IoError);
}
