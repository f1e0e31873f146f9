#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "akp/carmen.hpp"
#include "akp/error.hpp"
#include "akp/scenarios.hpp"
#include "akp/world.hpp"
#include "fixtures.hpp"

using namespace akp;
using namespace akp::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LaserScan one_beam(double range, double max_range) {
  LaserScan s;
  s.pose = {1.0, 2.0, std::numbers::pi / 2};
  s.ranges = {range};
  s.max_range = max_range;
  s.fov = 0.0;
  return s;
}

// Smallest non-negative root of |o + t d - c|^2 = r^2 by the quadratic formula.
double circle_oracle(const Eigen::Vector2d& o, const Eigen::Vector2d& d, const Eigen::Vector2d& c, double r) {
  const Eigen::Vector2d f = o - c;
  const double b = 2.0 * f.dot(d);
  const double cc = f.squaredNorm() - r * r;
  const double disc = b * b - 4.0 * cc;
  if (disc < 0.0) return kInf;
  const double s = std::sqrt(disc);
  const double t1 = (-b - s) / 2.0, t2 = (-b + s) / 2.0;
  if (t1 >= 0.0) return t1;
  if (t2 >= 0.0) return t2;
  return kInf;
}

}  // namespace

TEST_CASE("empty world returns max range everywhere") {
  SyntheticWorld w;
  w.bounds = square(-10, 10);
  const LaserScan s = simulate_laser(w, {0, 0, 0}, 90, 2 * std::numbers::pi, 7.5, 0.0, 1);
  CHECK(s.ranges.size() == 90);
  for (double r : s.ranges) CHECK(r == 7.5);
}

TEST_CASE("wall ahead of the sensor") {
  SyntheticWorld w;
  w.bounds = square(-10, 10);
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(5, -3), Eigen::Vector2d(6, 3)});
  const LaserScan s = simulate_laser(w, {0, 0, 0}, 181, std::numbers::pi, 20.0, 0.0, 1);
  CHECK(s.beam_angle(90) == 0.0);
  CHECK(s.ranges[90] == 5.0);
  CHECK(s.beam_angle(0) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(s.ranges[0] == 20.0);
}

TEST_CASE("ray against a disc matches the quadratic formula") {
  const Eigen::Vector2d c(2.5, -1.0);
  const double r = 1.3;
  const Obstacle disc = DiscObstacle{c, r};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-6, 6);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d o(u(rng), u(rng));
    if ((o - c).norm() <= r) {
      CHECK(ray_distance(disc, o, Eigen::Vector2d(1, 0)) == 0.0);
      continue;
    }
    const double a = u(rng);
    const Eigen::Vector2d d(std::cos(a), std::sin(a));
    const double expected = circle_oracle(o, d, c, r);
    const double got = ray_distance(disc, o, d);
    if (std::isinf(expected)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(std::abs(got - expected) <= 1e-9);
      ++hits;
    }
  }
  CHECK(hits > 50);
}

TEST_CASE("ray casting takes the nearest obstacle") {
  SyntheticWorld w;
  w.bounds = square(-10, 10);
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(6, -1), Eigen::Vector2d(7, 1)});
  w.obstacles.push_back(DiscObstacle{Eigen::Vector2d(3, 0), 0.5});
  w.obstacles.push_back(PolygonObstacle{{Eigen::Vector2d(8, -1), Eigen::Vector2d(9, 0), Eigen::Vector2d(8, 1)}});
  CHECK(w.cast(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)) == doctest::Approx(2.5));
  CHECK(w.cast(Eigen::Vector2d(7.5, 0), Eigen::Vector2d(1, 0)) == doctest::Approx(0.5));
  CHECK(std::isinf(w.cast(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1))));
}

TEST_CASE("polygons of either winding") {
  const Obstacle ccw = PolygonObstacle{{Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0), Eigen::Vector2d(0, 2)}};
  const Obstacle cw = PolygonObstacle{{Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 2), Eigen::Vector2d(2, 0)}};
  for (const auto& o : {ccw, cw}) {
    CHECK(obstacle_contains(o, Eigen::Vector2d(0.5, 0.5)));
    CHECK_FALSE(obstacle_contains(o, Eigen::Vector2d(1.5, 1.5)));
    CHECK(ray_distance(o, Eigen::Vector2d(-1, 0.5), Eigen::Vector2d(1, 0)) == doctest::Approx(1.0));
  }
}

TEST_CASE("sensor inside an obstacle is rejected") {
  SyntheticWorld w;
  w.bounds = square(-10, 10);
  w.obstacles.push_back(DiscObstacle{Eigen::Vector2d(0, 0), 1.0});
  CHECK_THROWS_AS(simulate_laser(w, {0.2, 0.1, 0}, 10, 1.0, 5.0, 0.0, 1), InvalidPose);
}

TEST_CASE("range noise is seeded and clamped") {
  SyntheticWorld w;
  w.bounds = square(-10, 10);
  w.obstacles.push_back(RectObstacle{Eigen::Vector2d(2, -9), Eigen::Vector2d(3, 9)});
  const LaserScan a = simulate_laser(w, {0, 0, 0}, 50, 2.0, 4.0, 0.5, 42);
  const LaserScan b = simulate_laser(w, {0, 0, 0}, 50, 2.0, 4.0, 0.5, 42);
  const LaserScan c = simulate_laser(w, {0, 0, 0}, 50, 2.0, 4.0, 0.5, 43);
  CHECK(a.ranges == b.ranges);
  CHECK(a.ranges != c.ranges);
  for (double r : a.ranges) {
    CHECK(r >= 0.0);
    CHECK(r <= 4.0);
  }
}

TEST_CASE("one beam becomes one hit and the requested free points") {
  ScanToPointsOptions o;
  o.free_per_beam = 3;
  o.hit_label_margin = 0.1;
  const std::vector<LaserScan> scans = {one_beam(1.0, 5.0)};
  const auto pts = scans_to_points(scans, o);
  REQUIRE(pts.size() == 4);
  int occupied = 0;
  const Eigen::Vector2d origin(1.0, 2.0);
  for (const auto& p : pts) {
    CHECK(std::abs(p.label) == 1);
    if (p.label == 1) {
      ++occupied;
      CHECK((p.x - Eigen::Vector2d(1.0, 3.0)).norm() <= 1e-12);
    } else {
      CHECK((p.x - origin).norm() < 0.9);
      CHECK(std::abs(p.x.x() - 1.0) <= 1e-12);
    }
  }
  CHECK(occupied == 1);
}

TEST_CASE("max-range beams give free points or nothing") {
  ScanToPointsOptions o;
  o.free_per_beam = 3;
  const std::vector<LaserScan> scans = {one_beam(5.0, 5.0)};
  const auto kept = scans_to_points(scans, o);
  CHECK(kept.size() == 3);
  for (const auto& p : kept) CHECK(p.label == -1);
  o.max_range_discard = true;
  CHECK(scans_to_points(scans, o).empty());
}

TEST_CASE("points outside the bounds are dropped") {
  const auto world = disc_world();
  ScanToPointsOptions o;
  o.bounds = square(2.0, 4.0);
  const auto pts = scans_to_points(simulate_scans(world), o);
  CHECK_FALSE(pts.empty());
  for (const auto& p : pts) {
    CHECK(o.bounds.contains(p.x));
    CHECK(std::abs(p.label) == 1);
  }
}

TEST_CASE("occupied fraction follows the per-beam ratio") {
  std::ifstream in(std::string(AKP_DATA_DIR) + "/office_tour.log");
  REQUIRE(in.good());
  CarmenOptions c;
  c.max_range = 10.0;
  const CarmenLog log = parse_carmen(in, c);
  std::vector<LaserScan> first(log.scans.begin(), log.scans.begin() + std::min<std::size_t>(100, log.scans.size()));
  ScanToPointsOptions o;
  o.max_range_discard = true;
  const auto pts = scans_to_points(first, o);
  double occupied = 0;
  for (const auto& p : pts) occupied += p.label == 1;
  CHECK(std::abs(occupied / pts.size() - 1.0 / (1 + o.free_per_beam)) <= 0.05);
}

TEST_CASE("subsampling keeps every k-th scan") {
  std::vector<LaserScan> scans(11);
  for (int i = 0; i < 11; ++i) scans[i].timestamp = i;
  const auto s = subsample(scans, 5);
  REQUIRE(s.size() == 3);
  CHECK(s[0].timestamp == 0);
  CHECK(s[1].timestamp == 5);
  CHECK(s[2].timestamp == 10);
  CHECK_THROWS_AS(subsample(scans, 0), InvalidArgument);
}

TEST_CASE("world documents round-trip") {
  const SyntheticWorld w = scenarios::two_rectangle_world();
  const SyntheticWorld back = parse_world(world_to_json(w));
  CHECK(world_to_json(back) == world_to_json(w));
  CHECK(back.obstacles.size() == w.obstacles.size());
  CHECK(back.scans.poses.size() == w.scans.poses.size());
  CHECK_THROWS_AS(parse_world("{\"bounds\": [0, 0, 1]}"), ParseError);
  CHECK_THROWS_AS(parse_world("not json"), ParseError);
  CHECK_THROWS_AS(parse_world(R"({"bounds": [0, 0, 5, 5], "obstacles": [{"type": "disc", "params": [4, 4, 2]}]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(load_world("/nonexistent/world.json"), IoError);
}

TEST_CASE("CARMEN: zero-count record") {
  std::istringstream in("FLASER 0 0.0 0.0 0.0 0.0 0.0 0.0 0.0 host 0.0\n");
  const CarmenLog log = parse_carmen(in);
  REQUIRE(log.scans.size() == 1);
  CHECK(log.scans[0].ranges.empty());
  CHECK(log.scans[0].host == "host");
}

TEST_CASE("CARMEN: a crafted record round-trips") {
  const std::string line = "FLASER 3 1.25 2.5 3.75 0.5 -1.5 0.25 0.6 -1.4 0.2 1234.5625 nohost 1234.75";
  std::istringstream in(line + "\n");
  const CarmenLog log = parse_carmen(in);
  REQUIRE(log.scans.size() == 1);
  const LaserScan& s = log.scans[0];
  CHECK(s.ranges == std::vector<double>{1.25, 2.5, 3.75});
  CHECK(s.pose.x == 0.5);
  CHECK(s.pose.y == -1.5);
  CHECK(s.pose.theta == 0.25);
  CHECK(s.odometry.x == 0.6);
  CHECK(s.timestamp == 1234.5625);
  CHECK(format_flaser(s) == line);

  std::istringstream again(line + "\n");
  CarmenOptions odo;
  odo.use_odometry = true;
  const LaserScan o = parse_carmen(again, odo).scans[0];
  CHECK(o.pose.x == 0.6);
  CHECK(o.pose.y == -1.4);
  CHECK(o.pose.theta == 0.2);
}

TEST_CASE("CARMEN: only FLASER records become scans") {
  std::ostringstream log;
  log << "# comment\nPARAM robot_front_laser_max 50\n";
  for (int i = 0; i < 7; ++i) {
    log << "ODOM " << i << " 0 0 0 0 0 " << i << " host " << i << "\n";
    if (i % 2 == 0) log << "FLASER 2 1 2 0 0 0 0 0 0 " << i << " host " << i << "\n";
  }
  log << "FLASER 3 1 2\n";  // truncated
  std::istringstream in(log.str());
  const CarmenLog parsed = parse_carmen(in);
  CHECK(parsed.scans.size() == 4);
  CHECK(parsed.skipped_lines == 9);
  REQUIRE(parsed.malformed.size() == 1);
  CHECK(parsed.malformed[0].line == 14);
}

TEST_CASE("CARMEN: ranges are clamped to the maximum") {
  std::istringstream in("FLASER 2 81.9 3.0 0 0 0 0 0 0 0 h 0\n");
  CarmenOptions o;
  o.max_range = 50.0;
  const auto log = parse_carmen(in, o);
  CHECK(log.scans[0].ranges[0] == 50.0);
  CHECK(log.scans[0].max_range == 50.0);
}

TEST_CASE("CARMEN: arbitrary input yields scans or a parse error") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> len(0, 400);
  const std::vector<std::string> fragments = {"FLASER ", "3 ", "-1 ", "1e308 ", "nan ", "\n", "ODOM ", "99999999999 "};
  std::uniform_int_distribution<std::size_t> pick(0, fragments.size() - 1);
  int scans = 0, errors = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      if (byte(rng) < 64) {
        text += fragments[pick(rng)];
      } else {
        text += static_cast<char>(byte(rng));
      }
    }
    std::istringstream in(text);
    try {
      scans += static_cast<int>(parse_carmen(in).scans.size());
    } catch (const ParseError&) {
      ++errors;
    }
  }
  CHECK(errors > 0);
  CHECK(scans >= 0);
}

TEST_CASE("CARMEN: a written log parses back") {
  const auto scans = scenarios::office_tour_scans(3);
  std::ostringstream out;
  write_carmen(out, scans);
  std::istringstream in(out.str());
  CarmenOptions o;
  o.max_range = scans[0].max_range;
  o.fov = scans[0].fov;
  const auto log = parse_carmen(in, o);
  REQUIRE(log.scans.size() == scans.size());
  CHECK(log.scans.back().ranges == scans.back().ranges);
  CHECK(log.scans.back().pose.x == scans.back().pose.x);
}

TEST_CASE("bundled data files match the scenario generators") {
  const auto read = [](const std::string& name) {
    std::ifstream in(std::string(AKP_DATA_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  CHECK(parse_world(read("two_rectangle_world.json")).obstacles.size() == 2);
  CHECK(world_to_json(parse_world(read("two_rectangle_world.json"))) == world_to_json(scenarios::two_rectangle_world()));
  CHECK(world_to_json(parse_world(read("office_world.json"))) == world_to_json(scenarios::office_world()));
  // One comment line, then the tour written with seed 7.
  const std::string log = read("office_tour.log");
  std::ostringstream tour;
  write_carmen(tour, scenarios::office_tour_scans(7));
  CHECK(log.substr(log.find('\n') + 1) == tour.str());
}
