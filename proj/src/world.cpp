#include "akp/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "akp/error.hpp"

namespace akp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool contains(const RectObstacle& r, const Eigen::Vector2d& p) {
  return p.x() >= r.lo.x() && p.x() <= r.hi.x() && p.y() >= r.lo.y() && p.y() <= r.hi.y();
}

bool contains(const DiscObstacle& d, const Eigen::Vector2d& p) {
  return (p - d.center).squaredNorm() <= d.radius * d.radius;
}

bool contains(const PolygonObstacle& poly, const Eigen::Vector2d& p) {
  const auto& v = poly.vertices;
  int sign = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = cross(v[(i + 1) % v.size()] - v[i], p - v[i]);
    if (c == 0.0) continue;
    const int s = c > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

// Slab method; exact for axis-aligned rays.
double ray(const RectObstacle& r, const Eigen::Vector2d& o, const Eigen::Vector2d& d) {
  double t_near = -kInf;
  double t_far = kInf;
  for (int k = 0; k < 2; ++k) {
    if (d(k) == 0.0) {
      if (o(k) < r.lo(k) || o(k) > r.hi(k)) return kInf;
      continue;
    }
    double t1 = (r.lo(k) - o(k)) / d(k);
    double t2 = (r.hi(k) - o(k)) / d(k);
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_near > t_far || t_far < 0.0) return kInf;
  return t_near >= 0.0 ? t_near : 0.0;
}

double ray(const DiscObstacle& disc, const Eigen::Vector2d& o, const Eigen::Vector2d& d) {
  // |o + t d - c|^2 = r^2 with |d| = 1: t^2 + 2 b t + c = 0.
  const Eigen::Vector2d oc = o - disc.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - disc.radius * disc.radius;
  if (c <= 0.0) return 0.0;
  const double disc2 = b * b - c;
  if (disc2 < 0.0) return kInf;
  const double t = -b - std::sqrt(disc2);
  return t >= 0.0 ? t : kInf;
}

double ray(const PolygonObstacle& poly, const Eigen::Vector2d& o, const Eigen::Vector2d& d) {
  if (contains(poly, o)) return 0.0;
  double best = kInf;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d a = v[i];
    const Eigen::Vector2d e = v[(i + 1) % v.size()] - a;
    const double denom = cross(d, e);
    if (denom == 0.0) continue;
    const Eigen::Vector2d ao = a - o;
    const double t = cross(ao, e) / denom;
    const double s = cross(ao, d) / denom;
    if (t >= 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
  }
  return best;
}

nlohmann::json obstacle_to_json(const Obstacle& obstacle) {
  return std::visit(
      [](const auto& o) -> nlohmann::json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RectObstacle>) {
          return {{"type", "rect"}, {"params", {o.lo.x(), o.lo.y(), o.hi.x(), o.hi.y()}}};
        } else if constexpr (std::is_same_v<T, DiscObstacle>) {
          return {{"type", "disc"}, {"params", {o.center.x(), o.center.y(), o.radius}}};
        } else {
          std::vector<double> params;
          for (const auto& v : o.vertices) {
            params.push_back(v.x());
            params.push_back(v.y());
          }
          return {{"type", "polygon"}, {"params", params}};
        }
      },
      obstacle);
}

Obstacle obstacle_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  const auto p = j.at("params").get<std::vector<double>>();
  if (type == "rect") {
    if (p.size() != 4 || !(p[0] < p[2]) || !(p[1] < p[3])) throw ParseError("rect needs [xmin, ymin, xmax, ymax]");
    return RectObstacle{{p[0], p[1]}, {p[2], p[3]}};
  }
  if (type == "disc") {
    if (p.size() != 3 || !(p[2] > 0.0)) throw ParseError("disc needs [cx, cy, r] with r > 0");
    return DiscObstacle{{p[0], p[1]}, p[2]};
  }
  if (type == "polygon") {
    if (p.size() < 6 || p.size() % 2 != 0) throw ParseError("polygon needs at least three x, y pairs");
    PolygonObstacle poly;
    for (std::size_t i = 0; i < p.size(); i += 2) poly.vertices.emplace_back(p[i], p[i + 1]);
    return poly;
  }
  throw ParseError("unknown obstacle type '" + type + "'");
}

bool within(const Box& b, const Eigen::Vector2d& p) { return b.contains(p); }

}  // namespace

double LaserScan::beam_angle(std::size_t i) const {
  if (ranges.size() <= 1) return pose.theta;
  return pose.theta + fov * (static_cast<double>(i) / static_cast<double>(ranges.size() - 1) - 0.5);
}

bool obstacle_contains(const Obstacle& obstacle, const Eigen::Vector2d& p) {
  return std::visit([&](const auto& o) { return contains(o, p); }, obstacle);
}

double ray_distance(const Obstacle& obstacle, const Eigen::Vector2d& origin, const Eigen::Vector2d& dir) {
  return std::visit([&](const auto& o) { return ray(o, origin, dir); }, obstacle);
}

bool SyntheticWorld::occupied(const Eigen::Vector2d& p) const {
  return std::any_of(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) { return obstacle_contains(o, p); });
}

double SyntheticWorld::cast(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir) const {
  double best = kInf;
  for (const auto& o : obstacles) best = std::min(best, ray_distance(o, origin, dir));
  return best;
}

void SyntheticWorld::validate() const {
  if (bounds.dim() != 2 || !(bounds.lo.array() < bounds.hi.array()).all()) {
    throw InvalidArgument("world bounds must be a non-empty 2-D box");
  }
  for (const auto& o : obstacles) {
    const bool inside = std::visit(
        [&](const auto& ob) {
          using T = std::decay_t<decltype(ob)>;
          if constexpr (std::is_same_v<T, RectObstacle>) {
            return within(bounds, ob.lo) && within(bounds, ob.hi);
          } else if constexpr (std::is_same_v<T, DiscObstacle>) {
            const Eigen::Vector2d r(ob.radius, ob.radius);
            return within(bounds, ob.center - r) && within(bounds, ob.center + r);
          } else {
            return std::all_of(ob.vertices.begin(), ob.vertices.end(),
                               [&](const Eigen::Vector2d& v) { return within(bounds, v); });
          }
        },
        o);
    if (!inside) throw InvalidArgument("obstacle extends outside the world bounds");
  }
  if (scans.beams < 1 || !(scans.max_range > 0.0) || !(scans.noise_sigma >= 0.0)) {
    throw InvalidArgument("world scan plan is malformed");
  }
}

SyntheticWorld parse_world(const std::string& json_text) {
  SyntheticWorld world;
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto b = j.at("bounds").get<std::vector<double>>();
    if (b.size() != 4) throw ParseError("bounds must be [xmin, ymin, xmax, ymax]");
    world.bounds = Box{Eigen::Vector2d(b[0], b[1]), Eigen::Vector2d(b[2], b[3])};
    for (const auto& o : j.value("obstacles", nlohmann::json::array())) world.obstacles.push_back(obstacle_from_json(o));
    if (j.contains("scans")) {
      const auto& s = j.at("scans");
      for (const auto& p : s.value("poses", nlohmann::json::array())) {
        const auto v = p.get<std::vector<double>>();
        if (v.size() != 3) throw ParseError("scan poses must be [x, y, theta]");
        world.scans.poses.push_back({v[0], v[1], v[2]});
      }
      world.scans.beams = s.value("beams", world.scans.beams);
      world.scans.fov = s.value("fov", world.scans.fov);
      world.scans.max_range = s.value("max_range", world.scans.max_range);
      world.scans.noise_sigma = s.value("noise_sigma", world.scans.noise_sigma);
      world.scans.seed = s.value("seed", world.scans.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad world document: ") + e.what());
  }
  world.validate();
  return world;
}

SyntheticWorld load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open world file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_world(ss.str());
}

std::string world_to_json(const SyntheticWorld& world) {
  nlohmann::json j;
  j["bounds"] = {world.bounds.lo(0), world.bounds.lo(1), world.bounds.hi(0), world.bounds.hi(1)};
  j["obstacles"] = nlohmann::json::array();
  for (const auto& o : world.obstacles) j["obstacles"].push_back(obstacle_to_json(o));
  nlohmann::json poses = nlohmann::json::array();
  for (const auto& p : world.scans.poses) poses.push_back({p.x, p.y, p.theta});
  j["scans"] = {{"poses", poses},
                {"beams", world.scans.beams},
                {"fov", world.scans.fov},
                {"max_range", world.scans.max_range},
                {"noise_sigma", world.scans.noise_sigma},
                {"seed", world.scans.seed}};
  return j.dump(2);
}

LaserScan simulate_laser(const SyntheticWorld& world, const Pose2& pose, int beams, double fov, double max_range,
                         double noise_sigma, std::mt19937_64& rng) {
  if (beams < 1 || !(max_range > 0.0) || !(noise_sigma >= 0.0) || !(fov >= 0.0)) {
    throw InvalidArgument("laser parameters are malformed");
  }
  const Eigen::Vector2d origin(pose.x, pose.y);
  if (world.occupied(origin)) throw InvalidPose("sensor pose lies inside an obstacle");

  LaserScan scan;
  scan.pose = pose;
  scan.odometry = pose;
  scan.fov = fov;
  scan.max_range = max_range;
  scan.ranges.resize(static_cast<std::size_t>(beams));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double a = scan.beam_angle(i);
    const double hit = world.cast(origin, Eigen::Vector2d(std::cos(a), std::sin(a)));
    if (!(hit < max_range)) {
      scan.ranges[i] = max_range;
      continue;
    }
    double r = hit;
    if (noise_sigma > 0.0) r += noise_sigma * noise(rng);
    scan.ranges[i] = std::clamp(r, 0.0, max_range);
  }
  return scan;
}

LaserScan simulate_laser(const SyntheticWorld& world, const Pose2& pose, int beams, double fov, double max_range,
                         double noise_sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return simulate_laser(world, pose, beams, fov, max_range, noise_sigma, rng);
}

std::vector<LaserScan> simulate_scans(const SyntheticWorld& world) {
  std::mt19937_64 rng(world.scans.seed);
  std::vector<LaserScan> out;
  out.reserve(world.scans.poses.size());
  double stamp = 0.0;
  for (const auto& pose : world.scans.poses) {
    out.push_back(simulate_laser(world, pose, world.scans.beams, world.scans.fov, world.scans.max_range,
                                 world.scans.noise_sigma, rng));
    out.back().timestamp = out.back().logger_timestamp = stamp;
    stamp += 0.1;
  }
  return out;
}

std::vector<LabeledPoint> scans_to_points(std::span<const LaserScan> scans, const ScanToPointsOptions& options) {
  if (options.free_per_beam < 0 || !(options.hit_label_margin >= 0.0)) {
    throw InvalidArgument("scan conversion options are malformed");
  }
  const bool clip = options.bounds.dim() == 2;
  std::vector<LabeledPoint> points;
  std::mt19937_64 rng(options.seed);
  auto emit = [&](const Eigen::Vector2d& p, int label) {
    if (clip && !options.bounds.contains(p)) return;
    points.push_back({p, label});
  };
  for (const auto& scan : scans) {
    const Eigen::Vector2d origin(scan.pose.x, scan.pose.y);
    for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
      const double r = scan.ranges[i];
      const bool max_beam = !(r < scan.max_range);
      if (max_beam && options.max_range_discard) continue;
      const double a = scan.beam_angle(i);
      const Eigen::Vector2d dir(std::cos(a), std::sin(a));
      if (!max_beam) emit(origin + r * dir, +1);
      const double free_extent = max_beam ? scan.max_range : r - options.hit_label_margin;
      if (free_extent <= 0.0) continue;
      std::uniform_real_distribution<double> along(0.0, free_extent);
      for (int k = 0; k < options.free_per_beam; ++k) emit(origin + along(rng) * dir, -1);
    }
  }
  return points;
}

void write_points_csv(std::ostream& os, std::span<const LabeledPoint> points) {
  os << "x,y,label\n";
  os.precision(17);
  for (const auto& p : points) os << p.x(0) << ',' << p.x(1) << ',' << p.label << '\n';
}

std::vector<LaserScan> subsample(std::span<const LaserScan> scans, int every) {
  if (every < 1) throw InvalidArgument("scan subsampling stride must be positive");
  std::vector<LaserScan> out;
  for (std::size_t i = 0; i < scans.size(); i += static_cast<std::size_t>(every)) out.push_back(scans[i]);
  return out;
}

}  // namespace akp
