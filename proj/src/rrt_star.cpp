#include "akp/rrt_star.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include "akp/error.hpp"

namespace akp {

void RrtConfig::validate() const {
  if (max_samples < 1) throw InvalidArgument("RRT* max_samples must be at least 1");
  if (!(steer_step > 0.0)) throw InvalidArgument("RRT* steer_step must be positive");
  if (!(collision_resolution > 0.0) || collision_resolution > steer_step) {
    throw InvalidArgument("RRT* collision_resolution must lie in (0, steer_step]");
  }
  if (!(neighbor_radius_gamma >= 0.0)) throw InvalidArgument("RRT* neighbor_radius_gamma must be non-negative");
  if (!(p_safe > 0.0 && p_safe < 1.0)) throw InvalidArgument("P_safe must lie in (0, 1)");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw InvalidArgument("RRT* goal_bias must lie in [0, 1]");
  if (stall_samples < 0 || !(stall_improvement >= 0.0)) throw InvalidArgument("RRT* stall options are malformed");
}

const char* to_string(RrtStatus status) {
  switch (status) {
    case RrtStatus::kSolved:
      return "solved";
    case RrtStatus::kNoPath:
      return "no-path";
  }
  return "unknown";
}

namespace {

class Search {
 public:
  Search(const HilbertMap& map, const RrtConfig& cfg) : map_(map), cfg_(cfg) {}

  bool free(const Eigen::VectorXd& x) const { return map_.domain().contains(x) && map_.query(x) <= cfg_.p_safe; }

  /// Interior points of the edge at spacing <= collision_resolution; the
  /// endpoints are assumed checked already.
  bool edge_free(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const double d = (b - a).norm();
    const int k = static_cast<int>(std::ceil(d / cfg_.collision_resolution));
    for (int i = 1; i < k; ++i) {
      if (!free(a + (b - a) * (static_cast<double>(i) / k))) return false;
    }
    return true;
  }

 private:
  const HilbertMap& map_;
  const RrtConfig& cfg_;
};

double auto_gamma(const Box& domain) {
  const int d = domain.dim();
  const double volume = (domain.hi - domain.lo).prod();
  const double unit_ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return 2.0 * std::pow(1.0 + 1.0 / d, 1.0 / d) * std::pow(volume / unit_ball, 1.0 / d);
}

}  // namespace

RrtResult rrt_star_plan(const HilbertMap& map, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                        const RrtConfig& config) {
  config.validate();
  const int dim = map.workspace_dim();
  if (start.size() != dim || goal.size() != dim) throw InvalidArgument("endpoint dimension differs from the map");
  Search search(map, config);
  if (!search.free(start)) throw InvalidEndpoint("start is outside the map or occupied");
  if (!search.free(goal)) throw InvalidEndpoint("goal is outside the map or occupied");

  const Box& domain = map.domain();
  RrtResult result;
  result.gamma = config.neighbor_radius_gamma > 0.0 ? config.neighbor_radius_gamma : auto_gamma(domain);

  std::vector<RrtNode>& tree = result.tree;
  std::vector<std::vector<int>> children;
  tree.push_back({start, -1, 0.0});
  children.emplace_back();
  std::vector<int> goal_links;
  int best_link = -1;
  double best = std::numeric_limits<double>::infinity();
  double stall_reference = best;
  long stall_since = 0;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto reparent_costs = [&](int root, double delta) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int c : children[n]) {
        tree[c].cost += delta;
        stack.push_back(c);
      }
    }
  };
  auto refresh_best = [&] {
    for (int n : goal_links) {
      const double c = tree[n].cost + (goal - tree[n].x).norm();
      if (c < best) {
        best = c;
        best_link = n;
      }
    }
  };

  std::vector<std::pair<double, int>> near;
  for (long s = 1; s <= config.max_samples; ++s) {
    result.samples = s;
    Eigen::VectorXd sample(dim);
    if (unit(rng) < config.goal_bias) {
      sample = goal;
    } else {
      for (int d = 0; d < dim; ++d) sample(d) = domain.lo(d) + unit(rng) * (domain.hi(d) - domain.lo(d));
    }

    int nearest = 0;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      const double d = (tree[i].x - sample).squaredNorm();
      if (d < nearest_dist) {
        nearest_dist = d;
        nearest = i;
      }
    }
    nearest_dist = std::sqrt(nearest_dist);
    if (nearest_dist == 0.0) continue;
    const Eigen::VectorXd x_new =
        nearest_dist <= config.steer_step
            ? sample
            : Eigen::VectorXd(tree[nearest].x + (sample - tree[nearest].x) * (config.steer_step / nearest_dist));
    if (!search.free(x_new)) continue;

    const double n = static_cast<double>(tree.size());
    const double radius =
        std::min(result.gamma * std::pow(std::log(n + 1.0) / (n + 1.0), 1.0 / dim), config.steer_step);
    near.clear();
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      const double d = (tree[i].x - x_new).norm();
      if (d <= radius || i == nearest) near.emplace_back(d, i);
    }
    // Choose the cheapest parent whose edge is free; candidates are tried in
    // cost order so the first feasible one is optimal.
    std::sort(near.begin(), near.end(), [&](const auto& a, const auto& b) {
      const double ca = tree[a.second].cost + a.first;
      const double cb = tree[b.second].cost + b.first;
      return ca != cb ? ca < cb : a.second < b.second;
    });
    int parent = -1;
    for (const auto& [d, i] : near) {
      if (search.edge_free(tree[i].x, x_new)) {
        parent = i;
        break;
      }
    }
    if (parent < 0) continue;

    const int id = static_cast<int>(tree.size());
    const double new_cost = tree[parent].cost + (tree[parent].x - x_new).norm();
    tree.push_back({x_new, parent, new_cost});
    children.emplace_back();
    children[parent].push_back(id);

    for (const auto& [d, i] : near) {
      if (i == parent || new_cost + d >= tree[i].cost) continue;
      if (!search.edge_free(x_new, tree[i].x)) continue;
      auto& siblings = children[tree[i].parent];
      siblings.erase(std::find(siblings.begin(), siblings.end(), i));
      const double delta = new_cost + d - tree[i].cost;
      tree[i].parent = id;
      tree[i].cost = new_cost + d;
      children[id].push_back(i);
      reparent_costs(i, delta);
    }

    const double to_goal = (goal - x_new).norm();
    if (to_goal <= config.steer_step && (to_goal == 0.0 || search.edge_free(x_new, goal))) goal_links.push_back(id);
    const double previous = best;
    refresh_best();
    if (best < previous) {
      if (result.samples_to_first_solution < 0) result.samples_to_first_solution = s;
      result.cost_history.emplace_back(s, best);
    }
    if (config.stall_samples > 0 && best_link >= 0) {
      if (best < stall_reference * (1.0 - config.stall_improvement)) {
        stall_reference = best;
        stall_since = s;
      } else if (s - stall_since >= config.stall_samples) {
        break;
      }
    }
  }

  if (best_link < 0) return result;
  result.status = RrtStatus::kSolved;
  result.cost = best;
  std::vector<int> chain;
  for (int n = best_link; n >= 0; n = tree[n].parent) chain.push_back(n);
  const bool goal_is_node = (tree[best_link].x - goal).norm() == 0.0;
  const int count = static_cast<int>(chain.size()) + (goal_is_node ? 0 : 1);
  result.polyline.resize(dim, count);
  int col = 0;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) result.polyline.col(col++) = tree[*it].x;
  if (!goal_is_node) result.polyline.col(col) = goal;
  return result;
}

double polyline_length(const Eigen::MatrixXd& polyline) {
  double length = 0.0;
  for (Eigen::Index k = 1; k < polyline.cols(); ++k) length += (polyline.col(k) - polyline.col(k - 1)).norm();
  return length;
}

void write_polyline_csv(std::ostream& os, const Eigen::MatrixXd& polyline) {
  const Eigen::Index dim = polyline.rows();
  if (dim == 2) {
    os << "x,y\n";
  } else {
    for (Eigen::Index d = 0; d < dim; ++d) os << (d ? "," : "") << "x_" << (d + 1);
    os << '\n';
  }
  os << std::setprecision(17);
  for (Eigen::Index k = 0; k < polyline.cols(); ++k) {
    for (Eigen::Index d = 0; d < dim; ++d) os << (d ? "," : "") << polyline(d, k);
    os << '\n';
  }
}

}  // namespace akp
