#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "akp/carmen.hpp"
#include "akp/objective.hpp"
#include "akp/occupancy.hpp"
#include "akp/planner.hpp"
#include "akp/rrt_star.hpp"
#include "akp/world.hpp"

namespace akp {

enum class WorldKind { kSynthetic, kCarmen };

struct WorldSource {
  WorldKind kind = WorldKind::kSynthetic;
  std::filesystem::path path;
  CarmenOptions carmen;
};

struct MapSpec {
  int feature_count = 1000;
  double lengthscale = 0.3;
  std::uint64_t feature_seed = 0;
  TrainOptions train;
  int free_per_beam = 4;
  double hit_label_margin = 0.05;
  bool max_range_discard = false;
  std::uint64_t point_seed = 0;
  int scan_subsample = 1;
  /// Margin around the training points for CARMEN sources; synthetic
  /// sources use the world bounds.
  double domain_margin = 0.5;
};

struct TimeFeatureSpec {
  FeatureKind kind = FeatureKind::kRff;
  int count = 100;
  double lengthscale = 0.1;
  std::uint64_t seed = 0;
  double jitter = 1e-8;

  FeatureMap build() const;
};

enum class OffsetKind { kStraight, kGridSearch };

struct OffsetSpec {
  OffsetKind kind = OffsetKind::kStraight;
  double resolution = 0.1;
  double threshold = 0.3;
};

struct ExperimentSpec {
  std::string name = "experiment";
  WorldSource world;
  MapSpec map;
  Eigen::VectorXd start;
  Eigen::VectorXd goal;
  TimeFeatureSpec time_features;
  double boundary_lengthscale = 0.2;
  OffsetSpec offset;
  /// 0 selects a point robot, otherwise a disc of body points.
  double body_radius = 0.0;
  int body_points = 8;
  PlannerConfig planner;
  RrtConfig rrt;
  std::vector<std::string> methods = {"stochastic", "rrtstar"};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  /// Empty means "use the caller's default".
  std::filesystem::path output_dir;
  int metric_resolution = 1000;

  BodyModel body() const;
  /// Throws InvalidArgument for inconsistent fields and IoError for missing files.
  void validate() const;
};

/// Overrides the fields present in `doc` (same schema as the experiment
/// document) without validating. Relative paths resolve against `base_dir`.
void merge(ExperimentSpec& spec, const nlohmann::json& doc, const std::filesystem::path& base_dir);
/// Complete document: requires a world source and validates.
ExperimentSpec experiment_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentSpec load_experiment(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentSpec& spec);

/// Scans of a world source: simulated for synthetic worlds, parsed for logs.
std::vector<LaserScan> load_scans(const WorldSource& source, CarmenLog* log_info = nullptr);

struct MapBuild {
  HilbertMap map;
  TrainStats stats;
  std::size_t scans = 0;
  std::size_t points = 0;
};

MapBuild build_map(const WorldSource& source, const MapSpec& spec);

/// Quantities shared by every method: max occupancy over `resolution`
/// uniform parameter values (all body points) and the trapezoidal length
/// integral of |x'(s)| over the same values.
struct PathMetrics {
  double max_occupancy = 0.0;
  double length = 0.0;
  long samples = 0;
  int resolution = 0;
};

using Curve = std::function<Eigen::VectorXd(double s, int order)>;

PathMetrics measure_curve(const Curve& curve, const HilbertMap& map, const BodyModel& body, int resolution);
PathMetrics measure_path(const Path& path, const HilbertMap& map, const BodyModel& body, int resolution);
/// Polylines are measured through their arc-length parameterization.
PathMetrics measure_polyline(const Eigen::MatrixXd& polyline, const HilbertMap& map, const BodyModel& body,
                             int resolution);

/// Straight line, or grid A* on the rasterized map when configured.
Path initial_path(const ExperimentSpec& spec, const HilbertMap& map);

nlohmann::json run_to_json(const PlanRun& run);
nlohmann::json run_to_json(const RrtResult& result, const RrtConfig& config);
nlohmann::json metrics_to_json(const PathMetrics& metrics, const std::string& method, std::uint64_t seed,
                               const std::string& status);

struct SeedOutcome {
  std::string method;
  std::uint64_t seed = 0;
  std::string status;
  bool ok = false;
  std::string error;
  PathMetrics metrics;
  /// Max occupancy after each iteration (stochastic planner only).
  std::vector<double> trace;
  double seconds = 0.0;
};

/// Runs one method for one seed and writes path.csv, run.json and
/// metrics.json (plus trace.csv for the stochastic planner) into `dir`.
SeedOutcome run_method(const ExperimentSpec& spec, const HilbertMap& map, const std::string& method,
                       std::uint64_t seed, const std::filesystem::path& dir);

struct SummaryRow {
  std::string metric;
  std::string method;
  double mean = 0.0;
  double standard_error = 0.0;
  int count = 0;
};

struct BenchmarkReport {
  std::vector<SeedOutcome> outcomes;
  std::vector<SummaryRow> summary;
};

/// Mean and standard error (sample stddev / sqrt(n)) per method of
/// max_occupancy, length and samples over successful seeds.
std::vector<SummaryRow> summarize(const std::vector<SeedOutcome>& outcomes, const std::vector<std::string>& methods);

/// All methods x seeds into `<out>/<method>/<seed>/`, then `<out>/summary.csv`,
/// `<out>/per_seed.csv` and `<out>/traces.csv`. Wall-clock times go only to
/// `<out>/timing.log`. Throws if every run failed.
BenchmarkReport run_benchmark(const ExperimentSpec& spec, const HilbertMap& map, const std::filesystem::path& out);

}  // namespace akp
