#include "akp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "akp/config.hpp"
#include "akp/error.hpp"
#include "akp/grid_map.hpp"
#include "akp/log.hpp"
#include "akp/serialization.hpp"
#include "json_fields.hpp"

namespace akp {
namespace {

using nlohmann::json;
using detail::Fields;

Eigen::VectorXd point_from(const json& doc, const char* what) {
  std::vector<double> values;
  try {
    values = doc.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string(what) + " must be an array of numbers");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json point_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

const char* to_string(WorldKind kind) { return kind == WorldKind::kSynthetic ? "synthetic" : "carmen"; }
const char* to_string(OffsetKind kind) { return kind == OffsetKind::kStraight ? "straight" : "grid-search"; }

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << std::setprecision(17);
  return out;
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {"stochastic", "rrtstar"};
  return methods;
}

}  // namespace

FeatureMap TimeFeatureSpec::build() const {
  return kind == FeatureKind::kRff ? FeatureMap::rff(count, lengthscale, seed)
                                   : FeatureMap::nystrom_uniform(count, lengthscale, jitter);
}

BodyModel ExperimentSpec::body() const {
  return body_radius > 0.0 ? BodyModel::disc(body_radius, body_points)
                           : BodyModel::point_robot(static_cast<int>(start.size()));
}

void ExperimentSpec::validate() const {
  if (start.size() != 2 || goal.size() != 2) throw InvalidArgument("start and goal must be 2-D points");
  if (!start.allFinite() || !goal.allFinite()) throw InvalidArgument("start and goal must be finite");
  if (seeds.empty()) throw InvalidArgument("at least one seed (repetition) is required");
  if (methods.empty()) throw InvalidArgument("at least one method is required");
  for (const auto& m : methods) {
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
      throw InvalidArgument("unknown method '" + m + "'");
    }
  }
  if (metric_resolution < 2) throw InvalidArgument("metric_resolution must be at least 2");
  if (map.feature_count < 1 || !(map.lengthscale > 0.0) || map.scan_subsample < 1 || map.free_per_beam < 0) {
    throw InvalidArgument("map hyperparameters are out of range");
  }
  if (time_features.count < 1 || !(time_features.lengthscale > 0.0)) {
    throw InvalidArgument("time feature parameters are out of range");
  }
  if (!(boundary_lengthscale > 0.0)) throw InvalidArgument("boundary_lengthscale must be positive");
  if (!(offset.resolution > 0.0) || !(offset.threshold > 0.0 && offset.threshold < 1.0)) {
    throw InvalidArgument("offset search parameters are out of range");
  }
  if (body_radius < 0.0 || (body_radius > 0.0 && body_points < 1)) throw InvalidArgument("body model is malformed");
  planner.validate();
  rrt.validate();
  if (!std::filesystem::exists(world.path)) throw IoError("world source not found: " + world.path.string());
}

void merge(ExperimentSpec& spec, const json& doc, const std::filesystem::path& base_dir) {
  Fields f(doc, "experiment");
  f.read("name", spec.name);
  if (const json* w = f.object("world")) {
    Fields fw(*w, "experiment.world");
    std::string type = to_string(spec.world.kind);
    fw.read("type", type);
    if (type == "synthetic") {
      spec.world.kind = WorldKind::kSynthetic;
    } else if (type == "carmen") {
      spec.world.kind = WorldKind::kCarmen;
    } else {
      throw InvalidArgument("unknown world type '" + type + "'");
    }
    std::string path;
    fw.read("path", path);
    if (!path.empty()) {
      spec.world.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
    }
    if (const json* c = fw.object("carmen")) merge(spec.world.carmen, *c);
    fw.finish();
  }
  if (const json* m = f.object("map")) {
    Fields fm(*m, "experiment.map");
    fm.read("feature_count", spec.map.feature_count);
    fm.read("lengthscale", spec.map.lengthscale);
    fm.read("feature_seed", spec.map.feature_seed);
    if (const json* t = fm.object("train")) merge(spec.map.train, *t);
    fm.read("free_per_beam", spec.map.free_per_beam);
    fm.read("hit_label_margin", spec.map.hit_label_margin);
    fm.read("max_range_discard", spec.map.max_range_discard);
    fm.read("point_seed", spec.map.point_seed);
    fm.read("scan_subsample", spec.map.scan_subsample);
    fm.read("domain_margin", spec.map.domain_margin);
    fm.finish();
  }
  if (const json* s = f.object("start")) spec.start = point_from(*s, "start");
  if (const json* g = f.object("goal")) spec.goal = point_from(*g, "goal");
  if (const json* t = f.object("time_features")) {
    Fields ft(*t, "experiment.time_features");
    std::string kind = to_string(spec.time_features.kind);
    ft.read("kind", kind);
    try {
      spec.time_features.kind = feature_kind_from_string(kind);
    } catch (const Error&) {
      throw InvalidArgument("unknown time feature kind '" + kind + "'");
    }
    ft.read("count", spec.time_features.count);
    ft.read("lengthscale", spec.time_features.lengthscale);
    ft.read("seed", spec.time_features.seed);
    ft.read("jitter", spec.time_features.jitter);
    ft.finish();
  }
  f.read("boundary_lengthscale", spec.boundary_lengthscale);
  if (const json* o = f.object("offset")) {
    Fields fo(*o, "experiment.offset");
    std::string kind = to_string(spec.offset.kind);
    fo.read("kind", kind);
    if (kind == "straight") {
      spec.offset.kind = OffsetKind::kStraight;
    } else if (kind == "grid-search") {
      spec.offset.kind = OffsetKind::kGridSearch;
    } else {
      throw InvalidArgument("unknown offset kind '" + kind + "'");
    }
    fo.read("resolution", spec.offset.resolution);
    fo.read("threshold", spec.offset.threshold);
    fo.finish();
  }
  if (const json* b = f.object("body")) {
    Fields fb(*b, "experiment.body");
    fb.read("radius", spec.body_radius);
    fb.read("points", spec.body_points);
    fb.finish();
  }
  if (const json* p = f.object("planner")) merge(spec.planner, *p);
  if (const json* r = f.object("rrt")) merge(spec.rrt, *r);
  f.read("methods", spec.methods);
  f.read("seeds", spec.seeds);
  std::string out = spec.output_dir.string();
  f.read("output_dir", out);
  if (!out.empty()) {
    spec.output_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : base_dir / out;
  }
  f.read("metric_resolution", spec.metric_resolution);
  f.finish();
}

ExperimentSpec experiment_from_json(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  merge(spec, doc, base_dir);
  if (spec.world.path.empty()) throw InvalidArgument("experiment.world.path is required");
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& file) {
  return experiment_from_json(read_json_file(file), file.parent_path());
}

json to_json(const ExperimentSpec& spec) {
  const MapSpec& m = spec.map;
  return json{
      {"name", spec.name},
      {"world",
       {{"type", to_string(spec.world.kind)},
        {"path", spec.world.path.string()},
        {"carmen", to_json(spec.world.carmen)}}},
      {"map",
       {{"feature_count", m.feature_count},
        {"lengthscale", m.lengthscale},
        {"feature_seed", m.feature_seed},
        {"train", to_json(m.train)},
        {"free_per_beam", m.free_per_beam},
        {"hit_label_margin", m.hit_label_margin},
        {"max_range_discard", m.max_range_discard},
        {"point_seed", m.point_seed},
        {"scan_subsample", m.scan_subsample},
        {"domain_margin", m.domain_margin}}},
      {"start", point_json(spec.start)},
      {"goal", point_json(spec.goal)},
      {"time_features",
       {{"kind", to_string(spec.time_features.kind)},
        {"count", spec.time_features.count},
        {"lengthscale", spec.time_features.lengthscale},
        {"seed", spec.time_features.seed},
        {"jitter", spec.time_features.jitter}}},
      {"boundary_lengthscale", spec.boundary_lengthscale},
      {"offset",
       {{"kind", to_string(spec.offset.kind)},
        {"resolution", spec.offset.resolution},
        {"threshold", spec.offset.threshold}}},
      {"body", {{"radius", spec.body_radius}, {"points", spec.body_points}}},
      {"planner", to_json(spec.planner)},
      {"rrt", to_json(spec.rrt)},
      {"methods", spec.methods},
      {"seeds", spec.seeds},
      {"output_dir", spec.output_dir.string()},
      {"metric_resolution", spec.metric_resolution},
  };
}

std::vector<LaserScan> load_scans(const WorldSource& source, CarmenLog* log_info) {
  if (source.kind == WorldKind::kSynthetic) return simulate_scans(load_world(source.path));
  std::ifstream in(source.path);
  if (!in) throw IoError("cannot open " + source.path.string());
  CarmenLog log = parse_carmen(in, source.carmen);
  std::vector<LaserScan> scans = std::move(log.scans);
  if (log_info != nullptr) {
    log.scans.clear();
    *log_info = std::move(log);
  }
  return scans;
}

MapBuild build_map(const WorldSource& source, const MapSpec& spec) {
  std::vector<LaserScan> scans = subsample(load_scans(source), spec.scan_subsample);
  ScanToPointsOptions opts;
  opts.free_per_beam = spec.free_per_beam;
  opts.hit_label_margin = spec.hit_label_margin;
  opts.max_range_discard = spec.max_range_discard;
  opts.seed = spec.point_seed;
  Box domain;
  if (source.kind == WorldKind::kSynthetic) {
    domain = load_world(source.path).bounds;
    opts.bounds = domain;
  }
  std::vector<LabeledPoint> points = scans_to_points(scans, opts);
  if (source.kind == WorldKind::kCarmen) domain = bounding_box(points, spec.domain_margin);
  TrainStats stats;
  HilbertMap map = train_map(points, FeatureMap::rff(spec.feature_count, spec.lengthscale, spec.feature_seed, domain),
                             spec.train, &stats);
  return MapBuild{std::move(map), stats, scans.size(), points.size()};
}

PathMetrics measure_curve(const Curve& curve, const HilbertMap& map, const BodyModel& body, int resolution) {
  if (resolution < 2) throw InvalidArgument("metric resolution must be at least 2");
  PathMetrics m;
  m.resolution = resolution;
  double previous_speed = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double s = static_cast<double>(i) / (resolution - 1);
    const Eigen::VectorXd x = curve(s, 0);
    for (std::size_t b = 0; b < body.size(); ++b) {
      m.max_occupancy = std::max(m.max_occupancy, map.query(body.workspace_point(x, b)));
    }
    const double speed = curve(s, 1).norm();
    if (i > 0) m.length += 0.5 * (speed + previous_speed) / (resolution - 1);
    previous_speed = speed;
  }
  return m;
}

PathMetrics measure_path(const Path& path, const HilbertMap& map, const BodyModel& body, int resolution) {
  return measure_curve([&](double s, int order) { return path.eval(s, order); }, map, body, resolution);
}

PathMetrics measure_polyline(const Eigen::MatrixXd& polyline, const HilbertMap& map, const BodyModel& body,
                             int resolution) {
  const OffsetPath curve = OffsetPath::polyline(polyline);
  return measure_curve([&](double s, int order) { return curve.eval(s, order); }, map, body, resolution);
}

Path initial_path(const ExperimentSpec& spec, const HilbertMap& map) {
  FeatureMap features = spec.time_features.build();
  FeatureMap boundary = default_boundary_features(spec.boundary_lengthscale);
  if (spec.offset.kind == OffsetKind::kStraight) {
    return Path::straight_line(spec.start, spec.goal, std::move(features), std::move(boundary));
  }
  const Box& domain = map.domain();
  const double res = spec.offset.resolution;
  const int cols = static_cast<int>(std::floor((domain.hi(0) - domain.lo(0)) / res));
  const int rows = static_cast<int>(std::floor((domain.hi(1) - domain.lo(1)) / res));
  const GridMap grid = rasterize(map, domain.lo, res, rows, cols);
  std::optional<Eigen::MatrixXd> route = grid_shortest_path(grid, spec.start, spec.goal, spec.offset.threshold);
  if (!route) {
    warn("grid search found no route; falling back to the straight-line offset");
    return Path::straight_line(spec.start, spec.goal, std::move(features), std::move(boundary));
  }
  return Path(std::move(features), std::move(boundary), OffsetPath::polyline(std::move(*route)));
}

json run_to_json(const PlanRun& run) {
  json iterations = json::array();
  for (const auto& it : run.iterations) {
    json samples = json::array();
    for (const auto& s : it.samples) {
      samples.push_back(json{{"t", s.t}, {"u", s.body_index}, {"occupancy", s.occupancy}, {"accepted", s.accepted}});
    }
    json rec{{"iteration", it.iteration},
             {"learning_rate", it.learning_rate},
             {"drawn", it.samples.size()},
             {"accepted", it.accepted},
             {"boundary_residual", it.boundary_residual},
             {"max_occupancy", it.max_occupancy},
             {"weight_change", it.weight_change},
             {"samples", std::move(samples)}};
    if (it.objective) {
      rec["objective"] = json{
          {"obstacle", it.objective->obstacle}, {"dynamics", it.objective->dynamics}, {"total", it.objective->total}};
    }
    iterations.push_back(std::move(rec));
  }
  return json{{"config", to_json(run.config)},
              {"status", to_string(run.status)},
              {"iterations", run.iteration_count()},
              {"samples_drawn", run.samples_drawn},
              {"samples_accepted", run.samples_accepted},
              {"warnings", run.warnings},
              {"records", std::move(iterations)}};
}

json run_to_json(const RrtResult& result, const RrtConfig& config) {
  json history = json::array();
  for (const auto& [samples, cost] : result.cost_history) history.push_back(json{samples, cost});
  return json{{"config", to_json(config)},
              {"status", to_string(result.status)},
              {"samples", result.samples},
              {"samples_to_first_solution", result.samples_to_first_solution},
              {"cost", result.cost},
              {"gamma", result.gamma},
              {"tree_size", result.tree.size()},
              {"waypoints", result.polyline.cols()},
              {"cost_history", std::move(history)}};
}

json metrics_to_json(const PathMetrics& m, const std::string& method, std::uint64_t seed, const std::string& status) {
  return json{{"method", method},
              {"seed", seed},
              {"status", status},
              {"max_occupancy", m.max_occupancy},
              {"length", m.length},
              {"samples", m.samples},
              {"sweep_resolution", m.resolution}};
}

SeedOutcome run_method(const ExperimentSpec& spec, const HilbertMap& map, const std::string& method,
                       std::uint64_t seed, const std::filesystem::path& dir) {
  SeedOutcome out;
  out.method = method;
  out.seed = seed;
  std::filesystem::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const BodyModel body = spec.body();
    if (method == "stochastic") {
      PlannerConfig cfg = spec.planner;
      cfg.seed = seed;
      PlanResult res = plan_from(map, initial_path(spec, map), spec.start, spec.goal, body, cfg);
      out.status = to_string(res.run.status);
      out.ok = true;
      out.metrics = measure_path(res.path, map, body, spec.metric_resolution);
      out.metrics.samples = res.run.samples_drawn;
      for (const auto& it : res.run.iterations) out.trace.push_back(it.max_occupancy);
      auto csv = open_output(dir / "path.csv");
      write_path_csv(csv, res.path, spec.metric_resolution);
      json run = run_to_json(res.run);
      run["method"] = method;
      run["path"] = to_json(res.path);
      write_json_file(dir / "run.json", run);
      auto trace = open_output(dir / "trace.csv");
      trace << "iteration,max_occupancy\n";
      for (std::size_t i = 0; i < out.trace.size(); ++i) trace << i << ',' << out.trace[i] << '\n';
    } else if (method == "rrtstar") {
      RrtConfig cfg = spec.rrt;
      cfg.seed = seed;
      RrtResult res = rrt_star_plan(map, spec.start, spec.goal, cfg);
      out.status = to_string(res.status);
      json run = run_to_json(res, cfg);
      run["method"] = method;
      write_json_file(dir / "run.json", run);
      if (res.status == RrtStatus::kSolved) {
        out.ok = true;
        out.metrics = measure_polyline(res.polyline, map, body, spec.metric_resolution);
        out.metrics.samples = res.samples;
        auto csv = open_output(dir / "path.csv");
        write_polyline_csv(csv, res.polyline);
      }
    } else {
      throw InvalidArgument("unknown method '" + method + "'");
    }
    if (out.ok) write_json_file(dir / "metrics.json", metrics_to_json(out.metrics, method, seed, out.status));
  } catch (const InvalidEndpoint& e) {
    out.status = "invalid-endpoint";
    out.error = e.what();
  } catch (const NumericalError& e) {
    out.status = "numerical-error";
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<SeedOutcome>& outcomes, const std::vector<std::string>& methods) {
  std::vector<SummaryRow> rows;
  for (const char* metric : {"max_occupancy", "length", "samples"}) {
    for (const auto& method : methods) {
      std::vector<double> values;
      for (const auto& o : outcomes) {
        if (o.method != method || !o.ok) continue;
        const std::string name = metric;
        values.push_back(name == "max_occupancy" ? o.metrics.max_occupancy
                         : name == "length"      ? o.metrics.length
                                                 : static_cast<double>(o.metrics.samples));
      }
      SummaryRow row{metric, method, 0.0, 0.0, static_cast<int>(values.size())};
      if (!values.empty()) {
        double sum = 0.0;
        for (double v : values) sum += v;
        row.mean = sum / values.size();
        if (values.size() > 1) {
          double ss = 0.0;
          for (double v : values) ss += (v - row.mean) * (v - row.mean);
          row.standard_error = std::sqrt(ss / (values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

BenchmarkReport run_benchmark(const ExperimentSpec& spec, const HilbertMap& map, const std::filesystem::path& out) {
  spec.validate();
  std::filesystem::create_directories(out);
  BenchmarkReport report;
  std::ofstream timing(out / "timing.log");
  for (const auto& method : spec.methods) {
    for (const std::uint64_t seed : spec.seeds) {
      SeedOutcome o = run_method(spec, map, method, seed, out / method / std::to_string(seed));
      timing << method << ' ' << seed << ' ' << o.status << ' ' << std::fixed << std::setprecision(3) << o.seconds
             << " s\n";
      if (!o.ok) warn(method + " seed " + std::to_string(seed) + " failed: " + o.status + " " + o.error);
      report.outcomes.push_back(std::move(o));
    }
  }
  report.summary = summarize(report.outcomes, spec.methods);

  auto per_seed = open_output(out / "per_seed.csv");
  per_seed << "method,seed,status,max_occupancy,length,samples\n";
  for (const auto& o : report.outcomes) {
    per_seed << o.method << ',' << o.seed << ',' << o.status << ',';
    if (o.ok) {
      per_seed << o.metrics.max_occupancy << ',' << o.metrics.length << ',' << o.metrics.samples << '\n';
    } else {
      per_seed << ",,\n";
    }
  }
  auto summary = open_output(out / "summary.csv");
  summary << "metric,method,mean,stderr,n\n";
  for (const auto& r : report.summary) {
    summary << r.metric << ',' << r.method << ',' << r.mean << ',' << r.standard_error << ',' << r.count << '\n';
  }
  auto traces = open_output(out / "traces.csv");
  traces << "method,seed,iteration,max_occupancy\n";
  for (const auto& o : report.outcomes) {
    for (std::size_t i = 0; i < o.trace.size(); ++i) {
      traces << o.method << ',' << o.seed << ',' << i << ',' << o.trace[i] << '\n';
    }
  }
  const bool any = std::any_of(report.outcomes.begin(), report.outcomes.end(), [](const auto& o) { return o.ok; });
  if (!any) throw Error("every benchmark run failed");
  return report;
}

}  // namespace akp
