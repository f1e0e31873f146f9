// Command-line harness: train-map, plan, rrt, benchmark.
//
// Settings are layered: built-in defaults, then the --config document
// (experiment schema, any subset of sections), then explicit flags.
// Exit codes: 0 ok, 1 planner infeasible, 2 I/O error, 3 invalid config.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "akp/bench.hpp"
#include "akp/config.hpp"
#include "akp/error.hpp"
#include "akp/serialization.hpp"

namespace {

using namespace akp;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flags recorded at registration and applied after the config file.
class Overrides {
 public:
  template <typename T, typename Set>
  void option(CLI::App* app, const std::string& name, const std::string& help, Set set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    apply_.push_back([opt, value, set] {
      if (opt->count() > 0) set(*value);
    });
  }

  template <typename Set>
  void flag(CLI::App* app, const std::string& name, const std::string& help, Set set) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(name, *value, help);
    apply_.push_back([opt, value, set] {
      if (opt->count() > 0) set(*value);
    });
  }

  void apply() const {
    for (const auto& f : apply_) f();
  }

 private:
  std::vector<std::function<void()>> apply_;
};

Eigen::VectorXd to_point(const std::vector<double>& v) {
  if (v.size() != 2) throw InvalidArgument("points are given as x,y");
  return Eigen::Vector2d(v[0], v[1]);
}

void add_map_flags(CLI::App* app, Overrides& ov, ExperimentSpec& s) {
  ov.option<std::string>(app, "--world", "synthetic world JSON", [&s](const std::string& v) {
    s.world.kind = WorldKind::kSynthetic;
    s.world.path = v;
  });
  ov.option<std::string>(app, "--carmen", "CARMEN log", [&s](const std::string& v) {
    s.world.kind = WorldKind::kCarmen;
    s.world.path = v;
  });
  ov.flag(app, "--use-odometry", "CARMEN: use the raw odometry pose", [&s](bool v) { s.world.carmen.use_odometry = v; });
  ov.option<double>(app, "--fov", "CARMEN field of view [rad]", [&s](double v) { s.world.carmen.fov = v; });
  ov.option<double>(app, "--max-range", "CARMEN max range [m]", [&s](double v) { s.world.carmen.max_range = v; });
  ov.option<int>(app, "--map-features", "spatial RFF count", [&s](int v) { s.map.feature_count = v; });
  ov.option<double>(app, "--map-lengthscale", "spatial lengthscale [m]", [&s](double v) { s.map.lengthscale = v; });
  ov.option<std::uint64_t>(app, "--map-feature-seed", "spatial feature seed",
                           [&s](std::uint64_t v) { s.map.feature_seed = v; });
  ov.option<int>(app, "--epochs", "training epochs", [&s](int v) { s.map.train.epochs = v; });
  ov.option<double>(app, "--step", "training step size", [&s](double v) { s.map.train.step = v; });
  ov.option<double>(app, "--l2", "L2 regularization", [&s](double v) { s.map.train.l2 = v; });
  ov.option<int>(app, "--train-batch", "training mini-batch", [&s](int v) { s.map.train.batch = v; });
  ov.option<std::uint64_t>(app, "--train-seed", "training sampler seed",
                           [&s](std::uint64_t v) { s.map.train.seed = v; });
  ov.option<int>(app, "--free-per-beam", "free points per beam", [&s](int v) { s.map.free_per_beam = v; });
  ov.option<double>(app, "--hit-margin", "free-point margin before a hit [m]",
                    [&s](double v) { s.map.hit_label_margin = v; });
  ov.flag(app, "--discard-max-range", "drop max-range beams", [&s](bool v) { s.map.max_range_discard = v; });
  ov.option<std::uint64_t>(app, "--point-seed", "free-point sampling seed",
                           [&s](std::uint64_t v) { s.map.point_seed = v; });
  ov.option<int>(app, "--subsample", "keep every k-th scan", [&s](int v) { s.map.scan_subsample = v; });
  ov.option<double>(app, "--domain-margin", "map domain margin [m]", [&s](double v) { s.map.domain_margin = v; });
}

void add_endpoint_flags(CLI::App* app, Overrides& ov, ExperimentSpec& s) {
  ov.option<std::vector<double>>(app, "--start", "start x,y", [&s](const std::vector<double>& v) {
    s.start = to_point(v);
  });
  ov.option<std::vector<double>>(app, "--goal", "goal x,y", [&s](const std::vector<double>& v) {
    s.goal = to_point(v);
  });
  for (const char* name : {"--start", "--goal"}) app->get_option(name)->delimiter(',');
  ov.option<double>(app, "--body-radius", "disc body radius [m], 0 for a point", [&s](double v) { s.body_radius = v; });
  ov.option<int>(app, "--body-points", "points on the body circle", [&s](int v) { s.body_points = v; });
  ov.option<int>(app, "--metric-resolution", "metric sweep resolution", [&s](int v) { s.metric_resolution = v; });
}

void add_planner_flags(CLI::App* app, Overrides& ov, ExperimentSpec& s) {
  PlannerConfig& c = s.planner;
  ov.option<double>(app, "--p-safe", "occupancy threshold", [&s](double v) {
    s.planner.p_safe = v;
    s.rrt.p_safe = v;
  });
  ov.option<int>(app, "--batch", "mini-batch size", [&c](int v) { c.batch = v; });
  ov.option<double>(app, "--lambda", "dynamics weight", [&c](double v) { c.lambda = v; });
  ov.option<double>(app, "--eta0", "initial learning rate", [&c](double v) { c.schedule.eta0 = v; });
  ov.option<double>(app, "--tau", "schedule time constant", [&c](double v) { c.schedule.tau = v; });
  ov.option<double>(app, "--power", "schedule exponent in (0.5, 1]", [&c](double v) { c.schedule.power = v; });
  ov.option<int>(app, "--max-iters", "iteration limit", [&c](int v) { c.max_iters = v; });
  ov.option<double>(app, "--weight-tolerance", "convergence weight-change tolerance",
                    [&c](double v) { c.convergence.weight_tolerance = v; });
  ov.option<int>(app, "--patience", "convergence window", [&c](int v) { c.convergence.patience = v; });
  ov.option<int>(app, "--dense-resolution", "convergence sweep resolution",
                 [&c](int v) { c.convergence.dense_resolution = v; });
  ov.option<double>(app, "--boundary-tolerance", "endpoint tolerance", [&c](double v) { c.boundary_tolerance = v; });
  ov.option<int>(app, "--boundary-sweeps", "boundary passes per enforcement",
                 [&c](int v) { c.boundary_max_sweeps = v; });
  ov.option<std::string>(app, "--boundary-mode", "per-batch | per-sample", [&c](const std::string& v) {
    if (v == "per-batch") {
      c.boundary_mode = BoundaryMode::kPerBatch;
    } else if (v == "per-sample") {
      c.boundary_mode = BoundaryMode::kPerSample;
    } else {
      throw InvalidArgument("unknown boundary mode '" + v + "'");
    }
  });
  ov.flag(app, "--dyn-cost-relative-to-offset", "report U_dyn relative to the offset",
          [&c](bool v) { c.dyn_cost_relative_to_offset = v; });
  ov.option<int>(app, "--objective-resolution", "objective snapshot resolution, 0 = off",
                 [&c](int v) { c.objective_resolution = v; });
  ov.option<double>(app, "--stall-fraction", "stalled-warning acceptance fraction",
                    [&c](double v) { c.stall_fraction = v; });
  ov.option<int>(app, "--stall-window", "stalled-warning window", [&c](int v) { c.stall_window = v; });
  TimeFeatureSpec& t = s.time_features;
  ov.option<std::string>(app, "--time-features", "rff | nystrom",
                         [&t](const std::string& v) { t.kind = feature_kind_from_string(v); });
  ov.option<int>(app, "--time-count", "time feature count", [&t](int v) { t.count = v; });
  ov.option<double>(app, "--time-lengthscale", "time lengthscale", [&t](double v) { t.lengthscale = v; });
  ov.option<std::uint64_t>(app, "--time-seed", "time feature seed", [&t](std::uint64_t v) { t.seed = v; });
  ov.option<double>(app, "--boundary-lengthscale", "boundary feature lengthscale",
                    [&s](double v) { s.boundary_lengthscale = v; });
  ov.option<std::string>(app, "--offset", "straight | grid-search", [&s](const std::string& v) {
    if (v == "straight") {
      s.offset.kind = OffsetKind::kStraight;
    } else if (v == "grid-search") {
      s.offset.kind = OffsetKind::kGridSearch;
    } else {
      throw InvalidArgument("unknown offset kind '" + v + "'");
    }
  });
  ov.option<double>(app, "--offset-resolution", "grid search cell size [m]",
                    [&s](double v) { s.offset.resolution = v; });
  ov.option<double>(app, "--offset-threshold", "grid search occupancy threshold",
                    [&s](double v) { s.offset.threshold = v; });
}

void add_rrt_flags(CLI::App* app, Overrides& ov, ExperimentSpec& s) {
  RrtConfig& r = s.rrt;
  ov.option<long>(app, "--max-samples", "sample budget", [&r](long v) { r.max_samples = v; });
  ov.option<double>(app, "--steer-step", "steering step [m]", [&r](double v) { r.steer_step = v; });
  ov.option<double>(app, "--gamma", "neighbor radius scale, 0 = automatic",
                    [&r](double v) { r.neighbor_radius_gamma = v; });
  ov.option<double>(app, "--collision-resolution", "edge check spacing [m]",
                    [&r](double v) { r.collision_resolution = v; });
  ov.option<double>(app, "--goal-bias", "goal sampling probability", [&r](double v) { r.goal_bias = v; });
  ov.option<long>(app, "--stall-samples", "early stop window, 0 = off", [&r](long v) { r.stall_samples = v; });
  ov.option<double>(app, "--stall-improvement", "relative improvement reset",
                    [&r](double v) { r.stall_improvement = v; });
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("AKP_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("akp-out");
}

/// Defaults, then the config document, then flags.
void layer(ExperimentSpec& spec, const std::string& config_file, const Overrides& ov) {
  if (!config_file.empty()) {
    nlohmann::json doc;
    try {
      doc = read_json_file(config_file);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
    merge(spec, doc, std::filesystem::path(config_file).parent_path());
  }
  ov.apply();
}

void require_file(const std::filesystem::path& file, const char* what) {
  if (file.empty()) throw InvalidArgument(std::string(what) + " is required");
  if (!std::filesystem::exists(file)) throw IoError(std::string(what) + " not found: " + file.string());
}

HilbertMap load_map(const std::string& file) {
  require_file(file, "map file");
  return hilbert_map_from_json(read_json_file(file));
}

int cmd_train_map(const ExperimentSpec& spec, const std::string& out_file, const std::string& raster_file,
                  double raster_resolution) {
  require_file(spec.world.path, "world source");
  const MapBuild build = build_map(spec.world, spec.map);
  const std::filesystem::path out =
      out_file.empty() ? default_output_dir() / "map.json" : std::filesystem::path(out_file);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_json_file(out, to_json(build.map));
  std::cout << "scans " << build.scans << "\npoints " << build.points << " (occupied " << build.stats.occupied
            << ", free " << build.stats.free << ")\n"
            << std::setprecision(6) << "log-loss " << build.stats.log_loss << " (prior " << build.stats.prior_log_loss
            << ")\nmap written to " << out.string() << '\n';
  if (!raster_file.empty()) {
    std::ofstream r(raster_file);
    if (!r) throw IoError("cannot write " + raster_file);
    const Box& d = build.map.domain();
    r << "x,y,occupancy\n" << std::setprecision(17);
    for (double y = d.lo(1); y <= d.hi(1); y += raster_resolution) {
      for (double x = d.lo(0); x <= d.hi(0); x += raster_resolution) {
        r << x << ',' << y << ',' << build.map.query(Eigen::Vector2d(x, y)) << '\n';
      }
    }
  }
  return kExitOk;
}

void check_endpoints(const ExperimentSpec& spec) {
  if (spec.start.size() != 2 || spec.goal.size() != 2) throw InvalidArgument("--start and --goal are required");
  spec.planner.validate();
  spec.rrt.validate();
}

std::filesystem::path resolve_out(const std::string& flag, const ExperimentSpec& spec) {
  if (!flag.empty()) return flag;
  if (!spec.output_dir.empty()) return spec.output_dir;
  return default_output_dir();
}

int report_outcome(const SeedOutcome& o, const std::filesystem::path& dir, double p_safe) {
  if (!o.error.empty()) std::cerr << o.method << ": " << o.error << '\n';
  std::cout << o.method << " seed " << o.seed << ": " << o.status;
  if (o.ok) {
    std::cout << std::setprecision(6) << ", max occupancy " << o.metrics.max_occupancy << ", length "
              << o.metrics.length << " m, samples " << o.metrics.samples;
  }
  std::cout << "\noutputs in " << dir.string() << '\n';
  if (!o.ok) return kExitInfeasible;
  if (o.status == "infeasible-boundary") return kExitInfeasible;
  if (o.status == "max-iters" && o.metrics.max_occupancy > p_safe) return kExitInfeasible;
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Stochastic functional-gradient path planning on occupancy maps"};
  app.require_subcommand(1);
  ExperimentSpec spec;
  Overrides ov;
  std::string config_file;
  std::string out;
  std::string map_file;
  std::string raster_file;
  double raster_resolution = 0.1;
  std::uint64_t seed = 1;
  std::string spec_file;

  CLI::App* train = app.add_subcommand("train-map", "train a Hilbert map from a world or CARMEN log");
  train->add_option("--config", config_file, "JSON overrides (experiment schema)");
  add_map_flags(train, ov, spec);
  train->add_option("--out", out, "map file (default $AKP_OUTPUT_DIR/map.json)");
  train->add_option("--raster", raster_file, "also write x,y,occupancy samples");
  train->add_option("--raster-resolution", raster_resolution, "raster spacing [m]");

  CLI::App* plan = app.add_subcommand("plan", "run the stochastic planner on a trained map");
  plan->add_option("--config", config_file, "JSON overrides (experiment schema)");
  plan->add_option("--map", map_file, "trained map file")->required();
  plan->add_option("--seed", seed, "sampling seed");
  plan->add_option("--out-dir", out, "output directory (default $AKP_OUTPUT_DIR)");
  add_endpoint_flags(plan, ov, spec);
  add_planner_flags(plan, ov, spec);

  CLI::App* rrt = app.add_subcommand("rrt", "run the RRT* baseline on a trained map");
  rrt->add_option("--config", config_file, "JSON overrides (experiment schema)");
  rrt->add_option("--map", map_file, "trained map file")->required();
  rrt->add_option("--seed", seed, "sampling seed");
  rrt->add_option("--out-dir", out, "output directory (default $AKP_OUTPUT_DIR)");
  add_endpoint_flags(rrt, ov, spec);
  add_rrt_flags(rrt, ov, spec);
  ov.option<double>(rrt, "--p-safe", "occupancy threshold", [&spec](double v) { spec.rrt.p_safe = v; });

  CLI::App* bench = app.add_subcommand("benchmark", "repeated-seed comparison from an experiment document");
  bench->add_option("spec", spec_file, "experiment JSON")->required();
  bench->add_option("--map", map_file, "reuse a trained map instead of training");
  bench->add_option("--out-dir", out, "output directory (default: document, then $AKP_OUTPUT_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) {
      layer(spec, config_file, ov);
      return cmd_train_map(spec, out, raster_file, raster_resolution);
    }
    if (plan->parsed() || rrt->parsed()) {
      layer(spec, config_file, ov);
      check_endpoints(spec);
      const HilbertMap map = load_map(map_file);
      const std::string method = plan->parsed() ? "stochastic" : "rrtstar";
      const std::filesystem::path dir = resolve_out(out, spec);
      const SeedOutcome o = run_method(spec, map, method, seed, dir);
      return report_outcome(o, dir, spec.planner.p_safe);
    }
    require_file(spec_file, "experiment document");
    try {
      spec = load_experiment(spec_file);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
    const HilbertMap map = map_file.empty() ? build_map(spec.world, spec.map).map : load_map(map_file);
    const std::filesystem::path dir = resolve_out(out, spec);
    const BenchmarkReport report = run_benchmark(spec, map, dir);
    write_json_file(dir / "map.json", to_json(map));
    std::cout << std::left << std::setw(15) << "metric" << std::setw(12) << "method" << "mean +- stderr (n)\n";
    for (const auto& r : report.summary) {
      std::cout << std::setw(15) << r.metric << std::setw(12) << r.method << std::setprecision(6) << r.mean << " +- "
                << r.standard_error << " (" << r.count << ")\n";
    }
    std::cout << "outputs in " << dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidEndpoint& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
