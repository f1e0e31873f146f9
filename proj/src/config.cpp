#include "akp/config.hpp"

#include <string>

#include "akp/error.hpp"
#include "json_fields.hpp"

namespace akp {
namespace {

using nlohmann::json;
using detail::Fields;

BoundaryMode boundary_mode_from(const std::string& name) {
  if (name == "per-batch") return BoundaryMode::kPerBatch;
  if (name == "per-sample") return BoundaryMode::kPerSample;
  throw InvalidArgument("unknown boundary mode '" + name + "'");
}

}  // namespace

const char* to_string(BoundaryMode mode) { return mode == BoundaryMode::kPerBatch ? "per-batch" : "per-sample"; }

json to_json(const LearningRateSchedule& s) { return json{{"eta0", s.eta0}, {"tau", s.tau}, {"power", s.power}}; }

json to_json(const PlannerConfig& c) {
  return json{
      {"p_safe", c.p_safe},
      {"batch", c.batch},
      {"lambda", c.lambda},
      {"schedule", to_json(c.schedule)},
      {"max_iters", c.max_iters},
      {"convergence",
       {{"weight_tolerance", c.convergence.weight_tolerance},
        {"patience", c.convergence.patience},
        {"dense_resolution", c.convergence.dense_resolution}}},
      {"seed", c.seed},
      {"boundary_tolerance", c.boundary_tolerance},
      {"boundary_max_sweeps", c.boundary_max_sweeps},
      {"boundary_mode", to_string(c.boundary_mode)},
      {"dyn_cost_relative_to_offset", c.dyn_cost_relative_to_offset},
      {"objective_resolution", c.objective_resolution},
      {"stall_fraction", c.stall_fraction},
      {"stall_window", c.stall_window},
  };
}

void merge(PlannerConfig& c, const json& doc) {
  Fields f(doc, "planner");
  f.read("p_safe", c.p_safe);
  f.read("batch", c.batch);
  f.read("lambda", c.lambda);
  if (const json* s = f.object("schedule")) {
    Fields fs(*s, "planner.schedule");
    fs.read("eta0", c.schedule.eta0);
    fs.read("tau", c.schedule.tau);
    fs.read("power", c.schedule.power);
    fs.finish();
  }
  f.read("max_iters", c.max_iters);
  if (const json* s = f.object("convergence")) {
    Fields fc(*s, "planner.convergence");
    fc.read("weight_tolerance", c.convergence.weight_tolerance);
    fc.read("patience", c.convergence.patience);
    fc.read("dense_resolution", c.convergence.dense_resolution);
    fc.finish();
  }
  f.read("seed", c.seed);
  f.read("boundary_tolerance", c.boundary_tolerance);
  f.read("boundary_max_sweeps", c.boundary_max_sweeps);
  std::string mode = to_string(c.boundary_mode);
  f.read("boundary_mode", mode);
  c.boundary_mode = boundary_mode_from(mode);
  f.read("dyn_cost_relative_to_offset", c.dyn_cost_relative_to_offset);
  f.read("objective_resolution", c.objective_resolution);
  f.read("stall_fraction", c.stall_fraction);
  f.read("stall_window", c.stall_window);
  f.finish();
  c.validate();
}

json to_json(const RrtConfig& c) {
  return json{{"max_samples", c.max_samples},
              {"steer_step", c.steer_step},
              {"neighbor_radius_gamma", c.neighbor_radius_gamma},
              {"collision_resolution", c.collision_resolution},
              {"p_safe", c.p_safe},
              {"goal_bias", c.goal_bias},
              {"seed", c.seed},
              {"stall_samples", c.stall_samples},
              {"stall_improvement", c.stall_improvement}};
}

void merge(RrtConfig& c, const json& doc) {
  Fields f(doc, "rrt");
  f.read("max_samples", c.max_samples);
  f.read("steer_step", c.steer_step);
  f.read("neighbor_radius_gamma", c.neighbor_radius_gamma);
  f.read("collision_resolution", c.collision_resolution);
  f.read("p_safe", c.p_safe);
  f.read("goal_bias", c.goal_bias);
  f.read("seed", c.seed);
  f.read("stall_samples", c.stall_samples);
  f.read("stall_improvement", c.stall_improvement);
  f.finish();
  c.validate();
}

json to_json(const TrainOptions& o) {
  return json{{"epochs", o.epochs}, {"step", o.step}, {"l2", o.l2}, {"batch", o.batch}, {"seed", o.seed}};
}

void merge(TrainOptions& o, const json& doc) {
  Fields f(doc, "train");
  f.read("epochs", o.epochs);
  f.read("step", o.step);
  f.read("l2", o.l2);
  f.read("batch", o.batch);
  f.read("seed", o.seed);
  f.finish();
  if (o.epochs < 1 || !(o.step > 0.0) || !(o.l2 >= 0.0) || o.batch < 1) {
    throw InvalidArgument("map training options are out of range");
  }
}

json to_json(const CarmenOptions& o) {
  return json{{"fov", o.fov}, {"max_range", o.max_range}, {"use_odometry", o.use_odometry}};
}

void merge(CarmenOptions& o, const json& doc) {
  Fields f(doc, "carmen");
  f.read("fov", o.fov);
  f.read("max_range", o.max_range);
  f.read("use_odometry", o.use_odometry);
  f.finish();
  if (!(o.fov > 0.0) || !(o.max_range > 0.0)) throw InvalidArgument("CARMEN fov and max_range must be positive");
}

}  // namespace akp
