#include "akp/planner.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "akp/error.hpp"

namespace akp {

void LearningRateSchedule::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InvalidArgument("schedule eta0 must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("schedule tau must be positive");
  if (!(power > 0.5 && power <= 1.0)) {
    throw InvalidArgument("schedule power must lie in (0.5, 1] (Robbins-Monro conditions)");
  }
}

double learning_rate(const LearningRateSchedule& schedule, long n) {
  if (n < 0) throw InvalidArgument("iteration index must be non-negative");
  return schedule.eta0 / std::pow(1.0 + static_cast<double>(n) / schedule.tau, schedule.power);
}

void PlannerConfig::validate() const {
  if (!(p_safe > 0.0 && p_safe < 1.0)) throw InvalidArgument("P_safe must lie in (0, 1)");
  if (batch < 1) throw InvalidArgument("batch must be at least 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  schedule.validate();
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(convergence.weight_tolerance > 0.0) || convergence.patience < 1 || convergence.dense_resolution < 2) {
    throw InvalidArgument("convergence options are malformed");
  }
  if (!(boundary_tolerance > 0.0) || boundary_max_sweeps < 1) throw InvalidArgument("boundary options are malformed");
  if (objective_resolution != 0 && objective_resolution < 2) {
    throw InvalidArgument("objective snapshot resolution must be 0 or at least 2");
  }
  if (!(stall_fraction >= 0.0) || stall_window < 1) throw InvalidArgument("stall detection options are malformed");
}

const char* to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::kConverged:
      return "converged";
    case PlanStatus::kMaxIters:
      return "max-iters";
    case PlanStatus::kInfeasibleBoundary:
      return "infeasible-boundary";
  }
  return "unknown";
}

GradientSample evaluate_sample(const Path& path, const HilbertMap& map, const BodyModel& body, double t,
                               std::size_t body_index, double p_safe) {
  GradientSample s;
  s.t = t;
  s.body_index = body_index;
  const Eigen::VectorXd x = body.workspace_point(path.eval(t), body_index);
  Eigen::VectorXd grad(x.size());
  s.occupancy = map.query_with_gradient(x, grad);
  s.accepted = s.occupancy <= p_safe;
  if (s.accepted) {
    // Rigid translation: J = I, so J^T grad_x c = grad_x c.
    s.obstacle_gradient = std::move(grad);
    s.dynamics_gradient = dynamics_gradient(path, t);
  }
  return s;
}

void sgd_step(Path& path, std::span<const GradientSample> samples, double eta, double lambda) {
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(path.weights().rows(), path.weights().cols());
  bool any = false;
  for (const auto& s : samples) {
    if (!s.accepted) continue;
    if (s.obstacle_gradient.size() != path.dim() || s.dynamics_gradient.size() != path.dim()) {
      throw InvalidArgument("accepted sample lacks gradient terms");
    }
    const Eigen::VectorXd g = s.obstacle_gradient + lambda * s.dynamics_gradient;
    if (!g.allFinite()) {
      std::ostringstream os;
      os << "non-finite functional gradient at t = " << s.t;
      throw NumericalError(os.str());
    }
    delta.noalias() += g * path.metric().solve(path.features().eval_time(s.t)).transpose();
    any = true;
  }
  if (!any || eta == 0.0) return;
  path.weights() -= eta * delta;
}

double boundary_residual(const Path& path, const Eigen::VectorXd& start, const Eigen::VectorXd& goal) {
  return std::max((path.eval(0.0) - start).norm(), (path.eval(1.0) - goal).norm());
}

double enforce_boundary(Path& path, const Eigen::VectorXd& start, const Eigen::VectorXd& goal, double tolerance,
                        int max_sweeps) {
  const Eigen::VectorXd phi0 = path.boundary_features().eval_time(0.0);
  const Eigen::VectorXd phi1 = path.boundary_features().eval_time(1.0);
  double residual = boundary_residual(path, start, goal);
  for (int sweep = 0; sweep < max_sweeps && residual > tolerance; ++sweep) {
    path.boundary_weights() -= (path.eval(0.0) - start) * phi0.transpose();
    path.boundary_weights() -= (path.eval(1.0) - goal) * phi1.transpose();
    residual = boundary_residual(path, start, goal);
    if (!std::isfinite(residual)) break;
  }
  return residual;
}

double max_occupancy(const Path& path, const HilbertMap& map, const BodyModel& body, int resolution) {
  if (resolution < 2) throw InvalidArgument("occupancy sweep needs at least two samples");
  double best = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const Eigen::VectorXd x = path.eval(static_cast<double>(i) / (resolution - 1));
    for (std::size_t b = 0; b < body.size(); ++b) best = std::max(best, map.query(body.workspace_point(x, b)));
  }
  return best;
}

namespace {

void check_endpoint(const HilbertMap& map, const BodyModel& body, const Eigen::VectorXd& q, double p_safe,
                    const char* which) {
  if (q.size() != map.workspace_dim() || !q.allFinite()) {
    throw InvalidEndpoint(std::string(which) + " configuration has the wrong dimension or is not finite");
  }
  for (std::size_t b = 0; b < body.size(); ++b) {
    const Eigen::VectorXd x = body.workspace_point(q, b);
    if (!map.domain().contains(x)) throw InvalidEndpoint(std::string(which) + " lies outside the map domain");
    const double p = map.query(x);
    if (p > p_safe) {
      std::ostringstream os;
      os << which << " is occupied (p = " << p << " > P_safe = " << p_safe << ")";
      throw InvalidEndpoint(os.str());
    }
  }
}

}  // namespace

PlanResult plan(const HilbertMap& map, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                const BodyModel& body, const FeatureMap& features, const PlannerConfig& config,
                const FeatureMap& boundary_features) {
  return plan_from(map, Path::straight_line(start, goal, features, boundary_features), start, goal, body, config);
}

PlanResult plan_from(const HilbertMap& map, Path path, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                     const BodyModel& body, const PlannerConfig& config) {
  config.validate();
  body.validate(path.dim());
  if (path.dim() != map.workspace_dim()) throw InvalidArgument("path and map dimensions differ");
  check_endpoint(map, body, start, config.p_safe, "start");
  check_endpoint(map, body, goal, config.p_safe, "goal");

  PlanRun run;
  run.config = config;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> draw_t(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> draw_u(0, body.size() - 1);
  const double scale = (goal - start).norm();

  if (enforce_boundary(path, start, goal, config.boundary_tolerance, config.boundary_max_sweeps) >
      config.boundary_tolerance) {
    run.status = PlanStatus::kInfeasibleBoundary;
    return {std::move(path), std::move(run)};
  }

  int streak = 0;
  long window_drawn = 0;
  long window_accepted = 0;
  bool stall_reported = false;
  for (int n = 0; n < config.max_iters; ++n) {
    IterationRecord rec;
    rec.iteration = n;
    rec.learning_rate = learning_rate(config.schedule, n);
    const Eigen::MatrixXd before = path.weights();
    double residual = 0.0;

    rec.samples.reserve(static_cast<std::size_t>(config.batch));
    if (config.boundary_mode == BoundaryMode::kPerBatch) {
      for (int k = 0; k < config.batch; ++k) {
        const double t = draw_t(rng);
        const std::size_t u = draw_u(rng);
        rec.samples.push_back(evaluate_sample(path, map, body, t, u, config.p_safe));
      }
      sgd_step(path, rec.samples, rec.learning_rate, config.lambda);
      residual = enforce_boundary(path, start, goal, config.boundary_tolerance, config.boundary_max_sweeps);
    } else {
      for (int k = 0; k < config.batch; ++k) {
        const double t = draw_t(rng);
        const std::size_t u = draw_u(rng);
        rec.samples.push_back(evaluate_sample(path, map, body, t, u, config.p_safe));
        sgd_step(path, std::span(&rec.samples.back(), 1), rec.learning_rate, config.lambda);
        residual = std::max(residual, enforce_boundary(path, start, goal, config.boundary_tolerance,
                                                       config.boundary_max_sweeps));
      }
    }
    for (const auto& s : rec.samples) rec.accepted += s.accepted ? 1 : 0;
    rec.boundary_residual = residual;
    rec.max_occupancy = max_occupancy(path, map, body, config.convergence.dense_resolution);
    rec.weight_change = (path.weights() - before).norm() / (path.weights().norm() + scale);
    if (config.objective_resolution > 0) {
      rec.objective = evaluate_objective(path, map, body, config.lambda, config.objective_resolution,
                                         config.dyn_cost_relative_to_offset);
    }

    run.samples_drawn += static_cast<long>(rec.samples.size());
    run.samples_accepted += rec.accepted;
    window_drawn += static_cast<long>(rec.samples.size());
    window_accepted += rec.accepted;
    if (n >= config.stall_window) {
      const auto& old = run.iterations[static_cast<std::size_t>(n - config.stall_window)];
      window_drawn -= static_cast<long>(old.samples.size());
      window_accepted -= old.accepted;
    }
    if (!stall_reported && n + 1 >= config.stall_window &&
        static_cast<double>(window_accepted) < config.stall_fraction * static_cast<double>(window_drawn)) {
      run.warnings.push_back("stalled: fewer than " + std::to_string(config.stall_fraction * 100.0) +
                             "% of samples accepted over " + std::to_string(config.stall_window) +
                             " iterations ending at " + std::to_string(n));
      stall_reported = true;
    }

    const bool infeasible = !(residual <= config.boundary_tolerance);
    const bool settled =
        rec.max_occupancy <= config.p_safe && rec.weight_change < config.convergence.weight_tolerance;
    run.iterations.push_back(std::move(rec));
    if (infeasible) {
      run.status = PlanStatus::kInfeasibleBoundary;
      break;
    }
    streak = settled ? streak + 1 : 0;
    if (streak >= config.convergence.patience) {
      run.status = PlanStatus::kConverged;
      break;
    }
  }
  return {std::move(path), std::move(run)};
}

}  // namespace akp
