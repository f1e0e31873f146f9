#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "akp/objective.hpp"
#include "akp/occupancy.hpp"
#include "akp/path.hpp"

namespace akp {

/// eta_n = eta0 / (1 + n / tau)^power. power in (0.5, 1] satisfies the
/// Robbins-Monro conditions (sum eta = inf, sum eta^2 < inf).
struct LearningRateSchedule {
  double eta0 = 0.01;
  double tau = 10.0;
  double power = 1.0;

  void validate() const;
};

double learning_rate(const LearningRateSchedule& schedule, long n);

struct ConvergenceOptions {
  /// Relative weight change |dW|_F / (|W|_F + |goal - start|) must stay below this.
  double weight_tolerance = 1e-3;
  int patience = 10;
  int dense_resolution = 500;
};

enum class BoundaryMode { kPerBatch, kPerSample };

struct PlannerConfig {
  double p_safe = 0.55;
  int batch = 20;
  double lambda = 1e-2;
  LearningRateSchedule schedule;
  int max_iters = 500;
  ConvergenceOptions convergence;
  std::uint64_t seed = 0;
  double boundary_tolerance = 1e-6;
  int boundary_max_sweeps = 10;
  BoundaryMode boundary_mode = BoundaryMode::kPerBatch;
  bool dyn_cost_relative_to_offset = false;
  /// Objective snapshot resolution per iteration; 0 disables snapshots.
  int objective_resolution = 0;
  /// Stalled warning when fewer than this fraction of samples is accepted
  /// over `stall_window` consecutive iterations.
  double stall_fraction = 0.01;
  int stall_window = 50;

  void validate() const;
};

enum class PlanStatus { kConverged, kMaxIters, kInfeasibleBoundary };

const char* to_string(PlanStatus status);

struct IterationRecord {
  int iteration = 0;
  double learning_rate = 0.0;
  std::vector<GradientSample> samples;
  int accepted = 0;
  double boundary_residual = 0.0;
  /// Maximum occupancy over the dense convergence sweep after the update.
  double max_occupancy = 0.0;
  double weight_change = 0.0;
  std::optional<ObjectiveValue> objective;
};

struct PlanRun {
  PlannerConfig config;
  std::vector<IterationRecord> iterations;
  long samples_drawn = 0;
  long samples_accepted = 0;
  PlanStatus status = PlanStatus::kMaxIters;
  std::vector<std::string> warnings;

  int iteration_count() const noexcept { return static_cast<int>(iterations.size()); }
};

struct PlanResult {
  Path path;
  PlanRun run;
};

/// Draws the occupancy and gradient terms of one sample against `path`.
GradientSample evaluate_sample(const Path& path, const HilbertMap& map, const BodyModel& body, double t,
                               std::size_t body_index, double p_safe);

/// W <- W - eta sum_accepted (g_obs + lambda g_dyn) (M^{-1} phi(t_i))^T.
/// Rejected samples contribute nothing and W_b is untouched. Throws
/// NumericalError (leaving the path unchanged) on a non-finite gradient.
void sgd_step(Path& path, std::span<const GradientSample> samples, double eta, double lambda);

/// Largest endpoint residual max(|xi(0) - start|, |xi(1) - goal|).
double boundary_residual(const Path& path, const Eigen::VectorXd& start, const Eigen::VectorXd& goal);

/// W_b <- W_b - dx_b (phi_b(t_b))^T at t_b = 0 and t_b = 1, repeated until
/// the residual is within `tolerance` or `max_sweeps` passes were made.
/// Returns the final residual.
double enforce_boundary(Path& path, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                        double tolerance = 1e-6, int max_sweeps = 10);

/// Maximum occupancy over `resolution` uniform times and all body points.
double max_occupancy(const Path& path, const HilbertMap& map, const BodyModel& body, int resolution);

/// Stochastic approximate-kernel functional gradient planner. The returned
/// path starts from a straight line between `start` and `goal` (or the given
/// offset) and is deterministic for a fixed seed.
PlanResult plan(const HilbertMap& map, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                const BodyModel& body, const FeatureMap& features, const PlannerConfig& config,
                const FeatureMap& boundary_features = default_boundary_features());

/// Same, continuing from a caller-built initial path.
PlanResult plan_from(const HilbertMap& map, Path initial, const Eigen::VectorXd& start, const Eigen::VectorXd& goal,
                     const BodyModel& body, const PlannerConfig& config);

}  // namespace akp
