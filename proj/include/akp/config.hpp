#pragma once

#include <nlohmann/json.hpp>

#include "akp/carmen.hpp"
#include "akp/occupancy.hpp"
#include "akp/planner.hpp"
#include "akp/rrt_star.hpp"

namespace akp {

// JSON views of the configuration structs. `merge` overrides only the keys
// present in the document and throws InvalidArgument on unknown keys or
// wrongly typed values, then validates the result.

nlohmann::json to_json(const LearningRateSchedule& schedule);
nlohmann::json to_json(const PlannerConfig& config);
nlohmann::json to_json(const RrtConfig& config);
nlohmann::json to_json(const TrainOptions& options);
nlohmann::json to_json(const CarmenOptions& options);

void merge(PlannerConfig& config, const nlohmann::json& doc);
void merge(RrtConfig& config, const nlohmann::json& doc);
void merge(TrainOptions& options, const nlohmann::json& doc);
void merge(CarmenOptions& options, const nlohmann::json& doc);

const char* to_string(BoundaryMode mode);

}  // namespace akp
