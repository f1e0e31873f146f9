#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "akp/features.hpp"
#include "akp/occupancy.hpp"
#include "akp/path.hpp"

namespace akp {

/// Documents carry a `format` tag and an integer `version`; readers reject
/// other formats and newer versions. Doubles are written in shortest
/// round-trip form, so save/load is bit-exact.
inline constexpr int kDocumentVersion = 1;

/// Feature maps are stored by their construction parameters and rebuilt on
/// load, which reproduces frequencies, phases and Gram factors exactly.
nlohmann::json to_json(const FeatureMap& features);
FeatureMap feature_map_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Path& path);
Path path_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const HilbertMap& map);
HilbertMap hilbert_map_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Eigen::MatrixXd& matrix);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc);

/// Reads a JSON file; IoError if unreadable, ParseError if malformed.
nlohmann::json read_json_file(const std::filesystem::path& file);
/// Writes `doc` with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& file, const nlohmann::json& doc);

}  // namespace akp
