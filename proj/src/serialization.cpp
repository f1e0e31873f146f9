#include "akp/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "akp/error.hpp"

namespace akp {
namespace {

using nlohmann::json;

constexpr const char* kFeatureFormat = "akp-feature-map";
constexpr const char* kPathFormat = "akp-path";
constexpr const char* kMapFormat = "akp-hilbert-map";

json header(const char* format) { return json{{"format", format}, {"version", kDocumentVersion}}; }

void check_header(const json& doc, const char* format) {
  if (!doc.is_object() || !doc.contains("format") || doc.at("format") != format) {
    throw ParseError(std::string("document is not of format ") + format);
  }
  const int version = doc.at("version").get<int>();
  if (version < 1 || version > kDocumentVersion) {
    throw ParseError(std::string(format) + " version " + std::to_string(version) + " is not supported");
  }
}

// JSON has no infinity; the constant-feature limit is written as a string.
json encode_scale(double v) { return std::isinf(v) ? json("inf") : json(v); }
double decode_scale(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }
Eigen::VectorXd vector_from(const json& doc) {
  const auto values = doc.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json box_json(const Box& box) { return json{{"lo", vector_json(box.lo)}, {"hi", vector_json(box.hi)}}; }
Box box_from(const json& doc) { return Box{vector_from(doc.at("lo")), vector_from(doc.at("hi"))}; }

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json to_json(const Eigen::MatrixXd& matrix) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    const Eigen::VectorXd row = matrix.row(r).transpose();
    rows.push_back(vector_json(row));
  }
  return json{{"rows", matrix.rows()}, {"cols", matrix.cols()}, {"data", rows}};
}

Eigen::MatrixXd matrix_from_json(const json& doc) {
  return guarded("matrix", [&] {
    const auto rows = doc.at("rows").get<Eigen::Index>();
    const auto cols = doc.at("cols").get<Eigen::Index>();
    const json& data = doc.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows)) throw ParseError("matrix shape mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::VectorXd row = vector_from(data.at(r));
      if (row.size() != cols) throw ParseError("matrix row length mismatch");
      m.row(r) = row.transpose();
    }
    return m;
  });
}

json to_json(const FeatureMap& features) {
  json doc = header(kFeatureFormat);
  doc["kind"] = to_string(features.kind());
  doc["size"] = features.size();
  doc["lengthscale"] = encode_scale(features.lengthscale());
  doc["domain"] = box_json(features.domain());
  if (features.kind() == FeatureKind::kRff) {
    doc["seed"] = features.seed();
  } else {
    doc["jitter"] = features.jitter();
    doc["landmarks"] = to_json(features.landmarks());
  }
  return doc;
}

FeatureMap feature_map_from_json(const json& doc) {
  return guarded("feature map", [&] {
    check_header(doc, kFeatureFormat);
    const FeatureKind kind = feature_kind_from_string(doc.at("kind").get<std::string>());
    const double lengthscale = decode_scale(doc.at("lengthscale"));
    Box domain = box_from(doc.at("domain"));
    FeatureMap f = kind == FeatureKind::kRff
                       ? FeatureMap::rff(doc.at("size").get<int>(), lengthscale, doc.at("seed").get<std::uint64_t>(),
                                         std::move(domain))
                       : FeatureMap::nystrom(matrix_from_json(doc.at("landmarks")), lengthscale,
                                             doc.at("jitter").get<double>(), std::move(domain));
    if (f.size() != doc.at("size").get<int>()) throw ParseError("feature map size does not match its landmarks");
    return f;
  });
}

json to_json(const Path& path) {
  json doc = header(kPathFormat);
  doc["dim"] = path.dim();
  doc["features"] = to_json(path.features());
  doc["boundary_features"] = to_json(path.boundary_features());
  doc["weights"] = to_json(path.weights());
  doc["boundary_weights"] = to_json(path.boundary_weights());
  doc["offset"] = json{{"waypoints", to_json(path.offset().waypoints())}};
  const Metric& metric = path.metric();
  if (metric.kind() == Metric::Kind::kIdentity) {
    doc["metric"] = json{{"kind", "identity"}};
  } else {
    doc["metric"] = json{{"kind", "gram"}, {"grid_points", metric.grid_points()}, {"ridge", metric.ridge()}};
  }
  return doc;
}

Path path_from_json(const json& doc) {
  return guarded("path", [&] {
    check_header(doc, kPathFormat);
    Eigen::MatrixXd waypoints = matrix_from_json(doc.at("offset").at("waypoints"));
    OffsetPath offset = waypoints.cols() == 2 ? OffsetPath::straight(waypoints.col(0), waypoints.col(1))
                                              : OffsetPath::polyline(std::move(waypoints));
    Path path(feature_map_from_json(doc.at("features")), feature_map_from_json(doc.at("boundary_features")),
              std::move(offset));
    const Eigen::MatrixXd w = matrix_from_json(doc.at("weights"));
    const Eigen::MatrixXd wb = matrix_from_json(doc.at("boundary_weights"));
    if (w.rows() != path.weights().rows() || w.cols() != path.weights().cols() ||
        wb.rows() != path.boundary_weights().rows() || wb.cols() != path.boundary_weights().cols()) {
      throw ParseError("path weight shapes do not match the features");
    }
    path.weights() = w;
    path.boundary_weights() = wb;
    const json& metric = doc.at("metric");
    const std::string kind = metric.at("kind").get<std::string>();
    if (kind == "gram") {
      path.set_metric(
          Metric::gram(path.features(), metric.at("grid_points").get<int>(), metric.at("ridge").get<double>()));
    } else if (kind != "identity") {
      throw ParseError("unknown metric kind '" + kind + "'");
    }
    return path;
  });
}

json to_json(const HilbertMap& map) {
  json doc = header(kMapFormat);
  doc["features"] = to_json(map.features());
  doc["weights"] = vector_json(map.weights());
  doc["bias"] = map.bias();
  const TrainOptions& t = map.train_options();
  doc["train"] = json{{"epochs", t.epochs}, {"step", t.step}, {"l2", t.l2}, {"batch", t.batch}, {"seed", t.seed}};
  return doc;
}

HilbertMap hilbert_map_from_json(const json& doc) {
  return guarded("Hilbert map", [&] {
    check_header(doc, kMapFormat);
    FeatureMap features = feature_map_from_json(doc.at("features"));
    Eigen::VectorXd weights = vector_from(doc.at("weights"));
    if (weights.size() != features.size()) throw ParseError("map weight count does not match the features");
    const json& t = doc.at("train");
    TrainOptions train;
    train.epochs = t.at("epochs").get<int>();
    train.step = t.at("step").get<double>();
    train.l2 = t.at("l2").get<double>();
    train.batch = t.at("batch").get<int>();
    train.seed = t.at("seed").get<std::uint64_t>();
    return HilbertMap(std::move(features), std::move(weights), doc.at("bias").get<double>(), train);
  });
}

json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& file, const json& doc) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace akp
