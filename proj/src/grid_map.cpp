#include "akp/grid_map.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "akp/error.hpp"

namespace akp {

GridMap::GridMap(Eigen::Vector2d origin, double resolution, Eigen::MatrixXd cells)
    : origin_(std::move(origin)), resolution_(resolution), cells_(std::move(cells)) {
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) throw InvalidArgument("grid resolution must be positive");
  if (cells_.size() == 0) throw InvalidArgument("grid map has no cells");
  if (!origin_.allFinite()) throw InvalidArgument("grid origin must be finite");
  if (!((cells_.array() >= 0.0) && (cells_.array() <= 1.0)).all()) {
    throw InvalidArgument("grid cells must be probabilities in [0,1]");
  }
}

bool GridMap::contains(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d rel = (x - origin_) / resolution_;
  return rel.x() >= 0.0 && rel.y() >= 0.0 && rel.x() <= cols() && rel.y() <= rows();
}

Eigen::Vector2d GridMap::cell_center(int row, int col) const {
  return origin_ + resolution_ * Eigen::Vector2d(col + 0.5, row + 0.5);
}

Eigen::Vector2d GridMap::sobel(int row, int col) const {
  auto at = [&](int r, int c) {
    return cells_(std::clamp(r, 0, rows() - 1), std::clamp(c, 0, cols() - 1));
  };
  const double gx = (at(row - 1, col + 1) + 2.0 * at(row, col + 1) + at(row + 1, col + 1)) -
                    (at(row - 1, col - 1) + 2.0 * at(row, col - 1) + at(row + 1, col - 1));
  const double gy = (at(row + 1, col - 1) + 2.0 * at(row + 1, col) + at(row + 1, col + 1)) -
                    (at(row - 1, col - 1) + 2.0 * at(row - 1, col) + at(row - 1, col + 1));
  return Eigen::Vector2d(gx, gy) / (8.0 * resolution_);
}

Eigen::Vector2d GridMap::gradient(const Eigen::Vector2d& x) const {
  if (!x.allFinite() || !contains(x)) throw DomainError("grid gradient query outside the map bounds");
  const Eigen::Vector2d f = (x - origin_) / resolution_ - Eigen::Vector2d(0.5, 0.5);
  const int c0 = std::clamp(static_cast<int>(std::floor(f.x())), 0, std::max(0, cols() - 2));
  const int r0 = std::clamp(static_cast<int>(std::floor(f.y())), 0, std::max(0, rows() - 2));
  const int c1 = std::min(c0 + 1, cols() - 1);
  const int r1 = std::min(r0 + 1, rows() - 1);
  const double ax = std::clamp(f.x() - c0, 0.0, 1.0);
  const double ay = std::clamp(f.y() - r0, 0.0, 1.0);
  return (1 - ay) * ((1 - ax) * sobel(r0, c0) + ax * sobel(r0, c1)) +
         ay * ((1 - ax) * sobel(r1, c0) + ax * sobel(r1, c1));
}

GridMap rasterize(const HilbertMap& map, const Eigen::Vector2d& origin, double resolution, int rows, int cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("raster needs at least one cell");
  if (map.workspace_dim() != 2) throw InvalidArgument("rasterize needs a 2-D map");
  Eigen::MatrixXd cells(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cells(r, c) = map.query(origin + resolution * Eigen::Vector2d(c + 0.5, r + 0.5));
    }
  }
  return GridMap(origin, resolution, std::move(cells));
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t begin = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (begin == pos) throw ParseError("truncated PGM header");
  return data.substr(begin, pos - begin);
}

int pgm_int(const std::string& data, std::size_t& pos) {
  const std::string tok = pgm_token(data, pos);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw ParseError("bad PGM integer '" + tok + "'");
  }
}

// Rows are returned top row first, as stored.
Eigen::MatrixXd read_pgm(const std::string& data, bool negate) {
  std::size_t pos = 0;
  const std::string magic = pgm_token(data, pos);
  if (magic != "P2" && magic != "P5") throw ParseError("not a PGM image");
  const int width = pgm_int(data, pos);
  const int height = pgm_int(data, pos);
  const int maxval = pgm_int(data, pos);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) throw ParseError("bad PGM dimensions");
  Eigen::MatrixXd pix(height, width);
  if (magic == "P2") {
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) pix(r, c) = pgm_int(data, pos);
    }
  } else {
    ++pos;  // single whitespace after maxval
    const int bytes = maxval < 256 ? 1 : 2;
    if (data.size() < pos + static_cast<std::size_t>(width) * height * bytes) throw ParseError("truncated PGM data");
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
        pix(r, c) = bytes == 1 ? p[0] : (p[0] << 8 | p[1]);
        pos += bytes;
      }
    }
  }
  pix /= maxval;
  if (!negate) pix = (1.0 - pix.array()).matrix();
  return pix;
}

Eigen::MatrixXd read_text_raster(const std::string& data) {
  std::istringstream in(data);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw ParseError("");
      } catch (const std::exception&) {
        throw ParseError("bad raster value '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty raster");
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw ParseError("ragged raster rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) out(r, c) = rows[r][c];
  }
  return out;
}

}  // namespace

GridMap load_grid_map(const std::filesystem::path& raster, const std::filesystem::path& sidecar) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(sidecar));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad grid sidecar " + sidecar.string() + ": " + e.what());
  }
  const std::string data = read_file(raster);
  Eigen::MatrixXd top_first;
  const bool negate = meta.value("negate", false);
  if (data.size() >= 2 && data[0] == 'P' && (data[1] == '2' || data[1] == '5')) {
    top_first = read_pgm(data, negate);
  } else {
    top_first = read_text_raster(data);
  }
  try {
    const auto origin = meta.at("origin").get<std::vector<double>>();
    if (origin.size() != 2) throw ParseError("grid origin must have two coordinates");
    return GridMap(Eigen::Vector2d(origin[0], origin[1]), meta.at("resolution").get<double>(),
                   top_first.colwise().reverse());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad grid sidecar " + sidecar.string() + ": " + e.what());
  }
}

std::optional<Eigen::MatrixXd> grid_shortest_path(const GridMap& grid, const Eigen::Vector2d& start,
                                                  const Eigen::Vector2d& goal, double threshold) {
  if (!start.allFinite() || !goal.allFinite() || !grid.contains(start) || !grid.contains(goal)) {
    throw DomainError("grid search endpoint outside the map bounds");
  }
  const int rows = grid.rows();
  const int cols = grid.cols();
  auto cell_of = [&](const Eigen::Vector2d& x) {
    const Eigen::Vector2d rel = (x - grid.origin()) / grid.resolution();
    const int c = std::clamp(static_cast<int>(std::floor(rel.x())), 0, cols - 1);
    const int r = std::clamp(static_cast<int>(std::floor(rel.y())), 0, rows - 1);
    return r * cols + c;
  };
  const int source = cell_of(start);
  const int target = cell_of(goal);
  const auto n = static_cast<std::size_t>(rows) * cols;
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<char> closed(n, 0);
  auto h = [&](int id) {
    const double dr = id / cols - target / cols;
    const double dc = id % cols - target % cols;
    return std::hypot(dr, dc);
  };
  // (f, id) with ties broken on the cell id for a deterministic expansion order.
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[source] = 0.0;
  open.emplace(h(source), source);
  while (!open.empty()) {
    const int id = open.top().second;
    open.pop();
    if (closed[id]) continue;
    closed[id] = 1;
    if (id == target) break;
    const int r = id / cols;
    const int c = id % cols;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
        const int nid = nr * cols + nc;
        if (closed[nid] || (nid != target && grid.cell(nr, nc) > threshold)) continue;
        // No corner cutting between two blocked cells.
        if (dr != 0 && dc != 0 && (grid.cell(r, nc) > threshold || grid.cell(nr, c) > threshold)) continue;
        const double cand = g[id] + ((dr != 0 && dc != 0) ? std::numbers::sqrt2 : 1.0);
        if (cand < g[nid]) {
          g[nid] = cand;
          parent[nid] = id;
          open.emplace(cand + h(nid), nid);
        }
      }
    }
  }
  if (!closed[target]) return std::nullopt;

  std::vector<int> chain;
  for (int id = target; id >= 0; id = parent[id]) chain.push_back(id);
  std::reverse(chain.begin(), chain.end());
  std::vector<Eigen::Vector2d> points{start};
  for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
    const int a = chain[k - 1], b = chain[k], c = chain[k + 1];
    if (b - a != c - b) points.push_back(grid.cell_center(b / cols, b % cols));
  }
  points.push_back(goal);
  Eigen::MatrixXd waypoints(2, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) waypoints.col(static_cast<Eigen::Index>(k)) = points[k];
  return waypoints;
}

}  // namespace akp
