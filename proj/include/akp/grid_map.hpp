#pragma once

#include <filesystem>
#include <optional>

#include <Eigen/Core>

#include "akp/occupancy.hpp"

namespace akp {

/// Occupancy grid. Row index grows with y and column index with x; cell
/// (r, c) covers [origin + (c, r) * resolution, origin + (c + 1, r + 1) * resolution).
class GridMap {
 public:
  GridMap(Eigen::Vector2d origin, double resolution, Eigen::MatrixXd cells);

  const Eigen::Vector2d& origin() const noexcept { return origin_; }
  double resolution() const noexcept { return resolution_; }
  int rows() const noexcept { return static_cast<int>(cells_.rows()); }
  int cols() const noexcept { return static_cast<int>(cells_.cols()); }
  const Eigen::MatrixXd& cells() const noexcept { return cells_; }
  double cell(int row, int col) const { return cells_(row, col); }

  bool contains(const Eigen::Vector2d& x) const;
  Eigen::Vector2d cell_center(int row, int col) const;

  /// Sobel 3x3 response at one cell (edges replicated), scaled by
  /// 1 / (8 resolution) so that a linear ramp reproduces its slope.
  Eigen::Vector2d sobel(int row, int col) const;

  /// Sobel responses bilinearly interpolated between cell centers.
  /// Throws DomainError outside the grid.
  Eigen::Vector2d gradient(const Eigen::Vector2d& x) const;

 private:
  Eigen::Vector2d origin_;
  double resolution_;
  Eigen::MatrixXd cells_;
};

/// Samples a 2-D Hilbert map at the cell centers of a grid.
GridMap rasterize(const HilbertMap& map, const Eigen::Vector2d& origin, double resolution, int rows, int cols);

/// Loads a raster plus a JSON sidecar {"origin": [x, y], "resolution": r,
/// "negate": bool}. Rasters are either plain-text probability matrices or
/// PGM (P2/P5) images; both list the top (highest y) row first. PGM pixels
/// map to occupancy 1 - v / maxval (dark is occupied) unless negated.
GridMap load_grid_map(const std::filesystem::path& raster, const std::filesystem::path& sidecar);

/// 8-connected A* over cells with occupancy <= `threshold`, from the cell
/// containing `start` to the cell containing `goal`. Returns 2 x K
/// waypoints (start, turning-point cell centers, goal), or nullopt when the
/// goal is unreachable. Throws DomainError for endpoints outside the grid.
std::optional<Eigen::MatrixXd> grid_shortest_path(const GridMap& grid, const Eigen::Vector2d& start,
                                                  const Eigen::Vector2d& goal, double threshold);

}  // namespace akp
