#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "akp/world.hpp"

namespace akp {

struct CarmenOptions {
  double fov = 3.14159265358979323846;
  /// Readings at or above this value are max-range (no return).
  double max_range = 30.0;
  /// Use the raw odometry pose fields instead of the corrected laser pose.
  bool use_odometry = false;
};

struct MalformedLine {
  std::size_t line = 0;
  std::string reason;
};

struct CarmenLog {
  std::vector<LaserScan> scans;
  std::size_t skipped_lines = 0;
  std::vector<MalformedLine> malformed;
};

/// Streams a CARMEN log and keeps the FLASER records:
///
///   FLASER n r_1 ... r_n x y theta odom_x odom_y odom_theta ipc_timestamp host logger_timestamp
///
/// Other record types and comments are counted and skipped; malformed
/// FLASER lines are reported with their line numbers. Throws ParseError when
/// no scan could be read.
CarmenLog parse_carmen(std::istream& in, const CarmenOptions& options = {});

/// One FLASER record, numbers in shortest round-trip form.
std::string format_flaser(const LaserScan& scan);

void write_carmen(std::ostream& os, const std::vector<LaserScan>& scans);

}  // namespace akp
