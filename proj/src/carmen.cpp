#include "akp/carmen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "akp/error.hpp"

namespace akp {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t begin = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > begin) out.push_back(line.substr(begin, i - begin));
  }
  return out;
}

bool to_double(std::string_view tok, double& out) {
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

bool to_count(std::string_view tok, long& out) {
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fills `scan` or returns the reason the record is malformed.
std::string parse_flaser(const std::vector<std::string_view>& tok, const CarmenOptions& options, LaserScan& scan) {
  if (tok.size() < 2) return "missing beam count";
  long count = 0;
  if (!to_count(tok[1], count) || count < 0) return "bad beam count '" + std::string(tok[1]) + "'";
  // Guard against absurd counts before allocating.
  if (static_cast<std::size_t>(count) > tok.size()) return "beam count exceeds record length";
  const std::size_t n = static_cast<std::size_t>(count);
  if (tok.size() < n + 8) return "record too short for " + std::to_string(n) + " beams and pose";

  scan.ranges.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (!to_double(tok[2 + i], r)) return "bad range value at beam " + std::to_string(i);
    scan.ranges[i] = std::clamp(r, 0.0, options.max_range);
  }
  double v[6];
  for (int k = 0; k < 6; ++k) {
    if (!to_double(tok[2 + n + k], v[k])) return "bad pose field '" + std::string(tok[2 + n + k]) + "'";
  }
  const Pose2 laser{v[0], v[1], v[2]};
  const Pose2 odom{v[3], v[4], v[5]};
  scan.pose = options.use_odometry ? odom : laser;
  scan.odometry = odom;
  scan.fov = options.fov;
  scan.max_range = options.max_range;
  if (tok.size() > n + 8 && !to_double(tok[n + 8], scan.timestamp)) return "bad timestamp";
  if (tok.size() > n + 9) scan.host = std::string(tok[n + 9]);
  if (tok.size() > n + 10 && !to_double(tok[n + 10], scan.logger_timestamp)) return "bad logger timestamp";
  return {};
}

}  // namespace

CarmenLog parse_carmen(std::istream& in, const CarmenOptions& options) {
  if (!(options.max_range > 0.0) || !(options.fov >= 0.0)) throw InvalidArgument("CARMEN options are malformed");
  CarmenLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split(line);
    if (tok.empty() || tok[0] != "FLASER") {
      ++log.skipped_lines;
      continue;
    }
    LaserScan scan;
    std::string reason = parse_flaser(tok, options, scan);
    if (reason.empty()) {
      log.scans.push_back(std::move(scan));
    } else {
      log.malformed.push_back({lineno, std::move(reason)});
    }
  }
  if (log.scans.empty()) {
    std::string msg = "CARMEN log contains no parseable FLASER records";
    if (!log.malformed.empty()) {
      msg += " (" + std::to_string(log.malformed.size()) + " malformed, first at line " +
             std::to_string(log.malformed.front().line) + ": " + log.malformed.front().reason + ")";
    }
    throw ParseError(msg);
  }
  return log;
}

std::string format_flaser(const LaserScan& scan) {
  std::string out = "FLASER " + std::to_string(scan.ranges.size());
  for (double r : scan.ranges) out += ' ' + shortest(r);
  for (double v : {scan.pose.x, scan.pose.y, scan.pose.theta, scan.odometry.x, scan.odometry.y, scan.odometry.theta,
                   scan.timestamp}) {
    out += ' ' + shortest(v);
  }
  out += ' ' + (scan.host.empty() ? std::string("akp") : scan.host);
  out += ' ' + shortest(scan.logger_timestamp);
  return out;
}

void write_carmen(std::ostream& os, const std::vector<LaserScan>& scans) {
  os << "# CARMEN laser log\n";
  for (const auto& s : scans) os << format_flaser(s) << '\n';
}

}  // namespace akp
