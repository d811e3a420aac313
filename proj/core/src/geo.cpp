#include "roadnet/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kEdgeTolerance = 1e-12;

double wrap_degrees(double d) {
  while (d > 180.0) d -= 360.0;
  while (d < -180.0) d += 360.0;
  return d;
}

bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  const double scale = std::max({1.0, std::abs(bx - ax), std::abs(by - ay)});
  if (std::abs(cross) > kEdgeTolerance * scale) return false;
  return px >= std::min(ax, bx) - kEdgeTolerance && px <= std::max(ax, bx) + kEdgeTolerance &&
         py >= std::min(ay, by) - kEdgeTolerance && py <= std::max(ay, by) + kEdgeTolerance;
}

} // namespace

bool is_valid(const GeoCoord& c) {
  return std::isfinite(c.lat) && std::isfinite(c.lon) && c.lat >= -90.0 && c.lat <= 90.0 &&
         c.lon >= -180.0 && c.lon <= 180.0;
}

GeoCoord GeoCoord::checked(double lat, double lon) {
  GeoCoord c{lat, lon};
  if (!is_valid(c)) {
    throw InputError("coordinate out of bounds: lat=" + std::to_string(lat) +
                     " lon=" + std::to_string(lon));
  }
  return c;
}

double planar_distance(const PlanarPoint& a, const PlanarPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

RegionPolygon::RegionPolygon(std::string name, std::vector<std::vector<GeoCoord>> rings)
    : name_(std::move(name)), rings_(std::move(rings)) {
  if (rings_.empty()) throw InputError("region '" + name_ + "' has no rings");
  for (auto& ring : rings_) {
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    if (ring.size() < 3) {
      throw InputError("region '" + name_ + "' has a ring with fewer than 3 vertices");
    }
    for (const auto& v : ring) {
      if (!is_valid(v)) throw InputError("region '" + name_ + "' has an invalid vertex");
    }
    ring.push_back(ring.front());
  }
}

double haversine_km(const GeoCoord& a, const GeoCoord& b) {
  // Absolute differences make the result bitwise symmetric in (a, b).
  const double dlat = std::abs(a.lat - b.lat) * kDegToRad;
  const double dlon = std::abs(a.lon - b.lon) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h =
      s_lat * s_lat + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s_lon * s_lon;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

PlanarPoint project(const GeoCoord& p, const GeoCoord& ref) {
  const double dlon = wrap_degrees(p.lon - ref.lon) * kDegToRad;
  const double dlat = (p.lat - ref.lat) * kDegToRad;
  return {kEarthRadiusKm * dlon * std::cos(ref.lat * kDegToRad), kEarthRadiusKm * dlat};
}

std::vector<PlanarPoint> project(std::span<const GeoCoord> points, const GeoCoord& ref) {
  std::vector<PlanarPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(project(p, ref));
  return out;
}

GeoCoord unproject(const PlanarPoint& p, const GeoCoord& ref) {
  const double lat = ref.lat + p.y / kEarthRadiusKm / kDegToRad;
  const double lon = ref.lon + p.x / (kEarthRadiusKm * std::cos(ref.lat * kDegToRad)) / kDegToRad;
  return {lat, wrap_degrees(lon)};
}

GeoCoord centroid(std::span<const GeoCoord> points) {
  if (points.empty()) throw InputError("centroid of an empty point set");
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& p : points) {
    lat += p.lat;
    lon += p.lon;
  }
  const auto n = static_cast<double>(points.size());
  return {lat / n, lon / n};
}

bool point_in_polygon(const GeoCoord& p, const RegionPolygon& poly) {
  const double px = p.lon;
  const double py = p.lat;
  bool inside = false;
  for (const auto& ring : poly.rings()) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const double xi = ring[i].lon, yi = ring[i].lat;
      const double xj = ring[j].lon, yj = ring[j].lat;
      if (on_segment(px, py, xi, yi, xj, yj)) return true;
      if ((yi > py) != (yj > py)) {
        const double x_cross = xj + (py - yj) * (xi - xj) / (yi - yj);
        if (px < x_cross) inside = !inside;
      }
    }
  }
  return inside;
}

Eigen::MatrixXd pairwise_distances(std::span<const GeoCoord> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = haversine_km(points[static_cast<std::size_t>(i)],
                                    points[static_cast<std::size_t>(j)]);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

} // namespace roadnet
