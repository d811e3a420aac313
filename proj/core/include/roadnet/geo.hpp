#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace roadnet {

inline constexpr double kEarthRadiusKm = 6371.0;

/// WGS84 latitude/longitude in degrees.
struct GeoCoord {
  double lat = 0.0;
  double lon = 0.0;

  /// Builds a coordinate, throwing InputError when either component is
  /// non-finite or out of range.
  static GeoCoord checked(double lat, double lon);

  friend bool operator==(const GeoCoord&, const GeoCoord&) = default;
};

bool is_valid(const GeoCoord& c);

/// Kilometers east (x) and north (y) of a projection reference.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

double planar_distance(const PlanarPoint& a, const PlanarPoint& b);

/// A named polygon; the first ring is the outer boundary, the rest are holes.
/// Rings are stored closed (last vertex repeats the first).
class RegionPolygon {
public:
  RegionPolygon(std::string name, std::vector<std::vector<GeoCoord>> rings);

  const std::string& name() const { return name_; }
  const std::vector<std::vector<GeoCoord>>& rings() const { return rings_; }

private:
  std::string name_;
  std::vector<std::vector<GeoCoord>> rings_;
};

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoCoord& a, const GeoCoord& b);

/// Equirectangular projection about `ref`.
PlanarPoint project(const GeoCoord& p, const GeoCoord& ref);
std::vector<PlanarPoint> project(std::span<const GeoCoord> points, const GeoCoord& ref);
GeoCoord unproject(const PlanarPoint& p, const GeoCoord& ref);

/// Arithmetic mean of latitudes and longitudes. Throws InputError if empty.
GeoCoord centroid(std::span<const GeoCoord> points);

/// Even-odd containment over all rings, evaluated in lon/lat space.
/// Points on any edge or vertex count as inside.
bool point_in_polygon(const GeoCoord& p, const RegionPolygon& poly);

/// n×n symmetric matrix of great-circle distances, zero diagonal.
Eigen::MatrixXd pairwise_distances(std::span<const GeoCoord> points);

} // namespace roadnet
