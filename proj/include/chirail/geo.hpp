#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chirail/error.hpp"

namespace chirail {

inline constexpr double kEarthRadiusM = 6371000.0;

/// Degrees-based geographic coordinate, lat in [-90, 90], lon in [-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

bool is_valid(const GeoPoint& p);

/// Axis-aligned lat/lon box.
struct BoundingBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon &&
           p.lon <= max_lon;
  }
  double lat_span() const { return max_lat - min_lat; }
  double lon_span() const { return max_lon - min_lon; }
};

/// Local planar coordinate in meters east/north of a projection origin.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
  GeoPoint origin;
};

/// Named polyline of geographic vertices, length >= 2, consecutive vertices
/// distinct.
struct RailLine {
  std::string line_id;
  std::vector<GeoPoint> vertices;
};

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine(const GeoPoint& a, const GeoPoint& b);

/// Equirectangular projection. Only valid within a 2-degree window around the
/// origin; anything further throws (distortion is unbounded).
PlanarPoint project_local(const GeoPoint& p, const GeoPoint& origin);

/// Inverse of project_local.
GeoPoint unproject_local(const PlanarPoint& p);

struct PolylineDistance {
  double meters = 0.0;
  std::size_t segment_index = 0;
};

/// Minimum planar distance from p to any segment of the line, computed in the
/// local projection around origin. Ties resolve to the lower segment index.
PolylineDistance point_to_polyline_distance(const GeoPoint& p,
                                            const RailLine& line,
                                            const GeoPoint& origin);

/// Bearing of the first principal axis of the centered 2x2 covariance,
/// clockwise from north, in [0, 180). Throws if all points coincide.
double principal_bearing_deg(const std::vector<PlanarPoint>& points);

/// Eigenvalues (l1 >= l2 >= 0) of the centered 2x2 covariance of the points.
struct CovarianceAxes {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double bearing_deg = 0.0;  // axis of lambda1, clockwise from north, mod 180
};

CovarianceAxes covariance_axes(const std::vector<PlanarPoint>& points);

}  // namespace chirail
