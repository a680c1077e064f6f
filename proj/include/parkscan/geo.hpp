#pragma once

#include <cstddef>
#include <vector>

#include "parkscan/types.hpp"

namespace parkscan {

inline constexpr double kEarthRadiusM = 6371008.8;

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

/// Local equirectangular projection about a reference origin.
/// x = R * (lon - lon0) * cos(lat0), y = R * (lat - lat0), angles in radians.
struct Projection {
    double lat0 = 0.0;  // degrees
    double lon0 = 0.0;  // degrees

    void to_xy(double lat, double lon, double& x, double& y) const;
    void to_latlon(double x, double y, double& lat, double& lon) const;
};

/// Projection centered on the arithmetic centroid of the input coordinates.
Projection centroid_projection(const std::vector<TraceRecord>& traces);

/// Even-odd point-in-polygon with edge-inclusive semantics: points exactly
/// on any ring edge are inside.
bool polygon_contains(const BoundaryPolygon& poly, double lat, double lon);

/// Ring validity: >= 3 distinct vertices, closed, non-self-intersecting.
bool ring_valid(const std::vector<LatLon>& ring);
bool polygon_valid(const BoundaryPolygon& poly);

/// Andrew monotone chain; returns hull vertices in counter-clockwise order.
std::vector<std::size_t> convex_hull(const std::vector<double>& xs,
                                     const std::vector<double>& ys,
                                     const std::vector<std::size_t>& subset);

}  // namespace parkscan
