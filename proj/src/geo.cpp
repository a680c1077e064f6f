#include "parkscan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace parkscan {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlam = (lon2 - lon1) * kDegToRad;

    const double sp = std::sin(dphi / 2.0);
    const double sl = std::sin(dlam / 2.0);
    double a = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    a = std::clamp(a, 0.0, 1.0);
    return kEarthRadiusM * 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

void Projection::to_xy(double lat, double lon, double& x, double& y) const {
    x = kEarthRadiusM * (lon - lon0) * kDegToRad * std::cos(lat0 * kDegToRad);
    y = kEarthRadiusM * (lat - lat0) * kDegToRad;
}

void Projection::to_latlon(double x, double y, double& lat, double& lon) const {
    lat = lat0 + y / (kEarthRadiusM * kDegToRad);
    lon = lon0 + x / (kEarthRadiusM * kDegToRad * std::cos(lat0 * kDegToRad));
}

Projection centroid_projection(const std::vector<TraceRecord>& traces) {
    Projection p;
    if (traces.empty()) return p;
    double slat = 0.0, slon = 0.0;
    for (const auto& t : traces) {
        slat += t.lat;
        slon += t.lon;
    }
    p.lat0 = slat / static_cast<double>(traces.size());
    p.lon0 = slon / static_cast<double>(traces.size());
    return p;
}

namespace {

// Treat (lon, lat) as (x, y) for the planar tests below.
bool on_segment(const LatLon& a, const LatLon& b, double lat, double lon) {
    const double cross =
        (b.lon - a.lon) * (lat - a.lat) - (b.lat - a.lat) * (lon - a.lon);
    if (cross != 0.0) return false;
    return lon >= std::min(a.lon, b.lon) && lon <= std::max(a.lon, b.lon) &&
           lat >= std::min(a.lat, b.lat) && lat <= std::max(a.lat, b.lat);
}

bool on_ring_edge(const std::vector<LatLon>& ring, double lat, double lon) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (on_segment(ring[i], ring[i + 1], lat, lon)) return true;
    }
    return false;
}

// Even-odd crossing parity for a ray toward +lon.
bool ring_parity(const std::vector<LatLon>& ring, double lat, double lon) {
    bool inside = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const LatLon& a = ring[i];
        const LatLon& b = ring[i + 1];
        if ((a.lat > lat) != (b.lat > lat)) {
            const double t = (lat - a.lat) / (b.lat - a.lat);
            const double xcross = a.lon + t * (b.lon - a.lon);
            if (xcross > lon) inside = !inside;
        }
    }
    return inside;
}

int orientation(const LatLon& a, const LatLon& b, const LatLon& c) {
    const double v =
        (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool segments_cross(const LatLon& p1, const LatLon& p2, const LatLon& q1,
                    const LatLon& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

bool polygon_contains(const BoundaryPolygon& poly, double lat, double lon) {
    if (on_ring_edge(poly.exterior, lat, lon)) return true;
    for (const auto& hole : poly.holes) {
        if (on_ring_edge(hole, lat, lon)) return true;
    }
    if (!ring_parity(poly.exterior, lat, lon)) return false;
    for (const auto& hole : poly.holes) {
        if (ring_parity(hole, lat, lon)) return false;
    }
    return true;
}

bool ring_valid(const std::vector<LatLon>& ring) {
    if (ring.size() < 4) return false;
    if (ring.front().lat != ring.back().lat || ring.front().lon != ring.back().lon)
        return false;
    std::vector<std::pair<double, double>> distinct;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        distinct.emplace_back(ring[i].lat, ring[i].lon);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) return false;
    // Non-adjacent edge pairs must not cross.
    const std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // shares the closing vertex
            if (segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1]))
                return false;
        }
    }
    return true;
}

bool polygon_valid(const BoundaryPolygon& poly) {
    if (!ring_valid(poly.exterior)) return false;
    for (const auto& hole : poly.holes) {
        if (!ring_valid(hole)) return false;
    }
    return true;
}

std::vector<std::size_t> convex_hull(const std::vector<double>& xs,
                                     const std::vector<double>& ys,
                                     const std::vector<std::size_t>& subset) {
    std::vector<std::size_t> pts = subset;
    std::sort(pts.begin(), pts.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        return ys[a] < ys[b];
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](std::size_t a, std::size_t b) {
                              return xs[a] == xs[b] && ys[a] == ys[b];
                          }),
              pts.end());
    if (pts.size() < 3) return pts;

    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (xs[a] - xs[o]) * (ys[b] - ys[o]) -
               (ys[a] - ys[o]) * (xs[b] - xs[o]);
    };
    std::vector<std::size_t> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace parkscan
