#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parkscan/geo.hpp"
#include "parkscan/hdbscan.hpp"

using namespace parkscan;

TEST_CASE("haversine is zero iff endpoints coincide") {
    CHECK(haversine_m(40.78, -73.96, 40.78, -73.96) == 0.0);
    CHECK(haversine_m(0.0, 0.0, 0.0, 0.0) == 0.0);
    CHECK(haversine_m(40.78, -73.96, 40.781, -73.96) > 0.0);
}

TEST_CASE("haversine matches the analytic meridian arc") {
    // arc = R * dphi for a pure latitude change
    const double expected = kEarthRadiusM * 0.001 * std::numbers::pi / 180.0;
    CHECK(haversine_m(0.0, 0.0, 0.001, 0.0) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(haversine_m(0.0, 0.0, 0.001, 0.0) == doctest::Approx(111.195).epsilon(0.0001));
}

TEST_CASE("haversine symmetry over random pairs") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-180.0, 180.0);
    for (int i = 0; i < 1000; ++i) {
        const double a1 = lat(gen), o1 = lon(gen), a2 = lat(gen), o2 = lon(gen);
        CHECK(haversine_m(a1, o1, a2, o2) == haversine_m(a2, o2, a1, o1));
    }
}

TEST_CASE("projection maps the origin to (0,0) and the meridian to y") {
    Projection p{40.78, -73.96};
    double x, y;
    p.to_xy(40.78, -73.96, x, y);
    CHECK(x == 0.0);
    CHECK(y == 0.0);
    p.to_xy(40.781, -73.96, x, y);
    CHECK(x == 0.0);
    CHECK(y == doctest::Approx(111.195).epsilon(0.0001));

    double lat, lon;
    p.to_latlon(x, y, lat, lon);
    CHECK(lat == doctest::Approx(40.781).epsilon(1e-12));
    CHECK(lon == doctest::Approx(-73.96).epsilon(1e-12));
}

TEST_CASE("projected distances agree with haversine within 0.5% up to 5 km") {
    Projection p{40.78, -73.96};
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> dlat(-0.022, 0.022), dlon(-0.03, 0.03);
    for (int i = 0; i < 500; ++i) {
        const double a1 = 40.78 + dlat(gen), o1 = -73.96 + dlon(gen);
        const double a2 = 40.78 + dlat(gen), o2 = -73.96 + dlon(gen);
        const double hv = haversine_m(a1, o1, a2, o2);
        if (hv > 5000.0 || hv < 1.0) continue;
        double x1, y1, x2, y2;
        p.to_xy(a1, o1, x1, y1);
        p.to_xy(a2, o2, x2, y2);
        const double eu = std::hypot(x2 - x1, y2 - y1);
        CHECK(std::abs(eu - hv) / hv < 0.005);
    }
}

TEST_CASE("point-in-polygon on the unit square") {
    BoundaryPolygon sq;
    sq.exterior = {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}};
    CHECK(polygon_contains(sq, 0.5, 0.5));
    CHECK_FALSE(polygon_contains(sq, 1.5, 0.5));
    CHECK_FALSE(polygon_contains(sq, 0.5, 2.0));
    // edge and corner points are kept
    CHECK(polygon_contains(sq, 0.0, 0.5));
    CHECK(polygon_contains(sq, 1.0, 1.0));
    CHECK(polygon_contains(sq, 0.5, 1.0));
}

TEST_CASE("holes exclude interior but keep their edges") {
    BoundaryPolygon p;
    p.exterior = {{0, 0}, {0, 10}, {10, 10}, {10, 0}, {0, 0}};
    p.holes = {{{4, 4}, {4, 6}, {6, 6}, {6, 4}, {4, 4}}};
    CHECK(polygon_contains(p, 1.0, 1.0));
    CHECK_FALSE(polygon_contains(p, 5.0, 5.0));
    CHECK(polygon_contains(p, 4.0, 5.0));  // hole edge
}

TEST_CASE("ring validation") {
    CHECK(ring_valid({{0, 0}, {0, 1}, {1, 1}, {0, 0}}));
    CHECK_FALSE(ring_valid({{0, 0}, {0, 1}, {1, 1}}));        // not closed
    CHECK_FALSE(ring_valid({{0, 0}, {0, 1}, {0, 0}}));        // 2 distinct
    CHECK_FALSE(ring_valid({{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}));  // bowtie
}

TEST_CASE("convex hull of a square plus interior points") {
    std::vector<double> xs = {0, 0, 2, 2, 1, 1.2};
    std::vector<double> ys = {0, 2, 2, 0, 1, 0.7};
    const auto hull = convex_hull(xs, ys, {0, 1, 2, 3, 4, 5});
    CHECK(hull.size() == 4);
    for (const auto h : hull) CHECK(h < 4);  // interior points excluded
}
