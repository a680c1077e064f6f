#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "parkscan/trips.hpp"

using namespace parkscan;

namespace {

TraceRecord ping(const std::string& user, std::int64_t ts, double lat = 0.0,
                 double lon = 0.0, double acc = 10.0) {
    TraceRecord t;
    t.user_id = user;
    t.timestamp = ts;
    t.lat = lat;
    t.lon = lon;
    t.accuracy = acc;
    t.app_id = "app";
    return t;
}

}  // namespace

TEST_CASE("single point makes a single-point trip of duration zero") {
    const auto trips = segment_trips({ping("u1", 100)});
    REQUIRE(trips.size() == 1);
    CHECK(trips[0].points.size() == 1);
    CHECK(trip_duration(trips[0]) == 0);
}

TEST_CASE("gaps under the threshold stay in one trip") {
    const auto trips = segment_trips({ping("u1", 1), ping("u1", 601), ping("u1", 1501)});
    REQUIRE(trips.size() == 1);
    CHECK(trip_duration(trips[0]) == 1500);
}

TEST_CASE("a gap at or above the threshold splits") {
    const auto trips = segment_trips({ping("u1", 1), ping("u1", 601), ping("u1", 2101)});
    REQUIRE(trips.size() == 2);
    CHECK(trips[0].points.size() == 2);
    CHECK(trips[1].points.size() == 1);
    CHECK(trips[0].trip_index == 0);
    CHECK(trips[1].trip_index == 1);

    // exactly 1200 s splits too
    const auto edge = segment_trips({ping("u1", 100), ping("u1", 1300)});
    CHECK(edge.size() == 2);
    const auto inside = segment_trips({ping("u1", 100), ping("u1", 1299)});
    CHECK(inside.size() == 1);
}

TEST_CASE("unsorted input is sorted per user") {
    const auto trips = segment_trips({ping("u1", 900), ping("u1", 100), ping("u1", 500)});
    REQUIRE(trips.size() == 1);
    CHECK(trips[0].points[0].timestamp == 100);
    CHECK(trips[0].points[2].timestamp == 900);
}

TEST_CASE("duplicate timestamps collapse to the most precise fix") {
    auto a = ping("u1", 100, 1.0, 1.0, 30.0);
    auto b = ping("u1", 100, 2.0, 2.0, 5.0);
    auto c = ping("u1", 100, 3.0, 3.0, 5.0);  // tie with b, b first seen
    const auto trips = segment_trips({a, b, c});
    REQUIRE(trips.size() == 1);
    REQUIRE(trips[0].points.size() == 1);
    CHECK(trips[0].points[0].lat == 2.0);
}

TEST_CASE("trip_duration equals max minus min") {
    Trip t;
    t.points = {ping("u", 100), ping("u", 250), ping("u", 400)};
    CHECK(trip_duration(t) == 300);
}

TEST_CASE("trip_duration matches a naive scan on random trips") {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::int64_t> ts;
        std::int64_t cur = 1 + static_cast<std::int64_t>(gen() % 100000);
        const int n = 1 + static_cast<int>(gen() % 20);
        Trip t;
        for (int i = 0; i < n; ++i) {
            t.points.push_back(ping("u", cur));
            ts.push_back(cur);
            cur += 1 + static_cast<std::int64_t>(gen() % 1199);
        }
        const auto mm = std::minmax_element(ts.begin(), ts.end());
        CHECK(trip_duration(t) == *mm.second - *mm.first);
    }
}

TEST_CASE("mode thresholds, right-open intervals") {
    CHECK(classify_mode(0.0) == TravelMode::Stay);
    CHECK(classify_mode(0.04) == TravelMode::Stay);
    CHECK(classify_mode(0.05) == TravelMode::Walking);
    CHECK(classify_mode(1.4) == TravelMode::Walking);
    CHECK(classify_mode(3.09) == TravelMode::Walking);
    CHECK(classify_mode(3.1) == TravelMode::Running);
    CHECK(classify_mode(9.99) == TravelMode::Running);
    CHECK(classify_mode(10.0) == TravelMode::Other);
    CHECK(classify_mode(12.0) == TravelMode::Other);
    CHECK_THROWS_AS(classify_mode(-0.1), std::invalid_argument);
}

TEST_CASE("velocities from the haversine distance over elapsed time") {
    Trip t;
    t.user_id = "u1";
    t.points = {ping("u1", 0x7fffffff - 120, 0.0, 0.0), ping("u1", 0x7fffffff - 60, 0.0, 0.0)};

    SUBCASE("identical positions give stay") {
        const auto segs = point_velocities(t);
        REQUIRE(segs.size() == 1);
        CHECK(*segs[0].velocity_mps == 0.0);
        CHECK(segs[0].mode == TravelMode::Stay);
    }
    SUBCASE("one milli-degree of latitude per minute is walking") {
        t.points[1].lat = 0.001;
        const auto segs = point_velocities(t);
        REQUIRE(segs.size() == 1);
        CHECK(*segs[0].velocity_mps == doctest::Approx(1.853).epsilon(1e-3));
        CHECK(segs[0].mode == TravelMode::Walking);
    }
    SUBCASE("single-point trip yields one start segment") {
        t.points.resize(1);
        const auto segs = point_velocities(t);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].mode == TravelMode::Start);
        CHECK_FALSE(segs[0].velocity_mps.has_value());
    }
}

TEST_CASE("segmentation properties on random per-user sequences") {
    std::mt19937_64 gen(22);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<TraceRecord> traces;
        const int n_users = 1 + static_cast<int>(gen() % 4);
        for (int u = 0; u < n_users; ++u) {
            std::int64_t cur = 1 + static_cast<std::int64_t>(gen() % 10000);
            const int n = 1 + static_cast<int>(gen() % 30);
            for (int i = 0; i < n; ++i) {
                traces.push_back(ping("user" + std::to_string(u), cur));
                cur += static_cast<std::int64_t>(gen() % 3000);  // may repeat timestamps
            }
        }
        std::shuffle(traces.begin(), traces.end(), gen);
        const auto trips = segment_trips(traces);

        // Per-user reconstruction and gap checks.
        std::map<std::string, std::vector<std::int64_t>> rebuilt;
        std::map<std::string, std::int64_t> prev_trip_end;
        std::map<std::string, int> expected_index;
        for (const auto& t : trips) {
            CHECK(t.trip_index == expected_index[t.user_id]++);
            for (std::size_t i = 0; i + 1 < t.points.size(); ++i) {
                const auto gap = t.points[i + 1].timestamp - t.points[i].timestamp;
                CHECK(gap > 0);
                CHECK(gap < 1200);
            }
            if (auto it = prev_trip_end.find(t.user_id); it != prev_trip_end.end())
                CHECK(t.start_ts() - it->second >= 1200);
            prev_trip_end[t.user_id] = t.end_ts();
            for (const auto& p : t.points) rebuilt[t.user_id].push_back(p.timestamp);
        }
        // Point conservation: trips cover exactly the deduplicated input.
        std::map<std::string, std::set<std::int64_t>> expect;
        for (const auto& tr : traces) expect[tr.user_id].insert(tr.timestamp);
        for (const auto& [user, stamps] : expect) {
            REQUIRE(rebuilt.contains(user));
            CHECK(rebuilt[user].size() == stamps.size());
            CHECK(std::is_sorted(rebuilt[user].begin(), rebuilt[user].end()));
            CHECK(std::set<std::int64_t>(rebuilt[user].begin(), rebuilt[user].end()) ==
                  stamps);
        }
    }
}
