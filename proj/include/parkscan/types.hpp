#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace parkscan {

/// One raw GPS ping from one user via one application.
struct TraceRecord {
    std::string user_id;
    std::int64_t timestamp = 0;  // seconds since Unix epoch
    double lat = 0.0;            // WGS84 degrees
    double lon = 0.0;            // WGS84 degrees
    double accuracy = 0.0;       // meters, non-negative
    std::string app_id;
};

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

/// Closed exterior ring plus optional holes, vertices in (lat, lon).
struct BoundaryPolygon {
    std::vector<LatLon> exterior;
    std::vector<std::vector<LatLon>> holes;
};

struct AppSummary {
    std::string app_id;
    std::uint64_t count = 0;
    double avg_accuracy = 0.0;  // meters
    double accuracy_std = 0.0;  // population std, meters
};

enum class TravelMode { Stay, Walking, Running, Other, Start };

const char* mode_name(TravelMode m);

/// Maximal time-ordered run of one user's pings with all consecutive
/// gaps below the segmentation threshold.
struct Trip {
    std::string user_id;
    int trip_index = 0;
    std::vector<TraceRecord> points;        // strictly increasing timestamps
    std::vector<std::size_t> source_index;  // parallel to points; index into the trace set

    std::int64_t start_ts() const { return points.front().timestamp; }
    std::int64_t end_ts() const { return points.back().timestamp; }
    std::int64_t duration_s() const { return end_ts() - start_ts(); }
};

/// Velocity and mode label for one consecutive point pair of a trip.
/// A single-point trip yields one segment with mode Start and no velocity.
struct ModeSegment {
    std::string user_id;
    int trip_index = 0;
    int seg_index = 0;
    std::int64_t t_start = 0;  // timestamp of the segment's first point
    std::optional<double> velocity_mps;
    TravelMode mode = TravelMode::Stay;
};

}  // namespace parkscan
