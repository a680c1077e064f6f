#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parkscan/types.hpp"

namespace parkscan {

inline constexpr std::int64_t kDefaultGapS = 1200;  // 20 minutes

/// Per user: sort by time, collapse duplicate timestamps (keep the record
/// with the smallest accuracy; ties keep the first seen), and split wherever
/// the gap between consecutive points is >= gap_s. Trip indices are
/// chronological per user, starting at 0. Input order may be arbitrary.
std::vector<Trip> segment_trips(const std::vector<TraceRecord>& traces,
                                std::int64_t gap_s = kDefaultGapS);

std::int64_t trip_duration(const Trip& trip);

/// Velocity band label. Right-open intervals:
/// [0, 0.05) stay, [0.05, 3.1) walking, [3.1, 10) running, [10, inf) other.
TravelMode classify_mode(double velocity_mps);

/// One segment per consecutive point pair; a single-point trip yields one
/// Start segment with no velocity.
std::vector<ModeSegment> point_velocities(const Trip& trip);

void write_trips_csv(const std::string& path, const std::vector<Trip>& trips);
void write_segments_csv(const std::string& path, const std::vector<ModeSegment>& segments);

}  // namespace parkscan
