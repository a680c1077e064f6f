#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parkscan/types.hpp"

namespace parkscan {

struct HistogramSeries {
    std::vector<double> edges;               // bin lower edges
    std::vector<std::string> labels;         // one counts column per label
    std::vector<std::vector<std::uint64_t>> counts;  // [label][bin]

    std::uint64_t total() const;
};

struct DurationStats {
    double median_min = 0.0;
    double mean_min = 0.0;
    double max_min = 0.0;
};

/// Bin each segment by the local hour / day-of-week of its first point
/// (epoch shifted by tz_offset_h). 24 hourly bins; 7 daily bins, 0 = Sunday.
HistogramSeries hourly_mode_histogram(const std::vector<ModeSegment>& segments,
                                      int tz_offset_h);
HistogramSeries weekly_mode_histogram(const std::vector<ModeSegment>& segments,
                                      int tz_offset_h);

/// Trip durations in minutes, fixed-width bins from zero.
HistogramSeries duration_histogram(const std::vector<Trip>& trips,
                                   double bin_width_min, DurationStats* stats = nullptr);

void write_histogram_csv(const std::string& path, const HistogramSeries& h);

}  // namespace parkscan
