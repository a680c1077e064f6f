#pragma once

#include <istream>
#include <set>
#include <string>
#include <vector>

#include "parkscan/types.hpp"

namespace parkscan {

struct ParseResult {
    std::vector<TraceRecord> records;
    std::uint64_t rejected = 0;  // malformed data lines, skipped
};

/// Parse comma-delimited traces. First line must be the canonical header
/// `user_id,timestamp,lat,lon,accuracy,app_id`. Malformed lines are counted
/// and skipped; more than 50% malformed is fatal.
ParseResult parse_traces(std::istream& in);
ParseResult parse_trace_file(const std::string& path);

/// Keep traces inside the boundary (edge-inclusive).
/// Throws ConfigError on an invalid polygon.
std::vector<TraceRecord> filter_boundary(const std::vector<TraceRecord>& traces,
                                         const BoundaryPolygon& boundary);

/// Drop traces whose app_id is in the exclusion set; order preserved.
std::vector<TraceRecord> filter_apps(const std::vector<TraceRecord>& traces,
                                     const std::set<std::string>& excluded);

/// Per-app count and accuracy mean/population-std, sorted by count
/// descending, ties by app_id.
std::vector<AppSummary> summarize_apps(const std::vector<TraceRecord>& traces);

/// Load a GeoJSON Polygon (bare geometry, Feature, or the first polygon
/// feature of a FeatureCollection). First ring exterior, rest holes.
BoundaryPolygon load_boundary_geojson(const std::string& path);

void write_traces_csv(const std::string& path, const std::vector<TraceRecord>& traces);
void write_app_summary_csv(const std::string& path, const std::vector<AppSummary>& apps);

}  // namespace parkscan
