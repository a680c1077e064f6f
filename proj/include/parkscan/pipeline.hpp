#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "parkscan/types.hpp"

namespace parkscan {

struct PipelineConfig {
    std::string input_path;
    std::string boundary_path;
    std::string out_dir;
    std::set<std::string> excluded_apps;
    std::int64_t gap_s = 1200;
    int min_pts = 15;
    int min_cluster_size = 100;
    std::optional<std::uint64_t> exclude_above;  // cluster point-mass threshold
    std::optional<double> max_accuracy_m;        // optional accuracy filter, default off
    int tz_offset_h = -4;
    double duration_bin_min = 5.0;
    std::size_t top_n = 10;
};

struct RunSummary {
    std::uint64_t parsed = 0;
    std::uint64_t rejected = 0;
    std::uint64_t in_boundary = 0;
    std::uint64_t after_app_filter = 0;
    std::uint64_t n_users = 0;
    std::uint64_t n_trips = 0;
    std::int32_t n_clusters = 0;
    std::uint64_t n_noise = 0;
    bool fit_ok = false;
};

/// Full batch run: ingest -> trips -> cluster -> metrics -> report.
/// Writes every stage's interface files plus manifest.txt into out_dir.
/// Throws StageError; partially written outputs are removed first.
RunSummary run_pipeline(const PipelineConfig& config);

}  // namespace parkscan
