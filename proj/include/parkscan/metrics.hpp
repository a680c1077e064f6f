#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parkscan/hdbscan.hpp"
#include "parkscan/types.hpp"

namespace parkscan {

/// First-to-last ping interval of one trip inside one cluster.
struct DwellRecord {
    std::int32_t cluster_id = 0;
    std::string user_id;
    int trip_index = 0;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;

    std::int64_t dwell_s() const { return t_end - t_start; }
};

struct SharedExperienceRecord {
    std::int32_t cluster_id = 0;
    std::string user_id;
    int trip_index = 0;
    double shared_fraction = 0.0;  // in [0, 1]
};

struct ClusterSummary {
    std::int32_t cluster_id = 0;
    std::uint64_t n_points = 0;
    std::uint64_t n_trips = 0;
    double avg_dwell_s = 0.0;
    double avg_shared = 0.0;
    bool excluded = false;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::uint64_t n_used = 0;
    std::uint64_t n_dropped = 0;
};

/// One record per (cluster, trip) pair with at least one labeled point;
/// noise points ignored. Ordered by cluster, then user, then trip index.
std::vector<DwellRecord> dwell_records(const ClusterModel& model,
                                       const std::vector<Trip>& trips);

/// Mean over the other trips of the fraction of the target's dwell interval
/// they overlap. Zero-dwell targets score 1 per other interval containing
/// the instant (closed endpoints). Empty others -> 0. Direct O(m) form.
double shared_fraction(const DwellRecord& target, std::span<const DwellRecord> others);

/// All per-trip shared fractions, grouped by cluster; sorted-endpoint sweep,
/// O(m log m) per cluster. Output order matches dwell_records order.
std::vector<SharedExperienceRecord> shared_fractions(const std::vector<DwellRecord>& dwells);

/// Per-cluster rollup. If exclude_above is empty, the threshold defaults to
/// the 99th percentile (nearest-rank) of cluster point mass; clusters with
/// n_points strictly above the threshold are flagged excluded.
std::vector<ClusterSummary> cluster_summaries(
    const std::vector<DwellRecord>& dwells,
    const std::vector<SharedExperienceRecord>& shared, const ClusterModel& model,
    std::optional<std::uint64_t> exclude_above = std::nullopt);

/// OLS of log10(avg_shared) on log10(n_trips) over non-excluded summaries;
/// zero-valued clusters are dropped and counted. Throws FitError with
/// fewer than 2 usable points.
FitResult loglog_fit(const std::vector<ClusterSummary>& summaries);

/// Non-excluded summaries by avg_shared descending, ties by cluster_id,
/// truncated to n.
std::vector<ClusterSummary> top_shared(const std::vector<ClusterSummary>& summaries,
                                       std::size_t n);

void write_dwell_csv(const std::string& path, const std::vector<DwellRecord>& dwells);
void write_shared_csv(const std::string& path,
                      const std::vector<SharedExperienceRecord>& shared);
void write_summary_csv(const std::string& path,
                       const std::vector<ClusterSummary>& summaries);
void write_fit_txt(const std::string& path, const FitResult& fit);

}  // namespace parkscan
