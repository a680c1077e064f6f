#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parkscan/types.hpp"

namespace parkscan {

struct BlobSpec {
    double lat = 0.0;
    double lon = 0.0;
    double sigma_m = 10.0;
    std::uint64_t points = 0;
};

/// Deterministic generator spec. A fixed seed reproduces byte-identical
/// output: mt19937_64 stream, uniforms by 53-bit division, gaussians by
/// Box-Muller, no library distributions.
struct SynthSpec {
    std::uint64_t seed = 1;
    std::uint64_t n_users = 10;
    std::vector<BlobSpec> blobs;
    std::uint64_t noise_points = 0;
    double noise_min_lat = 0.0, noise_min_lon = 0.0;
    double noise_max_lat = 0.0, noise_max_lon = 0.0;
    std::uint64_t pings_per_trip = 10;
    std::int64_t ping_interval_s = 60;
    std::int64_t intertrip_gap_s = 3600;
    double stay_frac = 1.0, walk_frac = 0.0, run_frac = 0.0;
    std::int64_t time_start = 1493596800;  // 2017-05-01
    std::int64_t time_end = 1496275199;
    std::string app_id = "appA";

    void validate() const;  // throws ConfigError
};

struct GroundTruth {
    std::vector<std::int32_t> point_blob;  // per emitted point, -1 = noise
    struct PlantedTrip {
        std::string user_id;
        int trip_index = 0;
        std::int64_t start = 0;
        std::int64_t end = 0;
    };
    std::vector<PlantedTrip> trips;
    std::int64_t planted_median_duration_s = 0;
};

struct SynthResult {
    std::vector<TraceRecord> traces;  // emission order == point index
    GroundTruth truth;
};

SynthSpec load_synth_spec(const std::string& path);  // flat key=value file
SynthResult generate(const SynthSpec& spec);

/// Write traces.csv plus ground-truth sidecars gt_points.csv
/// (point_index,blob_id) and gt_trips.csv
/// (user_id,trip_index,planted_start,planted_end) into out_dir.
void write_synth(const SynthResult& result, const std::string& out_dir);

// ---- Brute-force oracles (test and acceptance reference routes) ----

/// O(m^2) pairwise shared-experience evaluation over dwell intervals
/// [start, end]. Refuses more than 10,000 intervals.
std::vector<double> oracle_shared(const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals);

/// Exhaustive minimum spanning tree weight over all labeled trees
/// (Pruefer enumeration); n <= 8 only. weights is a dense n*n matrix.
double oracle_mst_exhaustive(const std::vector<std::vector<double>>& weights);

/// Textbook adjacency-matrix Prim; independent of the production path.
double oracle_mst_prim(const std::vector<std::vector<double>>& weights);

/// O(n^2) sort-based k-th nearest neighbor distances.
std::vector<double> oracle_core_distances(const std::vector<double>& xs,
                                          const std::vector<double>& ys, int k);

/// Winding-number point-in-polygon over one ring (lat, lon vertices).
bool oracle_point_in_ring(const std::vector<LatLon>& ring, double lat, double lon);

/// Chance-corrected partition agreement; noise labels compare as their own
/// class. Both label vectors must have equal length.
double adjusted_rand_index(const std::vector<std::int32_t>& a,
                           const std::vector<std::int32_t>& b);

}  // namespace parkscan
