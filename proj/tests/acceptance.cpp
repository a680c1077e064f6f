// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and uses only fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "parkscan/hdbscan.hpp"
#include "parkscan/metrics.hpp"
#include "parkscan/pipeline.hpp"
#include "parkscan/synth.hpp"
#include "parkscan/trips.hpp"

using namespace parkscan;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string detail;
};

void fail(const std::string& detail) { throw Failure{detail}; }

void require(bool ok, const std::string& detail) {
    if (!ok) fail(detail);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ProjectedPoint> random_points(std::mt19937_64& gen, int n, double lo,
                                          double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<ProjectedPoint> pts;
    for (int i = 0; i < n; ++i)
        pts.push_back({u(gen), u(gen), static_cast<std::size_t>(i)});
    return pts;
}

// --- criterion 1: planted-cluster recovery ---------------------------------

void criterion_planted_recovery() {
    std::mt19937_64 gen(101);
    std::normal_distribution<double> g(0.0, 15.0);
    std::uniform_real_distribution<double> u(-400.0, 1400.0);
    const double centers[3][2] = {{0.0, 0.0}, {600.0, 0.0}, {300.0, 550.0}};

    std::vector<ProjectedPoint> pts;
    std::vector<std::int32_t> truth;
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 300; ++i) {
            pts.push_back({centers[b][0] + g(gen), centers[b][1] + g(gen), pts.size()});
            truth.push_back(b);
        }
    for (int i = 0; i < 100; ++i) {
        pts.push_back({u(gen), u(gen), pts.size()});
        truth.push_back(-1);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto model = cluster(pts, {15, 100});
    const double elapsed = seconds_since(t0);

    require(model.n_clusters == 3,
            "expected 3 clusters, got " + std::to_string(model.n_clusters));
    const double ari = adjusted_rand_index(model.labels, truth);
    require(ari >= 0.95, "adjusted Rand index " + std::to_string(ari) + " < 0.95");
    require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s >= 10 s");
}

// --- criterion 2: MST oracle equivalence -----------------------------------

void criterion_mst_oracles() {
    std::mt19937_64 gen(102);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(gen() % 11);  // n in [2, 12]
        const auto pts = random_points(gen, n, -100.0, 100.0);
        const int k = 1 + static_cast<int>(gen() % (n - 1 > 0 ? n - 1 : 1));
        const auto cores = core_distances(pts, k);
        const auto edges = build_mst(pts, cores);
        double total = 0.0;
        for (const auto& e : edges) total += e.weight;

        std::vector<std::vector<double>> w(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n)));
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                w[i][j] = w[j][i] = mutual_reachability(pts, cores, i, j);

        const double prim = oracle_mst_prim(w);
        require(std::abs(total - prim) <= 1e-9,
                "rep " + std::to_string(rep) + ": |total - prim| = " +
                    std::to_string(std::abs(total - prim)));
        if (n <= 8) {
            const double exact = oracle_mst_exhaustive(w);
            require(std::abs(total - exact) <= 1e-9,
                    "rep " + std::to_string(rep) + ": |total - exhaustive| = " +
                        std::to_string(std::abs(total - exact)));
        }
    }
}

// --- criterion 3: core-distance oracle -------------------------------------

void criterion_core_distance_oracle() {
    std::mt19937_64 gen(103);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 25 + static_cast<int>(gen() % 476);  // n <= 500
        const int k = 1 + static_cast<int>(gen() % 20);    // k <= 20
        const auto pts = random_points(gen, n, -2000.0, 2000.0);
        std::vector<double> xs(pts.size()), ys(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            xs[i] = pts[i].x;
            ys[i] = pts[i].y;
        }
        const auto got = core_distances(pts, k);
        const auto want = oracle_core_distances(xs, ys, k);
        for (std::size_t i = 0; i < got.size(); ++i)
            require(got[i] == want[i], "rep " + std::to_string(rep) + " point " +
                                           std::to_string(i) + ": inexact core distance");
    }
}

// --- criterion 4: segmentation properties ----------------------------------

void criterion_segmentation_properties() {
    std::mt19937_64 gen(104);
    std::uint64_t violations = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        std::vector<TraceRecord> traces;
        const std::string user = "u";
        std::int64_t cur = 1 + static_cast<std::int64_t>(gen() % 100000);
        const int n = 1 + static_cast<int>(gen() % 25);
        for (int i = 0; i < n; ++i) {
            TraceRecord t;
            t.user_id = user;
            t.timestamp = cur;
            t.accuracy = 10.0;
            t.app_id = "a";
            traces.push_back(t);
            cur += static_cast<std::int64_t>(gen() % 3000);  // may repeat
        }
        std::shuffle(traces.begin(), traces.end(), gen);

        const auto trips = segment_trips(traces);
        std::int64_t prev_end = -1;
        std::multiset<std::int64_t> covered;
        for (const auto& t : trips) {
            for (std::size_t i = 0; i + 1 < t.points.size(); ++i)
                if (t.points[i + 1].timestamp - t.points[i].timestamp >= 1200)
                    ++violations;
            if (prev_end >= 0 && t.start_ts() - prev_end < 1200) ++violations;
            prev_end = t.end_ts();
            for (const auto& p : t.points) covered.insert(p.timestamp);
        }
        std::multiset<std::int64_t> expect;
        std::set<std::int64_t> dedup;
        for (const auto& t : traces) dedup.insert(t.timestamp);
        expect.insert(dedup.begin(), dedup.end());
        if (covered != expect) ++violations;
    }
    require(violations == 0, std::to_string(violations) + " violations");
}

// --- criterion 5: shared-experience oracle equivalence ---------------------

void criterion_shared_oracle() {
    std::mt19937_64 gen(105);
    for (int rep = 0; rep < 100; ++rep) {
        const int m = 1 + static_cast<int>(gen() % 200);
        std::vector<DwellRecord> dwells;
        for (int i = 0; i < m; ++i) {
            const std::int64_t s = static_cast<std::int64_t>(gen() % 200000);
            const std::int64_t e =
                (gen() % 6 == 0) ? s : s + static_cast<std::int64_t>(gen() % 8000);
            char user[16];
            std::snprintf(user, sizeof user, "u%03d", i);
            dwells.push_back({0, user, 0, s, e});
        }
        std::sort(dwells.begin(), dwells.end(),
                  [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
        std::vector<std::pair<std::int64_t, std::int64_t>> intervals;
        for (const auto& d : dwells) intervals.emplace_back(d.t_start, d.t_end);

        const auto got = shared_fractions(dwells);
        const auto want = oracle_shared(intervals);
        for (std::size_t i = 0; i < got.size(); ++i)
            require(std::abs(got[i].shared_fraction - want[i]) <= 1e-9,
                    "rep " + std::to_string(rep) + " trip " + std::to_string(i) +
                        ": sweep deviates from oracle");
    }
}

// --- criterion 6: regression recovery --------------------------------------

void criterion_regression_recovery() {
    std::vector<ClusterSummary> exact;
    for (int i = 0; i < 30; ++i) {
        ClusterSummary s;
        s.cluster_id = i;
        s.n_points = 10;
        s.n_trips = static_cast<std::uint64_t>(3 + 17 * i);
        s.avg_shared = 0.02 * std::pow(static_cast<double>(s.n_trips), 0.058);
        exact.push_back(s);
    }
    const auto fit = loglog_fit(exact);
    require(std::abs(fit.slope - 0.058) <= 1e-9,
            "exact slope off by " + std::to_string(std::abs(fit.slope - 0.058)));
    require(std::abs(fit.r2 - 1.0) <= 1e-12, "r2 = " + std::to_string(fit.r2));

    std::mt19937_64 gen(106);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<ClusterSummary> noisy;
    for (int i = 0; i < 200; ++i) {
        ClusterSummary s;
        s.cluster_id = i;
        s.n_points = 10;
        s.n_trips = static_cast<std::uint64_t>(2 + gen() % 5000);
        s.avg_shared = std::pow(
            10.0, -3.0 + 0.5 * std::log10(static_cast<double>(s.n_trips)) + noise(gen));
        noisy.push_back(s);
    }
    const auto nfit = loglog_fit(noisy);
    require(std::abs(nfit.slope - 0.5) <= 0.02,
            "noisy slope " + std::to_string(nfit.slope) + " not within 0.02 of 0.5");
}

// --- criterion 7: mode classification table --------------------------------

void criterion_mode_table() {
    const std::vector<std::pair<double, TravelMode>> table = {
        {0.04, TravelMode::Stay},    {0.05, TravelMode::Walking},
        {3.09, TravelMode::Walking}, {3.1, TravelMode::Running},
        {9.99, TravelMode::Running}, {10.0, TravelMode::Other}};
    for (const auto& [v, want] : table) {
        const auto got = classify_mode(v);
        require(got == want, "classify_mode(" + std::to_string(v) + ") = " +
                                 mode_name(got) + ", expected " + mode_name(want));
    }
}

// --- criterion 8: end-to-end determinism and scale -------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("parkscan_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void criterion_end_to_end() {
    const auto data = fresh_dir("e2e_in");
    SynthSpec spec;
    spec.seed = 108;
    spec.n_users = 50;
    spec.blobs = {{40.768, -73.982, 20.0, 33000},
                  {40.780, -73.966, 20.0, 33000},
                  {40.793, -73.952, 20.0, 33000}};
    spec.noise_points = 1000;
    spec.noise_min_lat = 40.755;
    spec.noise_min_lon = -73.995;
    spec.noise_max_lat = 40.815;
    spec.noise_max_lon = -73.935;
    spec.stay_frac = 0.6;
    spec.walk_frac = 0.3;
    spec.run_frac = 0.1;
    write_synth(generate(spec), data.string());
    {
        std::ofstream out(data / "park.geojson");
        out << R"({"type":"Polygon","coordinates":[[[-74.0,40.75],[-73.93,40.75],)"
            << R"([-73.93,40.82],[-74.0,40.82],[-74.0,40.75]]]})" << "\n";
    }

    PipelineConfig config;
    config.input_path = (data / "traces.csv").string();
    config.boundary_path = (data / "park.geojson").string();
    config.out_dir = fresh_dir("e2e_out1").string();

    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = run_pipeline(config);
    const double elapsed = seconds_since(t0);
    require(summary.parsed == 100000,
            "expected 100000 parsed points, got " + std::to_string(summary.parsed));
    require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s >= 60 s");

    PipelineConfig again = config;
    again.out_dir = fresh_dir("e2e_out2").string();
    run_pipeline(again);
    for (const auto& entry : fs::directory_iterator(config.out_dir)) {
        const auto name = entry.path().filename();
        require(slurp(entry.path()) == slurp(fs::path(again.out_dir) / name),
                name.string() + " differs between runs");
    }
}

// --- criterion 9: scale covariance -----------------------------------------

void criterion_scale_covariance() {
    std::mt19937_64 gen(109);
    std::normal_distribution<double> g(0.0, 15.0);
    std::uniform_real_distribution<double> u(-400.0, 1400.0);
    const double centers[3][2] = {{0.0, 0.0}, {600.0, 0.0}, {300.0, 550.0}};
    std::vector<ProjectedPoint> pts;
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 300; ++i)
            pts.push_back({centers[b][0] + g(gen), centers[b][1] + g(gen), pts.size()});
    for (int i = 0; i < 100; ++i) pts.push_back({u(gen), u(gen), pts.size()});

    auto scaled = pts;
    for (auto& p : scaled) {
        p.x *= 3.0;
        p.y *= 3.0;
    }

    const auto cores = core_distances(pts, 15);
    const auto cores3 = core_distances(scaled, 15);
    const auto mst = build_mst(pts, cores);
    const auto mst3 = build_mst(scaled, cores3);
    require(mst.size() == mst3.size(), "edge count changed under scaling");
    for (std::size_t i = 0; i < mst.size(); ++i)
        require(std::abs(mst3[i].weight - 3.0 * mst[i].weight) <= 1e-9,
                "edge " + std::to_string(i) + " weight not scaled by 3");

    const auto a = cluster(pts, {15, 100});
    const auto b = cluster(scaled, {15, 100});
    require(a.n_clusters == b.n_clusters, "cluster count changed under scaling");
    require(a.labels == b.labels, "partition changed under scaling");
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* description;
        void (*run)();
    };
    const std::vector<Criterion> criteria = {
        {1, "planted-cluster recovery (3 blobs + noise, ARI >= 0.95, < 10 s)",
         criterion_planted_recovery},
        {2, "MST oracle equivalence (200 instances, Prim + exhaustive)",
         criterion_mst_oracles},
        {3, "core-distance oracle (50 instances, exact match)",
         criterion_core_distance_oracle},
        {4, "segmentation properties (10000 sequences, zero violations)",
         criterion_segmentation_properties},
        {5, "shared-experience sweep vs O(m^2) oracle (100 clusters, 1e-9)",
         criterion_shared_oracle},
        {6, "regression recovery (exact 0.058; noisy 0.5 within 0.02)",
         criterion_regression_recovery},
        {7, "mode classification table (right-open thresholds)",
         criterion_mode_table},
        {8, "end-to-end run (100k points, < 60 s, byte-identical reruns)",
         criterion_end_to_end},
        {9, "scale covariance (x3 coordinates: same partition, x3 weights)",
         criterion_scale_covariance},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        try {
            c.run();
            std::printf("[PASS] criterion %d: %s\n", c.number, c.description);
        } catch (const Failure& f) {
            ++failures;
            std::printf("[FAIL] criterion %d: %s — %s\n", c.number, c.description,
                        f.detail.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %d: %s — unexpected exception: %s\n", c.number,
                        c.description, e.what());
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
