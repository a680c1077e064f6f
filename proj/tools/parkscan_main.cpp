#include <filesystem>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "parkscan/errors.hpp"
#include "parkscan/hdbscan.hpp"
#include "parkscan/ingest.hpp"
#include "parkscan/metrics.hpp"
#include "parkscan/pipeline.hpp"
#include "parkscan/report.hpp"
#include "parkscan/synth.hpp"
#include "parkscan/trips.hpp"

namespace {

using namespace parkscan;

namespace fs = std::filesystem;

struct StageArgs {
    std::string input;
    std::string out_dir;
    std::int64_t gap_s = kDefaultGapS;
    int min_pts = 15;
    int min_cluster_size = 100;
    int tz_offset_h = -4;
    double bin_min = 5.0;
    std::uint64_t exclude_above = 0;  // 0 = auto percentile
    std::size_t top_n = 10;
};

std::vector<TraceRecord> load_traces(const std::string& path) {
    return parse_trace_file(path).records;
}

std::pair<std::vector<Trip>, std::vector<ModeSegment>> build_trips(
    const std::vector<TraceRecord>& traces, std::int64_t gap_s) {
    auto trips = segment_trips(traces, gap_s);
    std::vector<ModeSegment> segments;
    for (const auto& t : trips) {
        const auto segs = point_velocities(t);
        segments.insert(segments.end(), segs.begin(), segs.end());
    }
    return {std::move(trips), std::move(segments)};
}

ClusterModel build_clusters(const std::vector<TraceRecord>& traces,
                            const StageArgs& args, std::vector<ProjectedPoint>& points,
                            Projection& proj) {
    points = project(traces, &proj);
    return cluster(points, ClusterParams{args.min_pts, args.min_cluster_size});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GPS trace analytics: trips, density clusters, shared-experience metrics"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value config file; CLI flags take precedence");

    // synth
    std::string synth_spec_path, synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic trace dataset");
    synth_cmd->add_option("--spec", synth_spec_path, "Generator spec (key=value)")->required();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    // ingest
    StageArgs ia;
    std::string boundary;
    std::vector<std::string> excluded;
    double max_accuracy = 0.0;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse, boundary-filter, app-filter");
    ingest_cmd->add_option("--input", ia.input, "Raw trace CSV")->required();
    ingest_cmd->add_option("--boundary", boundary, "GeoJSON boundary polygon")->required();
    ingest_cmd->add_option("--out", ia.out_dir, "Output directory")->required();
    ingest_cmd->add_option("--exclude-app", excluded, "App id to drop (repeatable)");
    ingest_cmd->add_option("--max-accuracy", max_accuracy,
                           "Drop traces with accuracy above this (meters); default off");

    auto add_common = [](CLI::App* cmd, StageArgs& a, bool trips_opts, bool cluster_opts) {
        cmd->add_option("--input", a.input, "Trace CSV (typically filtered_traces.csv)")
            ->required();
        cmd->add_option("--out", a.out_dir, "Output directory")->required();
        if (trips_opts) cmd->add_option("--gap-s", a.gap_s, "Trip split gap, seconds");
        if (cluster_opts) {
            cmd->add_option("--min-pts", a.min_pts, "Core-distance neighbor count");
            cmd->add_option("--min-cluster-size", a.min_cluster_size, "Minimum cluster size");
        }
    };

    StageArgs ta;
    auto* trips_cmd = app.add_subcommand("trips", "Segment trips and label travel modes");
    add_common(trips_cmd, ta, true, false);

    StageArgs ca;
    auto* cluster_cmd = app.add_subcommand("cluster", "Density-cluster trace positions");
    add_common(cluster_cmd, ca, false, true);

    StageArgs ma;
    auto* metrics_cmd = app.add_subcommand("metrics", "Dwell and shared-experience metrics");
    add_common(metrics_cmd, ma, true, true);
    metrics_cmd->add_option("--exclude-above", ma.exclude_above,
                            "Point-mass exclusion threshold (0 = 99th percentile)");

    StageArgs ra;
    auto* report_cmd = app.add_subcommand("report", "Histograms and rankings");
    add_common(report_cmd, ra, true, true);
    report_cmd->add_option("--tz-offset", ra.tz_offset_h, "Hours added to epoch timestamps");
    report_cmd->add_option("--bin-min", ra.bin_min, "Duration histogram bin width, minutes");
    report_cmd->add_option("--exclude-above", ra.exclude_above,
                           "Point-mass exclusion threshold (0 = 99th percentile)");
    report_cmd->add_option("--top-n", ra.top_n, "Ranking length");

    // run
    PipelineConfig cfg;
    std::vector<std::string> run_excluded;
    std::uint64_t run_exclude_above = 0;
    double run_max_accuracy = 0.0;
    auto* run_cmd = app.add_subcommand("run", "Full pipeline");
    run_cmd->add_option("--input", cfg.input_path, "Raw trace CSV")->required();
    run_cmd->add_option("--boundary", cfg.boundary_path, "GeoJSON boundary polygon")->required();
    run_cmd->add_option("--out", cfg.out_dir, "Output directory")->required();
    run_cmd->add_option("--gap-s", cfg.gap_s, "Trip split gap, seconds");
    run_cmd->add_option("--min-pts", cfg.min_pts, "Core-distance neighbor count");
    run_cmd->add_option("--min-cluster-size", cfg.min_cluster_size, "Minimum cluster size");
    run_cmd->add_option("--exclude-app", run_excluded, "App id to drop (repeatable)");
    run_cmd->add_option("--tz-offset", cfg.tz_offset_h, "Hours added to epoch timestamps");
    run_cmd->add_option("--exclude-above", run_exclude_above,
                        "Point-mass exclusion threshold (0 = 99th percentile)");
    run_cmd->add_option("--max-accuracy", run_max_accuracy,
                        "Drop traces with accuracy above this (meters); default off");
    run_cmd->add_option("--bin-min", cfg.duration_bin_min,
                        "Duration histogram bin width, minutes");
    run_cmd->add_option("--top-n", cfg.top_n, "Ranking length");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            const SynthSpec spec = load_synth_spec(synth_spec_path);
            write_synth(generate(spec), synth_out);
            std::cout << "wrote traces.csv, gt_points.csv, gt_trips.csv to " << synth_out
                      << "\n";
        } else if (ingest_cmd->parsed()) {
            fs::create_directories(ia.out_dir);
            const auto poly = load_boundary_geojson(boundary);
            const auto parsed = parse_trace_file(ia.input);
            auto in_park = filter_boundary(parsed.records, poly);
            const auto apps = summarize_apps(in_park);
            auto filtered = filter_apps(in_park,
                                        {excluded.begin(), excluded.end()});
            if (max_accuracy > 0.0) {
                std::erase_if(filtered, [&](const TraceRecord& t) {
                    return t.accuracy > max_accuracy;
                });
            }
            write_app_summary_csv((fs::path(ia.out_dir) / "app_summary.csv").string(), apps);
            write_traces_csv((fs::path(ia.out_dir) / "filtered_traces.csv").string(),
                             filtered);
            std::cout << "parsed=" << parsed.records.size() << " rejected=" << parsed.rejected
                      << " in_boundary=" << in_park.size() << " kept=" << filtered.size()
                      << "\n";
        } else if (trips_cmd->parsed()) {
            fs::create_directories(ta.out_dir);
            const auto traces = load_traces(ta.input);
            const auto [trips, segments] = build_trips(traces, ta.gap_s);
            write_trips_csv((fs::path(ta.out_dir) / "trips.csv").string(), trips);
            write_segments_csv((fs::path(ta.out_dir) / "mode_segments.csv").string(),
                               segments);
            std::cout << "n_trips=" << trips.size() << "\n";
        } else if (cluster_cmd->parsed()) {
            fs::create_directories(ca.out_dir);
            const auto traces = load_traces(ca.input);
            std::vector<ProjectedPoint> points;
            Projection proj;
            const auto model = build_clusters(traces, ca, points, proj);
            write_assignments_csv(
                (fs::path(ca.out_dir) / "cluster_assignments.csv").string(), traces, model);
            write_clusters_geojson((fs::path(ca.out_dir) / "clusters.geojson").string(),
                                   points, model, proj);
            std::cout << "n_clusters=" << model.n_clusters << "\n";
        } else if (metrics_cmd->parsed()) {
            fs::create_directories(ma.out_dir);
            const auto traces = load_traces(ma.input);
            const auto [trips, segments] = build_trips(traces, ma.gap_s);
            std::vector<ProjectedPoint> points;
            Projection proj;
            const auto model = build_clusters(traces, ma, points, proj);
            const auto dwells = dwell_records(model, trips);
            const auto shared = shared_fractions(dwells);
            const auto summaries = cluster_summaries(
                dwells, shared, model,
                ma.exclude_above > 0 ? std::optional(ma.exclude_above) : std::nullopt);
            write_dwell_csv((fs::path(ma.out_dir) / "dwell.csv").string(), dwells);
            write_shared_csv((fs::path(ma.out_dir) / "shared.csv").string(), shared);
            write_summary_csv((fs::path(ma.out_dir) / "cluster_summary.csv").string(),
                              summaries);
            try {
                write_fit_txt((fs::path(ma.out_dir) / "fit.txt").string(),
                              loglog_fit(summaries));
            } catch (const FitError& e) {
                std::ofstream out(fs::path(ma.out_dir) / "fit.txt");
                out << "error=" << e.what() << "\n";
                std::cerr << "fit skipped: " << e.what() << "\n";
            }
            std::cout << "n_dwell_records=" << dwells.size() << "\n";
        } else if (report_cmd->parsed()) {
            fs::create_directories(ra.out_dir);
            const auto traces = load_traces(ra.input);
            const auto [trips, segments] = build_trips(traces, ra.gap_s);
            std::vector<ProjectedPoint> points;
            Projection proj;
            const auto model = build_clusters(traces, ra, points, proj);
            const auto dwells = dwell_records(model, trips);
            const auto shared = shared_fractions(dwells);
            const auto summaries = cluster_summaries(
                dwells, shared, model,
                ra.exclude_above > 0 ? std::optional(ra.exclude_above) : std::nullopt);
            DurationStats stats;
            write_histogram_csv((fs::path(ra.out_dir) / "hist_hourly.csv").string(),
                                hourly_mode_histogram(segments, ra.tz_offset_h));
            write_histogram_csv((fs::path(ra.out_dir) / "hist_weekly.csv").string(),
                                weekly_mode_histogram(segments, ra.tz_offset_h));
            write_histogram_csv((fs::path(ra.out_dir) / "hist_duration.csv").string(),
                                duration_histogram(trips, ra.bin_min, &stats));
            write_summary_csv((fs::path(ra.out_dir) / "top_shared.csv").string(),
                              top_shared(summaries, ra.top_n));
            std::cout << "duration_median_min=" << stats.median_min << "\n";
        } else if (run_cmd->parsed()) {
            cfg.excluded_apps = {run_excluded.begin(), run_excluded.end()};
            if (run_exclude_above > 0) cfg.exclude_above = run_exclude_above;
            if (run_max_accuracy > 0.0) cfg.max_accuracy_m = run_max_accuracy;
            const RunSummary s = run_pipeline(cfg);
            std::cout << "parsed=" << s.parsed << " in_boundary=" << s.in_boundary
                      << " kept=" << s.after_app_filter << " trips=" << s.n_trips
                      << " clusters=" << s.n_clusters << " noise=" << s.n_noise << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
