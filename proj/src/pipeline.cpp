#include "parkscan/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "parkscan/errors.hpp"
#include "parkscan/hdbscan.hpp"
#include "parkscan/ingest.hpp"
#include "parkscan/io_util.hpp"
#include "parkscan/metrics.hpp"
#include "parkscan/report.hpp"
#include "parkscan/trips.hpp"

namespace parkscan {

namespace {

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}

class OutputSet {
public:
    explicit OutputSet(const std::filesystem::path& dir) : dir_(dir) {}

    std::string path(const std::string& name) {
        written_.push_back(dir_ / name);
        return (dir_ / name).string();
    }

    void remove_all() {
        std::error_code ec;
        for (const auto& p : written_) std::filesystem::remove(p, ec);
    }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

}  // namespace

RunSummary run_pipeline(const PipelineConfig& config) {
    RunSummary summary;
    if (config.out_dir.empty()) throw StageError("config", "missing output directory");
    std::filesystem::create_directories(config.out_dir);
    OutputSet outputs{config.out_dir};

    try {
        // ---- ingest
        std::vector<TraceRecord> filtered;
        std::vector<AppSummary> apps;
        std::string input_digest, boundary_digest;
        try {
            if (!std::filesystem::exists(config.input_path))
                throw InputError("input trace file not found: " + config.input_path);
            if (!std::filesystem::exists(config.boundary_path))
                throw ConfigError("boundary file not found: " + config.boundary_path);
            input_digest = file_digest(config.input_path);
            boundary_digest = file_digest(config.boundary_path);
            const BoundaryPolygon boundary = load_boundary_geojson(config.boundary_path);
            ParseResult parsed = parse_trace_file(config.input_path);
            summary.parsed = parsed.records.size();
            summary.rejected = parsed.rejected;
            std::vector<TraceRecord> in_park = filter_boundary(parsed.records, boundary);
            summary.in_boundary = in_park.size();
            apps = summarize_apps(in_park);
            filtered = filter_apps(in_park, config.excluded_apps);
            if (config.max_accuracy_m) {
                std::erase_if(filtered, [&](const TraceRecord& t) {
                    return t.accuracy > *config.max_accuracy_m;
                });
            }
            summary.after_app_filter = filtered.size();
            write_app_summary_csv(outputs.path("app_summary.csv"), apps);
            write_traces_csv(outputs.path("filtered_traces.csv"), filtered);
        } catch (const std::exception& e) {
            throw StageError("ingest", e.what());
        }

        // ---- trips
        std::vector<Trip> trips;
        std::vector<ModeSegment> segments;
        try {
            trips = segment_trips(filtered, config.gap_s);
            summary.n_trips = trips.size();
            std::set<std::string> users;
            for (const auto& t : trips) users.insert(t.user_id);
            summary.n_users = users.size();
            for (const auto& t : trips) {
                const auto segs = point_velocities(t);
                segments.insert(segments.end(), segs.begin(), segs.end());
            }
            write_trips_csv(outputs.path("trips.csv"), trips);
            write_segments_csv(outputs.path("mode_segments.csv"), segments);
        } catch (const std::exception& e) {
            throw StageError("trips", e.what());
        }

        // ---- cluster
        ClusterModel model;
        Projection proj;
        std::vector<ProjectedPoint> points;
        try {
            const ClusterParams params{config.min_pts, config.min_cluster_size};
            points = project(filtered, &proj);
            model = cluster(points, params);
            summary.n_clusters = model.n_clusters;
            for (const std::int32_t l : model.labels)
                if (l < 0) ++summary.n_noise;
            write_assignments_csv(outputs.path("cluster_assignments.csv"), filtered, model);
            write_clusters_geojson(outputs.path("clusters.geojson"), points, model, proj);
        } catch (const std::exception& e) {
            throw StageError("cluster", e.what());
        }

        // ---- metrics
        std::vector<ClusterSummary> summaries;
        FitResult fit;
        std::string fit_error;
        try {
            const auto dwells = dwell_records(model, trips);
            const auto shared = shared_fractions(dwells);
            summaries = cluster_summaries(dwells, shared, model, config.exclude_above);
            write_dwell_csv(outputs.path("dwell.csv"), dwells);
            write_shared_csv(outputs.path("shared.csv"), shared);
            write_summary_csv(outputs.path("cluster_summary.csv"), summaries);
            try {
                fit = loglog_fit(summaries);
                summary.fit_ok = true;
                write_fit_txt(outputs.path("fit.txt"), fit);
            } catch (const FitError& e) {
                fit_error = e.what();
                std::ofstream out(outputs.path("fit.txt"));
                out << "error=" << fit_error << "\n";
            }
        } catch (const std::exception& e) {
            throw StageError("metrics", e.what());
        }

        // ---- report
        try {
            DurationStats stats;
            const auto hourly = hourly_mode_histogram(segments, config.tz_offset_h);
            const auto weekly = weekly_mode_histogram(segments, config.tz_offset_h);
            const auto durations =
                duration_histogram(trips, config.duration_bin_min, &stats);
            write_histogram_csv(outputs.path("hist_hourly.csv"), hourly);
            write_histogram_csv(outputs.path("hist_weekly.csv"), weekly);
            write_histogram_csv(outputs.path("hist_duration.csv"), durations);
            write_summary_csv(outputs.path("top_shared.csv"),
                              top_shared(summaries, config.top_n));

            std::ofstream man(outputs.path("manifest.txt"));
            if (!man) throw InputError("cannot write manifest.txt");
            man << "input=" << config.input_path << "\n"
                << "input_digest=" << input_digest << "\n"
                << "boundary=" << config.boundary_path << "\n"
                << "boundary_digest=" << boundary_digest << "\n";
            for (const auto& app : config.excluded_apps) man << "exclude_app=" << app << "\n";
            man << "gap_s=" << config.gap_s << "\n"
                << "min_pts=" << config.min_pts << "\n"
                << "min_cluster_size=" << config.min_cluster_size << "\n"
                << "tz_offset_h=" << config.tz_offset_h << "\n"
                << "duration_bin_min=" << fmt_double(config.duration_bin_min) << "\n";
            if (config.exclude_above) man << "exclude_above=" << *config.exclude_above << "\n";
            if (config.max_accuracy_m)
                man << "max_accuracy_m=" << fmt_double(*config.max_accuracy_m) << "\n";
            man << "parsed=" << summary.parsed << "\n"
                << "rejected=" << summary.rejected << "\n"
                << "in_boundary=" << summary.in_boundary << "\n"
                << "after_app_filter=" << summary.after_app_filter << "\n"
                << "n_users=" << summary.n_users << "\n"
                << "n_trips=" << summary.n_trips << "\n"
                << "n_clusters=" << summary.n_clusters << "\n"
                << "n_noise=" << summary.n_noise << "\n"
                << "duration_median_min=" << fmt_double(stats.median_min) << "\n"
                << "duration_mean_min=" << fmt_double(stats.mean_min) << "\n"
                << "duration_max_min=" << fmt_double(stats.max_min) << "\n";
            if (summary.fit_ok)
                man << "fit_slope=" << fmt_double(fit.slope) << "\n"
                    << "fit_intercept=" << fmt_double(fit.intercept) << "\n"
                    << "fit_r2=" << fmt_double(fit.r2) << "\n"
                    << "fit_n_used=" << fit.n_used << "\n"
                    << "fit_n_dropped=" << fit.n_dropped << "\n";
            else
                man << "fit_error=" << fit_error << "\n";
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError("report", e.what());
        }
    } catch (...) {
        outputs.remove_all();
        throw;
    }
    return summary;
}

}  // namespace parkscan
