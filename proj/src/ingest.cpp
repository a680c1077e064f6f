#include "parkscan/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "parkscan/errors.hpp"
#include "parkscan/geo.hpp"
#include "parkscan/io_util.hpp"

namespace parkscan {

namespace {

const char* kHeader = "user_id,timestamp,lat,lon,accuracy,app_id";

bool parse_line(std::string_view line, TraceRecord& rec) {
    const auto fields = split_csv(line);
    if (fields.size() != 6) return false;
    if (fields[0].empty() || fields[5].empty()) return false;
    if (!parse_i64(fields[1], rec.timestamp) || rec.timestamp <= 0) return false;
    if (!parse_f64(fields[2], rec.lat) || rec.lat < -90.0 || rec.lat > 90.0) return false;
    if (!parse_f64(fields[3], rec.lon) || rec.lon < -180.0 || rec.lon > 180.0) return false;
    if (!parse_f64(fields[4], rec.accuracy) || !(rec.accuracy >= 0.0) ||
        !std::isfinite(rec.accuracy))
        return false;
    rec.user_id = std::string(fields[0]);
    rec.app_id = std::string(fields[5]);
    return true;
}

}  // namespace

ParseResult parse_traces(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty input: missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw InputError("unexpected header line, want '" + std::string(kHeader) + "'");

    ParseResult res;
    std::uint64_t data_lines = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++data_lines;
        TraceRecord rec;
        if (parse_line(line, rec)) {
            res.records.push_back(std::move(rec));
        } else {
            ++res.rejected;
        }
    }
    if (data_lines > 0 && res.rejected * 2 > data_lines)
        throw InputError("more than 50% of data lines malformed (" +
                         std::to_string(res.rejected) + "/" + std::to_string(data_lines) + ")");
    return res;
}

ParseResult parse_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file: " + path);
    return parse_traces(in);
}

std::vector<TraceRecord> filter_boundary(const std::vector<TraceRecord>& traces,
                                         const BoundaryPolygon& boundary) {
    if (!polygon_valid(boundary)) throw ConfigError("invalid boundary polygon");
    std::vector<TraceRecord> out;
    out.reserve(traces.size());
    for (const auto& t : traces) {
        if (polygon_contains(boundary, t.lat, t.lon)) out.push_back(t);
    }
    return out;
}

std::vector<TraceRecord> filter_apps(const std::vector<TraceRecord>& traces,
                                     const std::set<std::string>& excluded) {
    std::vector<TraceRecord> out;
    out.reserve(traces.size());
    for (const auto& t : traces) {
        if (!excluded.contains(t.app_id)) out.push_back(t);
    }
    return out;
}

std::vector<AppSummary> summarize_apps(const std::vector<TraceRecord>& traces) {
    struct Acc {
        std::uint64_t n = 0;
        double sum = 0.0;
        double sumsq = 0.0;
    };
    std::map<std::string, Acc> by_app;
    for (const auto& t : traces) {
        Acc& a = by_app[t.app_id];
        ++a.n;
        a.sum += t.accuracy;
        a.sumsq += t.accuracy * t.accuracy;
    }
    std::vector<AppSummary> out;
    out.reserve(by_app.size());
    for (const auto& [app, a] : by_app) {
        const double mean = a.sum / static_cast<double>(a.n);
        const double var = std::max(0.0, a.sumsq / static_cast<double>(a.n) - mean * mean);
        out.push_back({app, a.n, mean, std::sqrt(var)});
    }
    std::sort(out.begin(), out.end(), [](const AppSummary& x, const AppSummary& y) {
        if (x.count != y.count) return x.count > y.count;
        return x.app_id < y.app_id;
    });
    return out;
}

BoundaryPolygon load_boundary_geojson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open boundary file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("boundary file is not valid JSON: " + std::string(e.what()));
    }

    // Unwrap Feature / FeatureCollection down to a Polygon geometry.
    const nlohmann::json* geom = &j;
    if (j.value("type", "") == "FeatureCollection") {
        if (!j.contains("features") || j["features"].empty())
            throw ConfigError("boundary FeatureCollection has no features");
        geom = &j["features"][0];
    }
    if (geom->value("type", "") == "Feature") geom = &(*geom)["geometry"];
    if (geom->value("type", "") != "Polygon")
        throw ConfigError("boundary geometry must be a GeoJSON Polygon");

    BoundaryPolygon poly;
    const auto& rings = (*geom)["coordinates"];
    if (!rings.is_array() || rings.empty())
        throw ConfigError("boundary polygon has no rings");
    for (std::size_t r = 0; r < rings.size(); ++r) {
        std::vector<LatLon> ring;
        for (const auto& v : rings[r]) {
            if (!v.is_array() || v.size() < 2)
                throw ConfigError("boundary ring vertex is not [lon, lat]");
            ring.push_back({v[1].get<double>(), v[0].get<double>()});
        }
        if (r == 0)
            poly.exterior = std::move(ring);
        else
            poly.holes.push_back(std::move(ring));
    }
    if (!polygon_valid(poly)) throw ConfigError("invalid boundary polygon");
    return poly;
}

void write_traces_csv(const std::string& path, const std::vector<TraceRecord>& traces) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << kHeader << "\n";
    for (const auto& t : traces) {
        out << t.user_id << ',' << t.timestamp << ',' << fmt_double(t.lat) << ','
            << fmt_double(t.lon) << ',' << fmt_double(t.accuracy) << ',' << t.app_id << "\n";
    }
}

void write_app_summary_csv(const std::string& path, const std::vector<AppSummary>& apps) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "app_id,count,avg_accuracy,accuracy_std\n";
    for (const auto& a : apps) {
        out << a.app_id << ',' << a.count << ',' << fmt_double(a.avg_accuracy) << ','
            << fmt_double(a.accuracy_std) << "\n";
    }
}

}  // namespace parkscan
