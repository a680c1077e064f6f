#include "parkscan/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "parkscan/errors.hpp"
#include "parkscan/io_util.hpp"
#include "parkscan/trips.hpp"

namespace parkscan {

namespace {

const std::vector<std::string> kModeLabels = {"stay", "walking", "running", "other",
                                              "start"};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if (a % b != 0 && (a < 0) != (b < 0)) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

HistogramSeries mode_series(std::size_t n_bins) {
    HistogramSeries h;
    h.labels = kModeLabels;
    h.counts.assign(kModeLabels.size(), std::vector<std::uint64_t>(n_bins, 0));
    h.edges.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) h.edges[i] = static_cast<double>(i);
    return h;
}

}  // namespace

std::uint64_t HistogramSeries::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (const std::uint64_t c : row) t += c;
    return t;
}

HistogramSeries hourly_mode_histogram(const std::vector<ModeSegment>& segments,
                                      int tz_offset_h) {
    HistogramSeries h = mode_series(24);
    for (const auto& s : segments) {
        const std::int64_t local = s.t_start + static_cast<std::int64_t>(tz_offset_h) * 3600;
        const std::int64_t hour = floor_mod(local, 86400) / 3600;
        ++h.counts[static_cast<std::size_t>(s.mode)][hour];
    }
    return h;
}

HistogramSeries weekly_mode_histogram(const std::vector<ModeSegment>& segments,
                                      int tz_offset_h) {
    HistogramSeries h = mode_series(7);
    for (const auto& s : segments) {
        const std::int64_t local = s.t_start + static_cast<std::int64_t>(tz_offset_h) * 3600;
        // Epoch day zero was a Thursday; day bins run 0 = Sunday .. 6 = Saturday.
        const std::int64_t day = floor_mod(floor_div(local, 86400) + 4, 7);
        ++h.counts[static_cast<std::size_t>(s.mode)][day];
    }
    return h;
}

HistogramSeries duration_histogram(const std::vector<Trip>& trips,
                                   double bin_width_min, DurationStats* stats) {
    if (bin_width_min <= 0.0) throw ConfigError("duration_histogram: bin width must be > 0");
    HistogramSeries h;
    h.labels = {"count"};
    std::vector<double> minutes;
    minutes.reserve(trips.size());
    for (const auto& t : trips)
        minutes.push_back(static_cast<double>(trip_duration(t)) / 60.0);

    std::size_t n_bins = 0;
    for (const double m : minutes)
        n_bins = std::max(n_bins, static_cast<std::size_t>(m / bin_width_min) + 1);
    h.edges.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) h.edges[i] = static_cast<double>(i) * bin_width_min;
    h.counts.assign(1, std::vector<std::uint64_t>(n_bins, 0));
    for (const double m : minutes)
        ++h.counts[0][static_cast<std::size_t>(m / bin_width_min)];

    if (stats) {
        *stats = DurationStats{};
        if (!minutes.empty()) {
            std::vector<double> sorted = minutes;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            stats->median_min = (sorted[(n - 1) / 2] + sorted[n / 2]) / 2.0;
            double sum = 0.0;
            for (const double m : sorted) sum += m;
            stats->mean_min = sum / static_cast<double>(n);
            stats->max_min = sorted.back();
        }
    }
    return h;
}

void write_histogram_csv(const std::string& path, const HistogramSeries& h) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "bin";
    for (const auto& label : h.labels) out << ',' << label;
    out << "\n";
    for (std::size_t b = 0; b < h.edges.size(); ++b) {
        out << fmt_double(h.edges[b]);
        for (std::size_t m = 0; m < h.labels.size(); ++m) out << ',' << h.counts[m][b];
        out << "\n";
    }
}

}  // namespace parkscan
