#include "parkscan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "parkscan/errors.hpp"
#include "parkscan/io_util.hpp"

namespace parkscan {

std::vector<DwellRecord> dwell_records(const ClusterModel& model,
                                       const std::vector<Trip>& trips) {
    std::vector<DwellRecord> out;
    for (const auto& trip : trips) {
        std::map<std::int32_t, std::pair<std::int64_t, std::int64_t>> spans;
        for (std::size_t i = 0; i < trip.points.size(); ++i) {
            const std::int32_t label = model.labels[trip.source_index[i]];
            if (label < 0) continue;
            const std::int64_t t = trip.points[i].timestamp;
            auto [it, inserted] = spans.try_emplace(label, std::pair{t, t});
            if (!inserted) {
                it->second.first = std::min(it->second.first, t);
                it->second.second = std::max(it->second.second, t);
            }
        }
        for (const auto& [label, span] : spans)
            out.push_back({label, trip.user_id, trip.trip_index, span.first, span.second});
    }
    std::sort(out.begin(), out.end(), [](const DwellRecord& a, const DwellRecord& b) {
        if (a.cluster_id != b.cluster_id) return a.cluster_id < b.cluster_id;
        if (a.user_id != b.user_id) return a.user_id < b.user_id;
        return a.trip_index < b.trip_index;
    });
    return out;
}

namespace {

double instant_fraction(std::int64_t tau, std::span<const DwellRecord> others) {
    std::uint64_t covering = 0;
    for (const auto& o : others)
        if (o.t_start <= tau && tau <= o.t_end) ++covering;
    return static_cast<double>(covering) / static_cast<double>(others.size());
}

}  // namespace

double shared_fraction(const DwellRecord& target, std::span<const DwellRecord> others) {
    if (others.empty()) return 0.0;
    if (target.dwell_s() == 0) return instant_fraction(target.t_start, others);
    double sum = 0.0;
    const double dwell = static_cast<double>(target.dwell_s());
    for (const auto& o : others) {
        const std::int64_t overlap = std::min(target.t_end, o.t_end) -
                                     std::max(target.t_start, o.t_start);
        if (overlap > 0) sum += static_cast<double>(overlap) / dwell;
    }
    return std::clamp(sum / static_cast<double>(others.size()), 0.0, 1.0);
}

namespace {

// Sweep over one cluster's intervals: prefix-integrate the coverage count
// so each target's total overlap with everyone is two lookups.
void sweep_cluster(const std::vector<DwellRecord>& dwells,
                   const std::vector<std::size_t>& idx,
                   std::vector<SharedExperienceRecord>& out) {
    const std::size_t m = idx.size();
    if (m == 1) {
        const auto& d = dwells[idx[0]];
        out.push_back({d.cluster_id, d.user_id, d.trip_index, 0.0});
        return;
    }
    std::vector<std::int64_t> starts, ends, breaks;
    starts.reserve(m);
    ends.reserve(m);
    for (const std::size_t i : idx) {
        starts.push_back(dwells[i].t_start);
        ends.push_back(dwells[i].t_end);
    }
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    breaks.reserve(2 * m);
    breaks.insert(breaks.end(), starts.begin(), starts.end());
    breaks.insert(breaks.end(), ends.begin(), ends.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // cum[i] = integral of the coverage count over (-inf, breaks[i]].
    std::vector<std::int64_t> cum(breaks.size(), 0);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const std::int64_t started =
            std::upper_bound(starts.begin(), starts.end(), breaks[i]) - starts.begin();
        const std::int64_t ended =
            std::upper_bound(ends.begin(), ends.end(), breaks[i]) - ends.begin();
        cum[i + 1] = cum[i] + (started - ended) * (breaks[i + 1] - breaks[i]);
    }
    auto cum_at = [&](std::int64_t t) {
        const std::size_t i =
            std::lower_bound(breaks.begin(), breaks.end(), t) - breaks.begin();
        return cum[i];
    };

    for (const std::size_t i : idx) {
        const auto& d = dwells[i];
        double frac;
        if (d.dwell_s() == 0) {
            const std::int64_t tau = d.t_start;
            const std::int64_t started =
                std::upper_bound(starts.begin(), starts.end(), tau) - starts.begin();
            const std::int64_t ended =
                std::lower_bound(ends.begin(), ends.end(), tau) - ends.begin();
            const std::int64_t covering = started - ended - 1;  // minus self
            frac = static_cast<double>(covering) / static_cast<double>(m - 1);
        } else {
            const std::int64_t total =
                cum_at(d.t_end) - cum_at(d.t_start) - d.dwell_s();  // minus self
            frac = static_cast<double>(total) / static_cast<double>(d.dwell_s()) /
                   static_cast<double>(m - 1);
        }
        out.push_back({d.cluster_id, d.user_id, d.trip_index,
                       std::clamp(frac, 0.0, 1.0)});
    }
}

}  // namespace

std::vector<SharedExperienceRecord> shared_fractions(const std::vector<DwellRecord>& dwells) {
    std::map<std::int32_t, std::vector<std::size_t>> by_cluster;
    for (std::size_t i = 0; i < dwells.size(); ++i)
        by_cluster[dwells[i].cluster_id].push_back(i);
    std::vector<SharedExperienceRecord> out;
    out.reserve(dwells.size());
    for (const auto& [cluster, idx] : by_cluster) sweep_cluster(dwells, idx, out);
    return out;
}

std::vector<ClusterSummary> cluster_summaries(
    const std::vector<DwellRecord>& dwells,
    const std::vector<SharedExperienceRecord>& shared, const ClusterModel& model,
    std::optional<std::uint64_t> exclude_above) {
    std::vector<ClusterSummary> out(model.n_clusters);
    for (std::int32_t k = 0; k < model.n_clusters; ++k) out[k].cluster_id = k;
    for (const std::int32_t label : model.labels)
        if (label >= 0) ++out[label].n_points;
    for (const auto& d : dwells) {
        auto& s = out[d.cluster_id];
        ++s.n_trips;
        s.avg_dwell_s += static_cast<double>(d.dwell_s());
    }
    for (const auto& r : shared) out[r.cluster_id].avg_shared += r.shared_fraction;
    for (auto& s : out) {
        if (s.n_trips > 0) {
            s.avg_dwell_s /= static_cast<double>(s.n_trips);
            s.avg_shared /= static_cast<double>(s.n_trips);
        }
    }

    std::uint64_t threshold;
    if (exclude_above) {
        threshold = *exclude_above;
    } else if (!out.empty()) {
        // Nearest-rank 99th percentile of cluster point mass.
        std::vector<std::uint64_t> masses;
        masses.reserve(out.size());
        for (const auto& s : out) masses.push_back(s.n_points);
        std::sort(masses.begin(), masses.end());
        const std::size_t rank = static_cast<std::size_t>(
            std::ceil(0.99 * static_cast<double>(masses.size())));
        threshold = masses[rank - 1];
    } else {
        threshold = 0;
    }
    for (auto& s : out) s.excluded = s.n_points > threshold;
    return out;
}

FitResult loglog_fit(const std::vector<ClusterSummary>& summaries) {
    FitResult fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : summaries) {
        if (s.excluded) continue;
        if (s.n_trips == 0 || s.avg_shared <= 0.0) {
            ++fit.n_dropped;
            continue;
        }
        pts.emplace_back(std::log10(static_cast<double>(s.n_trips)),
                         std::log10(s.avg_shared));
    }
    if (pts.size() < 2)
        throw FitError("loglog_fit: need at least 2 usable points, have " +
                       std::to_string(pts.size()));
    fit.n_used = pts.size();

    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw FitError("loglog_fit: degenerate x values");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssres = 0.0;
    for (const auto& [x, y] : pts) {
        const double e = y - (fit.slope * x + fit.intercept);
        ssres += e * e;
    }
    fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ssres / syy;
    return fit;
}

std::vector<ClusterSummary> top_shared(const std::vector<ClusterSummary>& summaries,
                                       std::size_t n) {
    std::vector<ClusterSummary> out;
    for (const auto& s : summaries)
        if (!s.excluded) out.push_back(s);
    std::sort(out.begin(), out.end(), [](const ClusterSummary& a, const ClusterSummary& b) {
        if (a.avg_shared != b.avg_shared) return a.avg_shared > b.avg_shared;
        return a.cluster_id < b.cluster_id;
    });
    if (out.size() > n) out.resize(n);
    return out;
}

void write_dwell_csv(const std::string& path, const std::vector<DwellRecord>& dwells) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "cluster_id,user_id,trip_index,t_start,t_end,dwell_s\n";
    for (const auto& d : dwells)
        out << d.cluster_id << ',' << d.user_id << ',' << d.trip_index << ','
            << d.t_start << ',' << d.t_end << ',' << d.dwell_s() << "\n";
}

void write_shared_csv(const std::string& path,
                      const std::vector<SharedExperienceRecord>& shared) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "cluster_id,user_id,trip_index,shared_fraction\n";
    for (const auto& r : shared)
        out << r.cluster_id << ',' << r.user_id << ',' << r.trip_index << ','
            << fmt_double(r.shared_fraction) << "\n";
}

void write_summary_csv(const std::string& path,
                       const std::vector<ClusterSummary>& summaries) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "cluster_id,n_points,n_trips,avg_dwell_s,avg_shared,excluded\n";
    for (const auto& s : summaries)
        out << s.cluster_id << ',' << s.n_points << ',' << s.n_trips << ','
            << fmt_double(s.avg_dwell_s) << ',' << fmt_double(s.avg_shared) << ','
            << (s.excluded ? 1 : 0) << "\n";
}

void write_fit_txt(const std::string& path, const FitResult& fit) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "slope=" << fmt_double(fit.slope) << " intercept=" << fmt_double(fit.intercept)
        << " r2=" << fmt_double(fit.r2) << " n_used=" << fit.n_used
        << " n_dropped=" << fit.n_dropped << "\n";
}

}  // namespace parkscan
