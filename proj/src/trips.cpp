#include "parkscan/trips.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "parkscan/errors.hpp"
#include "parkscan/geo.hpp"
#include "parkscan/io_util.hpp"

namespace parkscan {

const char* mode_name(TravelMode m) {
    switch (m) {
        case TravelMode::Stay: return "stay";
        case TravelMode::Walking: return "walking";
        case TravelMode::Running: return "running";
        case TravelMode::Other: return "other";
        case TravelMode::Start: return "start";
    }
    return "?";
}

std::vector<Trip> segment_trips(const std::vector<TraceRecord>& traces,
                                std::int64_t gap_s) {
    std::map<std::string, std::vector<std::size_t>> by_user;
    for (std::size_t i = 0; i < traces.size(); ++i)
        by_user[traces[i].user_id].push_back(i);

    std::vector<Trip> trips;
    for (auto& [user, idxs] : by_user) {
        std::stable_sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
            return traces[a].timestamp < traces[b].timestamp;
        });
        // Collapse duplicate timestamps, keeping the most precise fix.
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < idxs.size();) {
            std::size_t best = idxs[i];
            std::size_t j = i + 1;
            while (j < idxs.size() &&
                   traces[idxs[j]].timestamp == traces[idxs[i]].timestamp) {
                if (traces[idxs[j]].accuracy < traces[best].accuracy) best = idxs[j];
                ++j;
            }
            kept.push_back(best);
            i = j;
        }

        int trip_index = 0;
        Trip cur;
        cur.user_id = user;
        cur.trip_index = trip_index;
        auto flush = [&]() {
            if (!cur.points.empty()) {
                trips.push_back(std::move(cur));
                cur = Trip{};
                cur.user_id = user;
                cur.trip_index = ++trip_index;
            }
        };
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (!cur.points.empty() &&
                traces[kept[i]].timestamp - cur.points.back().timestamp >= gap_s) {
                flush();
            }
            cur.points.push_back(traces[kept[i]]);
            cur.source_index.push_back(kept[i]);
        }
        flush();
    }
    return trips;
}

std::int64_t trip_duration(const Trip& trip) {
    return trip.end_ts() - trip.start_ts();
}

TravelMode classify_mode(double velocity_mps) {
    if (velocity_mps < 0.0)
        throw std::invalid_argument("classify_mode: negative velocity");
    if (velocity_mps < 0.05) return TravelMode::Stay;
    if (velocity_mps < 3.1) return TravelMode::Walking;
    if (velocity_mps < 10.0) return TravelMode::Running;
    return TravelMode::Other;
}

std::vector<ModeSegment> point_velocities(const Trip& trip) {
    std::vector<ModeSegment> out;
    if (trip.points.size() == 1) {
        out.push_back({trip.user_id, trip.trip_index, 0, trip.points[0].timestamp,
                       std::nullopt, TravelMode::Start});
        return out;
    }
    out.reserve(trip.points.size() - 1);
    for (std::size_t i = 0; i + 1 < trip.points.size(); ++i) {
        const auto& a = trip.points[i];
        const auto& b = trip.points[i + 1];
        const std::int64_t dt = b.timestamp - a.timestamp;
        if (dt <= 0)
            throw std::logic_error("point_velocities: non-increasing timestamps");
        const double v = haversine_m(a.lat, a.lon, b.lat, b.lon) / static_cast<double>(dt);
        out.push_back({trip.user_id, trip.trip_index, static_cast<int>(i), a.timestamp,
                       v, classify_mode(v)});
    }
    return out;
}

void write_trips_csv(const std::string& path, const std::vector<Trip>& trips) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "user_id,trip_index,start_ts,end_ts,duration_s,n_points\n";
    for (const auto& t : trips) {
        out << t.user_id << ',' << t.trip_index << ',' << t.start_ts() << ','
            << t.end_ts() << ',' << t.duration_s() << ',' << t.points.size() << "\n";
    }
}

void write_segments_csv(const std::string& path, const std::vector<ModeSegment>& segments) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "user_id,trip_index,seg_index,velocity_mps,mode\n";
    for (const auto& s : segments) {
        out << s.user_id << ',' << s.trip_index << ',' << s.seg_index << ',';
        if (s.velocity_mps) out << fmt_double(*s.velocity_mps);
        out << ',' << mode_name(s.mode) << "\n";
    }
}

}  // namespace parkscan
