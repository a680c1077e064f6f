#include "parkscan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

#include "parkscan/errors.hpp"
#include "parkscan/geo.hpp"
#include "parkscan/ingest.hpp"
#include "parkscan/io_util.hpp"

namespace parkscan {

namespace {

// Portable deterministic stream: raw mt19937_64 words only, no
// implementation-defined library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    double gauss() {  // Box-Muller
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace

void SynthSpec::validate() const {
    const double mix = stay_frac + walk_frac + run_frac;
    if (std::abs(mix - 1.0) > 1e-9)
        throw ConfigError("synth: mode mix must sum to 1");
    if (stay_frac < 0.0 || walk_frac < 0.0 || run_frac < 0.0)
        throw ConfigError("synth: negative mode proportion");
    for (const auto& b : blobs)
        if (b.sigma_m <= 0.0) throw ConfigError("synth: blob sigma must be positive");
    std::uint64_t total = noise_points;
    for (const auto& b : blobs) total += b.points;
    if (total > 0 && n_users == 0)
        throw ConfigError("synth: zero users with nonzero points");
    if (pings_per_trip == 0) throw ConfigError("synth: pings_per_trip must be >= 1");
    if (ping_interval_s <= 0) throw ConfigError("synth: ping_interval_s must be positive");
    if (intertrip_gap_s <= 0) throw ConfigError("synth: intertrip_gap_s must be positive");
    if (noise_points > 0 &&
        (noise_max_lat <= noise_min_lat || noise_max_lon <= noise_min_lon))
        throw ConfigError("synth: noise bounding box is empty");
    if (time_end <= time_start || time_start <= 0)
        throw ConfigError("synth: invalid time window");
}

SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SynthResult res;

    std::vector<std::string> users(spec.n_users);
    std::vector<std::int64_t> cursor(spec.n_users);
    std::vector<int> next_trip(spec.n_users, 0);
    for (std::uint64_t u = 0; u < spec.n_users; ++u) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "u%04llu", static_cast<unsigned long long>(u));
        users[u] = buf;
        // Stagger users through the window so their trips interleave.
        cursor[u] = spec.time_start +
                    static_cast<std::int64_t>(u) * 7919 %
                        std::max<std::int64_t>(1, (spec.time_end - spec.time_start) / 4);
    }

    std::uint64_t next_user = 0;
    auto emit_trip = [&](std::int32_t blob_id, std::uint64_t n_pings) {
        const std::uint64_t u = next_user;
        next_user = (next_user + 1) % spec.n_users;
        const std::int64_t start = cursor[u];
        const std::int64_t end =
            start + static_cast<std::int64_t>(n_pings - 1) * spec.ping_interval_s;
        cursor[u] = end + spec.intertrip_gap_s;

        // Mode draw fixes the planted speed band.
        const double mode_draw = rng.uniform();
        double v;
        if (mode_draw < spec.stay_frac)
            v = rng.uniform(0.0, 0.04);
        else if (mode_draw < spec.stay_frac + spec.walk_frac)
            v = rng.uniform(0.1, 3.0);
        else
            v = rng.uniform(3.2, 9.5);
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double step = v * static_cast<double>(spec.ping_interval_s);

        double sx = 0.0, sy = 0.0, jitter = 0.0;
        Projection proj;
        if (blob_id >= 0) {
            const BlobSpec& b = spec.blobs[blob_id];
            proj = Projection{b.lat, b.lon};
            sx = b.sigma_m * rng.gauss();
            sy = b.sigma_m * rng.gauss();
            jitter = b.sigma_m / 3.0;
        }

        for (std::uint64_t i = 0; i < n_pings; ++i) {
            TraceRecord rec;
            rec.user_id = users[u];
            rec.timestamp = start + static_cast<std::int64_t>(i) * spec.ping_interval_s;
            rec.accuracy = std::floor(rng.uniform(5.0, 50.0) * 10.0) / 10.0;
            rec.app_id = spec.app_id;
            if (blob_id >= 0) {
                const double x = sx + step * static_cast<double>(i) * std::cos(theta) +
                                 jitter * rng.gauss();
                const double y = sy + step * static_cast<double>(i) * std::sin(theta) +
                                 jitter * rng.gauss();
                proj.to_latlon(x, y, rec.lat, rec.lon);
            } else {
                rec.lat = rng.uniform(spec.noise_min_lat, spec.noise_max_lat);
                rec.lon = rng.uniform(spec.noise_min_lon, spec.noise_max_lon);
            }
            res.traces.push_back(std::move(rec));
            res.truth.point_blob.push_back(blob_id);
        }
        res.truth.trips.push_back({users[u], next_trip[u]++, start, end});
    };

    for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
        std::uint64_t remaining = spec.blobs[b].points;
        while (remaining > 0) {
            const std::uint64_t n = std::min(remaining, spec.pings_per_trip);
            emit_trip(static_cast<std::int32_t>(b), n);
            remaining -= n;
        }
    }
    for (std::uint64_t i = 0; i < spec.noise_points; ++i) emit_trip(-1, 1);

    std::vector<std::int64_t> durations;
    durations.reserve(res.truth.trips.size());
    for (const auto& t : res.truth.trips) durations.push_back(t.end - t.start);
    if (!durations.empty()) {
        std::sort(durations.begin(), durations.end());
        res.truth.planted_median_duration_s = durations[(durations.size() - 1) / 2];
    }
    return res;
}

SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open synth spec: " + path);
    SynthSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("synth spec line " + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        auto nums = [&](std::size_t want) {
            std::vector<double> out;
            for (const auto f : split_csv(val)) {
                double v;
                if (!parse_f64(f, v))
                    throw ConfigError("synth spec line " + std::to_string(lineno) +
                                      ": bad number '" + std::string(f) + "'");
                out.push_back(v);
            }
            if (out.size() != want)
                throw ConfigError("synth spec line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(want) + " values");
            return out;
        };
        if (key == "seed") spec.seed = static_cast<std::uint64_t>(nums(1)[0]);
        else if (key == "n_users") spec.n_users = static_cast<std::uint64_t>(nums(1)[0]);
        else if (key == "blob") {
            const auto v = nums(4);
            spec.blobs.push_back({v[0], v[1], v[2], static_cast<std::uint64_t>(v[3])});
        } else if (key == "noise_points") spec.noise_points = static_cast<std::uint64_t>(nums(1)[0]);
        else if (key == "noise_bbox") {
            const auto v = nums(4);
            spec.noise_min_lat = v[0];
            spec.noise_min_lon = v[1];
            spec.noise_max_lat = v[2];
            spec.noise_max_lon = v[3];
        } else if (key == "pings_per_trip") spec.pings_per_trip = static_cast<std::uint64_t>(nums(1)[0]);
        else if (key == "ping_interval_s") spec.ping_interval_s = static_cast<std::int64_t>(nums(1)[0]);
        else if (key == "intertrip_gap_s") spec.intertrip_gap_s = static_cast<std::int64_t>(nums(1)[0]);
        else if (key == "mode_mix") {
            const auto v = nums(3);
            spec.stay_frac = v[0];
            spec.walk_frac = v[1];
            spec.run_frac = v[2];
        } else if (key == "time_start") spec.time_start = static_cast<std::int64_t>(nums(1)[0]);
        else if (key == "time_end") spec.time_end = static_cast<std::int64_t>(nums(1)[0]);
        else if (key == "app_id") spec.app_id = val;
        else throw ConfigError("synth spec line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
    spec.validate();
    return spec;
}

void write_synth(const SynthResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_traces_csv((dir / "traces.csv").string(), result.traces);

    std::ofstream gp(dir / "gt_points.csv");
    if (!gp) throw InputError("cannot write gt_points.csv");
    gp << "point_index,blob_id\n";
    for (std::size_t i = 0; i < result.truth.point_blob.size(); ++i)
        gp << i << ',' << result.truth.point_blob[i] << "\n";

    std::ofstream gt(dir / "gt_trips.csv");
    if (!gt) throw InputError("cannot write gt_trips.csv");
    gt << "user_id,trip_index,planted_start,planted_end\n";
    for (const auto& t : result.truth.trips)
        gt << t.user_id << ',' << t.trip_index << ',' << t.start << ',' << t.end << "\n";
}

// ---------------------------------------------------------------- oracles

std::vector<double> oracle_shared(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals) {
    const std::size_t m = intervals.size();
    if (m > 10000) throw ConfigError("oracle_shared: too many intervals");
    std::vector<double> out(m, 0.0);
    if (m < 2) return out;
    for (std::size_t i = 0; i < m; ++i) {
        const auto [s, e] = intervals[i];
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const auto [sj, ej] = intervals[j];
            if (e == s) {
                if (sj <= s && s <= ej) sum += 1.0;
            } else {
                const std::int64_t ov = std::min(e, ej) - std::max(s, sj);
                if (ov > 0)
                    sum += std::min(1.0, static_cast<double>(ov) / static_cast<double>(e - s));
            }
        }
        out[i] = std::clamp(sum / static_cast<double>(m - 1), 0.0, 1.0);
    }
    return out;
}

double oracle_mst_prim(const std::vector<std::vector<double>>& weights) {
    const std::size_t n = weights.size();
    if (n < 2) throw ConfigError("oracle_mst_prim: need n >= 2");
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    in_tree[0] = true;
    for (std::size_t v = 1; v < n; ++v) best[v] = weights[0][v];
    double total = 0.0;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t u = 0;
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v] && best[v] < b) {
                b = best[v];
                u = v;
            }
        }
        total += b;
        in_tree[u] = true;
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v]) best[v] = std::min(best[v], weights[u][v]);
    }
    return total;
}

double oracle_mst_exhaustive(const std::vector<std::vector<double>>& weights) {
    const std::size_t n = weights.size();
    if (n < 2 || n > 8) throw ConfigError("oracle_mst_exhaustive: n must be in [2, 8]");
    if (n == 2) return weights[0][1];

    // Enumerate every labeled tree via its Pruefer sequence.
    std::vector<std::size_t> seq(n - 2, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        std::vector<int> deg(n, 1);
        for (const std::size_t s : seq) ++deg[s];
        double total = 0.0;
        std::vector<int> d = deg;
        for (const std::size_t s : seq) {
            std::size_t leaf = 0;
            while (d[leaf] != 1) ++leaf;
            total += weights[leaf][s];
            d[leaf] = 0;
            --d[s];
        }
        std::size_t a = 0;
        while (d[a] != 1) ++a;
        std::size_t b = a + 1;
        while (d[b] != 1) ++b;
        total += weights[a][b];
        best = std::min(best, total);

        std::size_t pos = 0;
        while (pos < seq.size() && seq[pos] == n - 1) {
            seq[pos] = 0;
            ++pos;
        }
        if (pos == seq.size()) break;
        ++seq[pos];
    }
    return best;
}

std::vector<double> oracle_core_distances(const std::vector<double>& xs,
                                          const std::vector<double>& ys, int k) {
    const std::size_t n = xs.size();
    if (k < 1 || static_cast<std::size_t>(k) > n - 1)
        throw ConfigError("oracle_core_distances: bad k");
    std::vector<double> out(n);
    std::vector<double> d2;
    for (std::size_t i = 0; i < n; ++i) {
        d2.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = xs[j] - xs[i];
            const double dy = ys[j] - ys[i];
            d2.push_back(dx * dx + dy * dy);
        }
        std::sort(d2.begin(), d2.end());
        out[i] = std::sqrt(d2[static_cast<std::size_t>(k) - 1]);
    }
    return out;
}

bool oracle_point_in_ring(const std::vector<LatLon>& ring, double lat, double lon) {
    // Winding number, (lon, lat) as (x, y); boundary points count as inside.
    auto is_left = [](const LatLon& a, const LatLon& b, double plat, double plon) {
        return (b.lon - a.lon) * (plat - a.lat) - (plon - a.lon) * (b.lat - a.lat);
    };
    int winding = 0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const LatLon& a = ring[i];
        const LatLon& b = ring[i + 1];
        const double left = is_left(a, b, lat, lon);
        if (left == 0.0 && std::min(a.lon, b.lon) <= lon && lon <= std::max(a.lon, b.lon) &&
            std::min(a.lat, b.lat) <= lat && lat <= std::max(a.lat, b.lat))
            return true;  // on the boundary
        if (a.lat <= lat) {
            if (b.lat > lat && left > 0.0) ++winding;
        } else {
            if (b.lat <= lat && left < 0.0) --winding;
        }
    }
    return winding != 0;
}

double adjusted_rand_index(const std::vector<std::int32_t>& a,
                           const std::vector<std::int32_t>& b) {
    if (a.size() != b.size())
        throw ConfigError("adjusted_rand_index: size mismatch");
    const double n = static_cast<double>(a.size());
    std::map<std::pair<std::int32_t, std::int32_t>, double> cont;
    std::map<std::int32_t, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cont[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [k, v] : cont) sum_ij += choose2(v);
    for (const auto& [k, v] : ra) sum_a += choose2(v);
    for (const auto& [k, v] : rb) sum_b += choose2(v);
    const double expected = sum_a * sum_b / choose2(n);
    const double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) return 1.0;
    return (sum_ij - expected) / (maximum - expected);
}

}  // namespace parkscan
