// Compares the spatial-index / OpenMP kernels against their brute-force
// serial references on synthetic point sets.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "parkscan/hdbscan.hpp"
#include "parkscan/synth.hpp"

using namespace parkscan;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ProjectedPoint> random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto u = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<ProjectedPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {u() * 4000.0 - 2000.0, u() * 4000.0 - 2000.0, i};
    }
    return pts;
}

double serial_prim_total(const std::vector<ProjectedPoint>& pts,
                         const std::vector<double>& cores) {
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            w[i][j] = w[j][i] = mutual_reachability(pts, cores, i, j);
    return oracle_mst_prim(w);
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? static_cast<std::size_t>(std::atoll(argv[1])) : 20000;
    const int k = 15;
    std::printf("n=%zu k=%d\n", n, k);
    const auto pts = random_points(n, 7);

    auto t0 = std::chrono::steady_clock::now();
    const auto cores = core_distances(pts, k);
    const double t_kd = seconds_since(t0);

    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = pts[i].x;
        ys[i] = pts[i].y;
    }
    t0 = std::chrono::steady_clock::now();
    const auto cores_brute = oracle_core_distances(xs, ys, k);
    const double t_brute = seconds_since(t0);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_diff = std::max(max_diff, std::abs(cores[i] - cores_brute[i]));
    std::printf("core_distances   kd-tree(parallel) %8.3fs  brute(serial) %8.3fs  max|diff|=%g\n",
                t_kd, t_brute, max_diff);

    t0 = std::chrono::steady_clock::now();
    const auto edges = build_mst(pts, cores);
    const double t_mst = seconds_since(t0);
    double total = 0.0;
    for (const auto& e : edges) total += e.weight;

    // The dense-matrix reference is quadratic in memory; cap it.
    if (n <= 20000) {
        t0 = std::chrono::steady_clock::now();
        const double ref = serial_prim_total(pts, cores);
        const double t_ref = seconds_since(t0);
        std::printf("build_mst        fused(parallel)   %8.3fs  matrix(serial) %8.3fs  |dW|=%g\n",
                    t_mst, t_ref, std::abs(total - ref));
    } else {
        std::printf("build_mst        fused(parallel)   %8.3fs  total=%.3f\n", t_mst, total);
    }
    return 0;
}
