#include "parkscan/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "parkscan/errors.hpp"
#include "parkscan/io_util.hpp"
#include "parkscan/kdtree.hpp"

namespace parkscan {

namespace {

// Distances below this are clamped before taking lambda = 1/distance, so
// exact duplicate points keep lambdas finite.
constexpr double kMinSplitDistance = 1e-12;

double to_lambda(double distance) {
    return 1.0 / std::max(distance, kMinSplitDistance);
}

void soa(const std::vector<ProjectedPoint>& points, std::vector<double>& xs,
         std::vector<double>& ys) {
    xs.resize(points.size());
    ys.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
}

}  // namespace

std::vector<ProjectedPoint> project(const std::vector<TraceRecord>& traces,
                                    Projection* proj_out) {
    const Projection proj = centroid_projection(traces);
    if (proj_out) *proj_out = proj;
    std::vector<ProjectedPoint> out(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        proj.to_xy(traces[i].lat, traces[i].lon, out[i].x, out[i].y);
        out[i].source_index = i;
    }
    return out;
}

std::vector<double> core_distances(const std::vector<ProjectedPoint>& points, int k) {
    const std::size_t n = points.size();
    if (k < 1 || static_cast<std::size_t>(k) > n - 1)
        throw ConfigError("core_distances: k must be in [1, n-1], got k=" +
                          std::to_string(k) + " n=" + std::to_string(n));
    std::vector<double> xs, ys;
    soa(points, xs, ys);
    const KdTree2 tree(xs, ys);
    std::vector<double> cores(n);
    const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < ni; ++i) {
        cores[i] = std::sqrt(tree.kth_neighbor_dist2(static_cast<std::size_t>(i),
                                                     static_cast<std::size_t>(k)));
    }
    return cores;
}

double mutual_reachability(const std::vector<ProjectedPoint>& points,
                           const std::vector<double>& cores,
                           std::size_t a, std::size_t b) {
    const double dx = points[a].x - points[b].x;
    const double dy = points[a].y - points[b].y;
    const double d = std::sqrt(dx * dx + dy * dy);
    return std::max({d, cores[a], cores[b]});
}

std::vector<MstEdge> build_mst(const std::vector<ProjectedPoint>& points,
                               const std::vector<double>& cores) {
    const std::size_t n = points.size();
    if (n < 2) throw ConfigError("build_mst: need at least 2 points");
    std::vector<double> xs, ys;
    soa(points, xs, ys);
    std::vector<double> c2(n);
    for (std::size_t i = 0; i < n; ++i) c2[i] = cores[i] * cores[i];

    // Dense Prim over the implicit complete graph, squared mutual-
    // reachability weights, with the frontier compacted as vertices join.
    std::vector<std::int32_t> active(n - 1);
    std::vector<std::int32_t> parent(n - 1, 0);
    std::vector<double> dist2(n - 1, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < n; ++i) active[i] = static_cast<std::int32_t>(i + 1);

    std::vector<MstEdge> edges;
    edges.reserve(n - 1);
    std::int32_t u = 0;
    std::size_t m = n - 1;
    while (m > 0) {
        const double ux = xs[u], uy = ys[u], uc2 = c2[u];
        double best = std::numeric_limits<double>::infinity();
        std::int64_t best_i = -1;
        std::int32_t best_id = std::numeric_limits<std::int32_t>::max();
        const std::int64_t mi = static_cast<std::int64_t>(m);
#pragma omp parallel
        {
            double tbest = std::numeric_limits<double>::infinity();
            std::int64_t tbest_i = -1;
            std::int32_t tbest_id = std::numeric_limits<std::int32_t>::max();
#pragma omp for schedule(static) nowait
            for (std::int64_t i = 0; i < mi; ++i) {
                const std::int32_t v = active[i];
                const double dx = xs[v] - ux;
                const double dy = ys[v] - uy;
                double d2 = dx * dx + dy * dy;
                d2 = std::max(d2, std::max(uc2, c2[v]));
                if (d2 < dist2[i]) {
                    dist2[i] = d2;
                    parent[i] = u;
                }
                const double dv = dist2[i];
                if (dv < tbest || (dv == tbest && v < tbest_id)) {
                    tbest = dv;
                    tbest_i = i;
                    tbest_id = v;
                }
            }
#pragma omp critical
            {
                if (tbest < best || (tbest == best && tbest_id < best_id)) {
                    best = tbest;
                    best_i = tbest_i;
                    best_id = tbest_id;
                }
            }
        }
        const std::int32_t v = active[best_i];
        std::int32_t a = parent[best_i];
        std::int32_t b = v;
        if (a > b) std::swap(a, b);
        edges.push_back({a, b, std::sqrt(best)});
        u = v;
        --m;
        active[best_i] = active[m];
        parent[best_i] = parent[m];
        dist2[best_i] = dist2[m];
    }

    std::sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) {
        if (x.weight != y.weight) return x.weight < y.weight;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return edges;
}

std::vector<DendrogramMerge> build_hierarchy(const std::vector<MstEdge>& sorted_edges,
                                             std::size_t n_points) {
    std::vector<std::int32_t> uf(n_points);
    std::vector<std::int32_t> comp(n_points);  // component id per union-find root
    std::vector<std::int32_t> size(n_points, 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        uf[i] = static_cast<std::int32_t>(i);
        comp[i] = static_cast<std::int32_t>(i);
    }
    auto find = [&](std::int32_t x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };

    std::vector<DendrogramMerge> merges;
    merges.reserve(sorted_edges.size());
    for (std::size_t i = 0; i < sorted_edges.size(); ++i) {
        const MstEdge& e = sorted_edges[i];
        std::int32_t ra = find(e.a);
        std::int32_t rb = find(e.b);
        if (ra == rb) throw std::logic_error("build_hierarchy: edge within one component");
        std::int32_t la = comp[ra];
        std::int32_t lb = comp[rb];
        if (la > lb) std::swap(la, lb);
        const std::int32_t merged = size[ra] + size[rb];
        merges.push_back({la, lb, e.weight, merged});
        if (size[ra] < size[rb]) std::swap(ra, rb);
        uf[rb] = ra;
        size[ra] = merged;
        comp[ra] = static_cast<std::int32_t>(n_points + i);
    }
    return merges;
}

namespace {

struct DendroView {
    std::size_t n = 0;
    const std::vector<DendrogramMerge>* merges = nullptr;

    std::int32_t left(std::int32_t node) const {
        return (*merges)[node - static_cast<std::int32_t>(n)].left;
    }
    std::int32_t right(std::int32_t node) const {
        return (*merges)[node - static_cast<std::int32_t>(n)].right;
    }
    double distance(std::int32_t node) const {
        return (*merges)[node - static_cast<std::int32_t>(n)].distance;
    }
    std::int32_t size(std::int32_t node) const {
        if (node < static_cast<std::int32_t>(n)) return 1;
        return (*merges)[node - static_cast<std::int32_t>(n)].size;
    }
    bool leaf(std::int32_t node) const { return node < static_cast<std::int32_t>(n); }

    void collect_leaves(std::int32_t node, std::vector<std::int32_t>& out) const {
        std::vector<std::int32_t> stack{node};
        while (!stack.empty()) {
            const std::int32_t cur = stack.back();
            stack.pop_back();
            if (leaf(cur)) {
                out.push_back(cur);
            } else {
                stack.push_back(right(cur));
                stack.push_back(left(cur));
            }
        }
    }
};

}  // namespace

CondensedTree condense_tree(const std::vector<DendrogramMerge>& merges,
                            std::size_t n_points, int min_cluster_size) {
    if (min_cluster_size < 2) throw ConfigError("condense_tree: min_cluster_size < 2");
    CondensedTree tree;
    tree.n_points = static_cast<std::int32_t>(n_points);
    tree.root = tree.n_points;
    tree.next_cluster_id = tree.n_points + 1;
    if (merges.empty()) return tree;

    const DendroView dv{n_points, &merges};
    const std::int32_t dendro_root = static_cast<std::int32_t>(2 * n_points - 2);
    std::vector<std::int32_t> relabel(2 * n_points - 1, -1);
    relabel[dendro_root] = tree.root;

    std::deque<std::int32_t> queue{dendro_root};
    std::vector<std::int32_t> leaves;
    while (!queue.empty()) {
        const std::int32_t node = queue.front();
        queue.pop_front();
        const std::int32_t cluster = relabel[node];
        const std::int32_t l = dv.left(node);
        const std::int32_t r = dv.right(node);
        const double lambda = to_lambda(dv.distance(node));
        const std::int32_t sl = dv.size(l);
        const std::int32_t sr = dv.size(r);
        const bool big_l = sl >= min_cluster_size;
        const bool big_r = sr >= min_cluster_size;

        auto fall_out = [&](std::int32_t side) {
            leaves.clear();
            dv.collect_leaves(side, leaves);
            for (const std::int32_t p : leaves)
                tree.nodes.push_back({cluster, p, lambda, 1});
        };
        auto descend_same = [&](std::int32_t side) {
            if (!dv.leaf(side)) {
                relabel[side] = cluster;
                queue.push_back(side);
            } else {
                // A big side can't be a leaf (min_cluster_size >= 2);
                // this branch is unreachable but kept total.
                tree.nodes.push_back({cluster, side, lambda, 1});
            }
        };

        if (big_l && big_r) {
            for (const std::int32_t side : {l, r}) {
                const std::int32_t child = tree.next_cluster_id++;
                tree.nodes.push_back({cluster, child, lambda, dv.size(side)});
                if (!dv.leaf(side)) {
                    relabel[side] = child;
                    queue.push_back(side);
                }
            }
        } else if (big_l) {
            fall_out(r);
            descend_same(l);
        } else if (big_r) {
            fall_out(l);
            descend_same(r);
        } else {
            // The cluster dissolves: everything below departs here.
            fall_out(l);
            fall_out(r);
        }
    }
    return tree;
}

ClusterModel extract_clusters(const CondensedTree& tree, const ClusterParams& params) {
    const std::int32_t n = tree.n_points;
    ClusterModel model;
    model.params = params;
    model.labels.assign(n, -1);
    if (n < params.min_cluster_size) return model;

    const std::int32_t n_clusters = tree.next_cluster_id - n;
    auto cid = [&](std::int32_t cluster) { return cluster - n; };

    std::vector<double> birth(n_clusters, 0.0);
    std::vector<double> stability(n_clusters, 0.0);
    std::vector<std::vector<std::int32_t>> cluster_children(n_clusters);
    std::vector<std::vector<std::int32_t>> point_children(n_clusters);
    std::vector<std::vector<std::pair<std::int32_t, double>>> point_lambdas(n_clusters);

    for (const auto& node : tree.nodes) {
        if (node.child >= n) {
            birth[cid(node.child)] = node.lambda;
            cluster_children[cid(node.parent)].push_back(node.child);
        } else {
            point_children[cid(node.parent)].push_back(node.child);
            point_lambdas[cid(node.parent)].push_back({node.child, node.lambda});
        }
    }
    for (const auto& node : tree.nodes)
        stability[cid(node.parent)] +=
            (node.lambda - birth[cid(node.parent)]) * node.child_size;

    // Excess-of-mass selection, leaves first (child cluster ids exceed
    // their parent's by construction). Ties prefer the parent.
    std::vector<bool> selected(n_clusters, false);
    std::vector<double> subtree_stab(n_clusters, 0.0);
    for (std::int32_t c = n_clusters - 1; c >= 0; --c) {
        double child_sum = 0.0;
        for (const std::int32_t ch : cluster_children[c]) child_sum += subtree_stab[cid(ch)];
        if (stability[c] >= child_sum) {
            selected[c] = true;
            subtree_stab[c] = stability[c];
        } else {
            subtree_stab[c] = child_sum;
        }
    }

    // Keep only selections with no selected ancestor.
    std::vector<std::int32_t> final_clusters;
    std::deque<std::int32_t> queue{tree.root};
    while (!queue.empty()) {
        const std::int32_t c = queue.front();
        queue.pop_front();
        if (selected[cid(c)]) {
            final_clusters.push_back(c);
        } else {
            for (const std::int32_t ch : cluster_children[cid(c)]) queue.push_back(ch);
        }
    }

    auto subtree_points = [&](std::int32_t cluster, bool gate_direct_root_points,
                              double lambda_threshold) {
        std::vector<std::int32_t> pts;
        std::vector<std::int32_t> stack{cluster};
        while (!stack.empty()) {
            const std::int32_t c = stack.back();
            stack.pop_back();
            if (gate_direct_root_points && c == tree.root) {
                for (const auto& [p, lam] : point_lambdas[cid(c)])
                    if (lam >= lambda_threshold) pts.push_back(p);
            } else {
                for (const std::int32_t p : point_children[cid(c)]) pts.push_back(p);
            }
            for (const std::int32_t ch : cluster_children[cid(c)]) stack.push_back(ch);
        }
        return pts;
    };

    std::vector<std::vector<std::int32_t>> members;
    if (final_clusters.size() == 1 && final_clusters[0] == tree.root) {
        // Whole data set as one cluster: keep only the mass that persists
        // to the densest level observed directly under the root, and demand
        // density contrast between that level and the first departure so
        // near-uniform data stays noise while a genuine blob survives.
        // Degenerate zero-diameter mass (persisting below micrometer scale,
        // where the lambda clamp already abandons scale-freeness) is always
        // dense enough to keep.
        constexpr double kRootSelectionContrast = 2.0;
        constexpr double kDegenerateLambda = 1e6;
        double thresh = 0.0;
        double first = std::numeric_limits<double>::infinity();
        for (const auto& node : tree.nodes) {
            if (node.parent == tree.root) {
                thresh = std::max(thresh, node.lambda);
                first = std::min(first, node.lambda);
            }
        }
        auto pts = subtree_points(tree.root, true, thresh);
        const bool dense_enough =
            static_cast<std::int32_t>(pts.size()) >= params.min_cluster_size;
        const bool contrasted = cluster_children[cid(tree.root)].empty()
                                    ? (thresh >= kRootSelectionContrast * first ||
                                       thresh >= kDegenerateLambda)
                                    : true;
        if (dense_enough && contrasted)
            members.push_back(std::move(pts));
        else
            final_clusters.clear();
    } else {
        for (const std::int32_t c : final_clusters)
            members.push_back(subtree_points(c, false, 0.0));
    }

    // Dense labels by decreasing size, ties by smallest member point index.
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::int32_t> min_member(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        min_member[i] = *std::min_element(members[i].begin(), members[i].end());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (members[a].size() != members[b].size())
            return members[a].size() > members[b].size();
        return min_member[a] < min_member[b];
    });

    model.n_clusters = static_cast<std::int32_t>(order.size());
    model.stabilities.resize(order.size());
    for (std::size_t label = 0; label < order.size(); ++label) {
        const std::size_t i = order[label];
        for (const std::int32_t p : members[i])
            model.labels[p] = static_cast<std::int32_t>(label);
        model.stabilities[label] =
            final_clusters.empty() ? 0.0 : stability[cid(final_clusters[i])];
    }
    return model;
}

ClusterModel cluster(const std::vector<ProjectedPoint>& points, const ClusterParams& params) {
    if (params.min_pts < 1 || params.min_cluster_size < 2)
        throw ConfigError("cluster: invalid parameters");
    const std::size_t n = points.size();
    ClusterModel model;
    model.params = params;
    if (n < static_cast<std::size_t>(params.min_cluster_size) ||
        n < static_cast<std::size_t>(params.min_pts) + 1) {
        model.labels.assign(n, -1);
        return model;
    }
    const auto cores = core_distances(points, params.min_pts);
    const auto edges = build_mst(points, cores);
    const auto merges = build_hierarchy(edges, n);
    const auto tree = condense_tree(merges, n, params.min_cluster_size);
    return extract_clusters(tree, params);
}

void write_assignments_csv(const std::string& path,
                           const std::vector<TraceRecord>& traces,
                           const ClusterModel& model) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "point_index,user_id,timestamp,cluster_label\n";
    for (std::size_t i = 0; i < traces.size(); ++i) {
        out << i << ',' << traces[i].user_id << ',' << traces[i].timestamp << ','
            << model.labels[i] << "\n";
    }
}

void write_clusters_geojson(const std::string& path,
                            const std::vector<ProjectedPoint>& points,
                            const ClusterModel& model, const Projection& proj) {
    std::vector<double> xs, ys;
    soa(points, xs, ys);
    nlohmann::json features = nlohmann::json::array();
    for (std::int32_t k = 0; k < model.n_clusters; ++k) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (model.labels[i] == k) idx.push_back(i);
        const auto hull = convex_hull(xs, ys, idx);
        nlohmann::json ring = nlohmann::json::array();
        for (const std::size_t h : hull) {
            double lat, lon;
            proj.to_latlon(xs[h], ys[h], lat, lon);
            ring.push_back({lon, lat});
        }
        if (!hull.empty()) {
            double lat, lon;
            proj.to_latlon(xs[hull[0]], ys[hull[0]], lat, lon);
            ring.push_back({lon, lat});  // close the ring
        }
        nlohmann::json feature = {
            {"type", "Feature"},
            {"properties",
             {{"cluster_id", k},
              {"size", idx.size()},
              {"stability", model.stabilities[k]}}},
            {"geometry",
             {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}}}};
        features.push_back(std::move(feature));
    }
    nlohmann::json fc = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << fc.dump(2) << "\n";
}

}  // namespace parkscan
