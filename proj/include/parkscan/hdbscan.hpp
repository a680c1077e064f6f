#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "parkscan/geo.hpp"
#include "parkscan/types.hpp"

namespace parkscan {

struct ProjectedPoint {
    double x = 0.0;  // meters east of reference origin
    double y = 0.0;  // meters north of reference origin
    std::size_t source_index = 0;
};

struct ClusterParams {
    int min_pts = 15;            // core-distance neighbor count
    int min_cluster_size = 100;  // min_C
};

struct MstEdge {
    std::int32_t a = 0;
    std::int32_t b = 0;
    double weight = 0.0;  // mutual-reachability meters
};

/// Single-linkage merge over mutual-reachability MST edges. Component ids:
/// leaves 0..n-1, merge i creates component n+i.
struct DendrogramMerge {
    std::int32_t left = 0;
    std::int32_t right = 0;
    double distance = 0.0;
    std::int32_t size = 0;  // size of the merged component
};

/// One condensed-tree edge: a child (cluster id >= n_points, or a point)
/// departing its parent cluster at the given lambda = 1/distance.
struct CondensedNode {
    std::int32_t parent = 0;
    std::int32_t child = 0;
    double lambda = 0.0;
    std::int32_t child_size = 1;
};

struct CondensedTree {
    std::int32_t n_points = 0;
    std::int32_t root = 0;  // == n_points
    std::int32_t next_cluster_id = 0;
    std::vector<CondensedNode> nodes;
};

struct ClusterModel {
    std::vector<std::int32_t> labels;  // -1 noise, else 0..K-1
    std::vector<double> stabilities;   // per selected cluster, by label
    ClusterParams params;
    std::int32_t n_clusters = 0;
};

/// Project traces about their centroid; bijective with source indices.
std::vector<ProjectedPoint> project(const std::vector<TraceRecord>& traces,
                                    Projection* proj_out = nullptr);

/// Euclidean distance to the k-th nearest neighbor (self excluded) for
/// every point. Parallel over points; results independent of thread count.
std::vector<double> core_distances(const std::vector<ProjectedPoint>& points, int k);

double mutual_reachability(const std::vector<ProjectedPoint>& points,
                           const std::vector<double>& cores,
                           std::size_t a, std::size_t b);

/// Minimum spanning tree of the complete mutual-reachability graph
/// (dense Prim; the inner scan is the parallel kernel). Edges returned in
/// nondecreasing weight order.
std::vector<MstEdge> build_mst(const std::vector<ProjectedPoint>& points,
                               const std::vector<double>& cores);

std::vector<DendrogramMerge> build_hierarchy(const std::vector<MstEdge>& sorted_edges,
                                             std::size_t n_points);

CondensedTree condense_tree(const std::vector<DendrogramMerge>& merges,
                            std::size_t n_points, int min_cluster_size);

/// Excess-of-mass flat-cluster extraction over the condensed tree.
ClusterModel extract_clusters(const CondensedTree& tree, const ClusterParams& params);

/// Full composition: core distances -> MST -> hierarchy -> condense -> extract.
ClusterModel cluster(const std::vector<ProjectedPoint>& points, const ClusterParams& params);

void write_assignments_csv(const std::string& path,
                           const std::vector<TraceRecord>& traces,
                           const ClusterModel& model);
void write_clusters_geojson(const std::string& path,
                            const std::vector<ProjectedPoint>& points,
                            const ClusterModel& model, const Projection& proj);

}  // namespace parkscan
