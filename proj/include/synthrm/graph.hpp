#pragma once

#include <vector>

#include "synthrm/camera.hpp"
#include "synthrm/render.hpp"

namespace synthrm {

// View-overlap graph: nodes are sensing poses, edge weights are the IoU of
// the visible scene-triangle id sets. Symmetric, no self-loops.
struct SensingGraph {
    struct Edge {
        int i, j;
        double weight; // in [0, 1]
    };
    int node_count = 0;
    std::vector<Edge> edges;
    std::vector<int> communities; // per-node label, empty before detection

    void validate() const; // throws std::invalid_argument
};

constexpr double kMinOverlapWeight = 0.01;

SensingGraph build_sensing_graph(const std::vector<ViewBuffers>& views);

// Greedy weighted modularity maximization (Louvain-style multilevel) with a
// resolution parameter. Deterministic: nodes visited in id order, modularity
// ties broken toward the lower community id. Labels contiguous from 0 in
// first-appearance order.
std::vector<int> detect_communities(const SensingGraph& graph, double resolution = 1.0);

// Generalized modularity of a partition; shared by the optimizer and tests.
double modularity(const SensingGraph& graph, const std::vector<int>& labels,
                  double resolution = 1.0);

} // namespace synthrm
