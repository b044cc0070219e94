#include "synthrm/graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace synthrm {

void SensingGraph::validate() const {
    for (const auto& e : edges) {
        if (e.i < 0 || e.i >= node_count || e.j < 0 || e.j >= node_count)
            throw std::invalid_argument("sensing graph: edge endpoint out of range");
        if (e.i == e.j) throw std::invalid_argument("sensing graph: self-loop");
        if (e.weight < 0 || e.weight > 1)
            throw std::invalid_argument("sensing graph: weight outside [0,1]");
    }
}

SensingGraph build_sensing_graph(const std::vector<ViewBuffers>& views) {
    if (views.empty()) throw std::invalid_argument("build_sensing_graph: need at least one view");
    const int n = (int)views.size();
    std::vector<std::unordered_set<int32_t>> visible(n);
    for (int i = 0; i < n; ++i)
        for (int32_t id : views[i].triangle_id.data)
            if (id >= 0) visible[i].insert(id);

    SensingGraph g;
    g.node_count = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            size_t inter = 0;
            const auto& small = visible[i].size() <= visible[j].size() ? visible[i] : visible[j];
            const auto& big = visible[i].size() <= visible[j].size() ? visible[j] : visible[i];
            for (int32_t id : small)
                if (big.count(id)) ++inter;
            size_t uni = visible[i].size() + visible[j].size() - inter;
            if (uni == 0) continue;
            double w = (double)inter / (double)uni;
            if (w >= kMinOverlapWeight) g.edges.push_back({i, j, w});
        }
    return g;
}

double modularity(const SensingGraph& graph, const std::vector<int>& labels, double resolution) {
    if ((int)labels.size() != graph.node_count)
        throw std::invalid_argument("modularity: label count mismatch");
    double two_m = 0.0;
    std::vector<double> strength(graph.node_count, 0.0);
    for (const auto& e : graph.edges) {
        strength[e.i] += e.weight;
        strength[e.j] += e.weight;
        two_m += 2 * e.weight;
    }
    if (two_m == 0) return 0.0;

    std::map<int, double> internal, total;
    for (const auto& e : graph.edges)
        if (labels[e.i] == labels[e.j]) internal[labels[e.i]] += 2 * e.weight;
    for (int i = 0; i < graph.node_count; ++i) total[labels[i]] += strength[i];

    double q = 0.0;
    for (const auto& [c, tot] : total) {
        double in = internal.count(c) ? internal[c] : 0.0;
        q += in / two_m - resolution * (tot / two_m) * (tot / two_m);
    }
    return q;
}

namespace {

struct WeightedGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj; // neighbor, weight
    std::vector<double> self_loop;                        // full loop weight
};

// One local-moving phase in node id order; ties go to the lower community.
bool local_move(const WeightedGraph& g, double resolution, std::vector<int>& comm) {
    double two_m = 0.0;
    std::vector<double> strength(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) {
        for (auto& [j, w] : g.adj[i]) strength[i] += w;
        strength[i] += 2 * g.self_loop[i];
        two_m += strength[i];
    }
    if (two_m == 0) return false;

    std::vector<double> comm_total(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) comm_total[comm[i]] += strength[i];

    bool moved = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 0; i < g.n; ++i) {
            const int c0 = comm[i];
            comm_total[c0] -= strength[i];
            std::map<int, double> links;
            links[c0] += 0.0;
            for (auto& [j, w] : g.adj[i]) links[comm[j]] += w;

            int best = c0;
            double best_gain = -1e300;
            for (auto& [c, w] : links) {
                double gain = w - resolution * strength[i] * comm_total[c] / two_m;
                if (gain > best_gain + 1e-12 || (gain >= best_gain - 1e-12 && c < best)) {
                    best_gain = gain;
                    best = c;
                }
            }
            comm_total[best] += strength[i];
            if (best != c0) {
                comm[i] = best;
                improved = true;
                moved = true;
            }
        }
    }
    return moved;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& comm,
                        std::vector<int>& remap) {
    remap.assign(g.n, -1);
    int next = 0;
    for (int i = 0; i < g.n; ++i)
        if (remap[comm[i]] == -1) remap[comm[i]] = next++;

    WeightedGraph out;
    out.n = next;
    out.adj.resize(next);
    out.self_loop.assign(next, 0.0);
    std::vector<std::unordered_map<int, double>> acc(next);
    for (int i = 0; i < g.n; ++i) {
        int ci = remap[comm[i]];
        out.self_loop[ci] += g.self_loop[i];
        for (auto& [j, w] : g.adj[i]) {
            int cj = remap[comm[j]];
            if (ci == cj)
                out.self_loop[ci] += w * 0.5; // undirected edge seen from both ends
            else
                acc[ci][cj] += w;
        }
    }
    for (int c = 0; c < next; ++c) {
        std::vector<std::pair<int, double>> row(acc[c].begin(), acc[c].end());
        std::sort(row.begin(), row.end());
        out.adj[c] = std::move(row);
    }
    return out;
}

} // namespace

std::vector<int> detect_communities(const SensingGraph& graph, double resolution) {
    graph.validate();
    if (resolution <= 0) throw std::invalid_argument("detect_communities: resolution must be > 0");
    const int n = graph.node_count;
    if (n == 0) return {};

    WeightedGraph cur;
    cur.n = n;
    cur.adj.resize(n);
    cur.self_loop.assign(n, 0.0);
    for (const auto& e : graph.edges) {
        cur.adj[e.i].push_back({e.j, e.weight});
        cur.adj[e.j].push_back({e.i, e.weight});
    }
    for (auto& row : cur.adj) std::sort(row.begin(), row.end());

    std::vector<int> membership(n);
    for (int i = 0; i < n; ++i) membership[i] = i;

    for (;;) {
        std::vector<int> comm(cur.n);
        for (int i = 0; i < cur.n; ++i) comm[i] = i;
        if (!local_move(cur, resolution, comm)) break;
        std::vector<int> remap;
        WeightedGraph next = aggregate(cur, comm, remap);
        for (int i = 0; i < n; ++i) membership[i] = remap[comm[membership[i]]];
        if (next.n == cur.n) break;
        cur = std::move(next);
    }

    // Contiguous labels in first-appearance order.
    std::unordered_map<int, int> relabel;
    std::vector<int> out(n);
    int next_label = 0;
    for (int i = 0; i < n; ++i) {
        auto it = relabel.find(membership[i]);
        if (it == relabel.end()) it = relabel.emplace(membership[i], next_label++).first;
        out[i] = it->second;
    }
    return out;
}

} // namespace synthrm
