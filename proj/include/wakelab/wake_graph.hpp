// Directed wake-interaction graph used as model input.
//
// An edge i -> j exists when the two turbines are closer than eight rotor
// diameters and i is strictly upstream of j for the given wind direction.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wakelab/angles.hpp"
#include "wakelab/layout.hpp"

namespace wakelab {

struct WakeEdge {
    int src = 0;  // upstream turbine
    int dst = 0;  // downstream turbine
};

struct WakeGraph {
    int n_nodes = 0;
    std::vector<WakeEdge> edges;
    /// Per-edge (distance_norm, sin(rel_angle), cos(rel_angle)); rel_angle is
    /// the bearing src -> dst minus the wind direction.
    Eigen::MatrixXd edge_features;  // edges.size() x 3
};

inline WakeGraph build_wake_graph(const FarmLayout& layout, double wind_dir_deg) {
    const double reach = 8.0 * layout.rotor_diameter;
    // Pairs sitting exactly on the reach boundary (the diamond lattice has
    // them) must resolve the same way under rigid motion of the layout, so
    // the strict cutoff carries a relative guard band.
    const double cutoff = reach * (1.0 - 1e-12);
    const Eigen::Vector2d flow = flow_vector(wind_dir_deg);
    const int n = layout.n_turbines();

    WakeGraph g;
    g.n_nodes = n;
    std::vector<std::array<double, 3>> feats;
    for (int i = 0; i < n; ++i) {
        const double proj_i = layout.positions[i].dot(flow);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dist = (layout.positions[j] - layout.positions[i]).norm();
            if (dist >= cutoff) continue;
            if (!(proj_i < layout.positions[j].dot(flow))) continue;  // strictly upstream
            const double rel =
                wrap_angle(bearing_deg(layout.positions[i], layout.positions[j]) - wind_dir_deg);
            g.edges.push_back({i, j});
            feats.push_back({dist / reach, std::sin(rel * kDegToRad), std::cos(rel * kDegToRad)});
        }
    }
    g.edge_features.resize(static_cast<int>(feats.size()), 3);
    for (int e = 0; e < g.edge_features.rows(); ++e) {
        g.edge_features(e, 0) = feats[e][0];
        g.edge_features(e, 1) = feats[e][1];
        g.edge_features(e, 2) = feats[e][2];
    }
    return g;
}

/// Edge list regrouped for attention-style aggregation: per destination
/// node a contiguous run of entries holding one self-loop followed by the
/// incoming edges. Self-loop entries carry zero edge features.
struct GroupedWakeGraph {
    int n_nodes = 0;
    std::vector<int> entry_src;                       // source node per entry
    std::vector<std::pair<int, int>> node_ranges;     // [start, end) per node
    Eigen::MatrixXd entry_features;                   // entries x 3
};

inline GroupedWakeGraph group_by_destination(const WakeGraph& g) {
    GroupedWakeGraph out;
    out.n_nodes = g.n_nodes;
    std::vector<std::vector<int>> incoming(g.n_nodes);  // edge indices per destination
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        incoming[g.edges[e].dst].push_back(static_cast<int>(e));
    }
    const int total = static_cast<int>(g.edges.size()) + g.n_nodes;
    out.entry_src.reserve(total);
    out.node_ranges.resize(g.n_nodes);
    out.entry_features = Eigen::MatrixXd::Zero(total, 3);
    int cursor = 0;
    for (int v = 0; v < g.n_nodes; ++v) {
        const int start = cursor;
        out.entry_src.push_back(v);  // self-loop
        ++cursor;
        for (int e : incoming[v]) {
            out.entry_src.push_back(g.edges[e].src);
            out.entry_features.row(cursor) = g.edge_features.row(e);
            ++cursor;
        }
        out.node_ranges[v] = {start, cursor};
    }
    return out;
}

/// True when the edge set admits a topological order (no directed cycle).
inline bool is_acyclic(const WakeGraph& g) {
    std::vector<int> indeg(g.n_nodes, 0);
    std::vector<std::vector<int>> out(g.n_nodes);
    for (const auto& e : g.edges) {
        out[e.src].push_back(e.dst);
        ++indeg[e.dst];
    }
    std::vector<int> stack;
    for (int i = 0; i < g.n_nodes; ++i) {
        if (indeg[i] == 0) stack.push_back(i);
    }
    int seen = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++seen;
        for (int w : out[v]) {
            if (--indeg[w] == 0) stack.push_back(w);
        }
    }
    return seen == g.n_nodes;
}

}  // namespace wakelab
