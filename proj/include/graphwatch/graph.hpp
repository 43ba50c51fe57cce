#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace graphwatch {

// Node attribute columns.
inline constexpr int kRoleColumn = 0;         // 0 patient, 1 ambulance
inline constexpr int kInvolvementColumn = 1;  // 0 free / uninvolved, 1 involved

// Edge attribute columns.
inline constexpr int kTravelTimeColumn = 0;  // minutes, > 0
inline constexpr int kBlockingColumn = 1;    // road-blocking level 0..3

// Immutable snapshot of the road network: undirected simple graph plus dense
// node and edge attribute matrices. Construct via make_attributed_graph so the
// invariants below are checked once; afterwards the value is safe to share
// across threads.
struct AttributedGraph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;  // canonical u < v
    Eigen::MatrixXd node_attrs;              // node_count x 2
    Eigen::MatrixXd edge_attrs;              // edges.size() x 2
};

// Validates and canonicalizes (sorts each pair as u < v). Throws
// std::invalid_argument naming the offending node or edge entry.
AttributedGraph make_attributed_graph(int node_count,
                                      std::vector<std::pair<int, int>> edges,
                                      Eigen::MatrixXd node_attrs,
                                      Eigen::MatrixXd edge_attrs);

// Static road-network description: which roads exist, their nominal expected
// travel-time class in minutes (one of 1, 2, 3, 5) and where the ambulance
// stations sit. Realized travel times live in AttributedGraph, not here.
struct Topology {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> edge_class;
    std::vector<int> ambulance_nodes;

    int patient_count() const { return node_count - static_cast<int>(ambulance_nodes.size()); }
};

// Parses a JSON topology file ({version, nodes, edges: [[u,v,class],...],
// ambulances: [...]}) and validates it. Malformed entries are reported with
// their position in the file.
Topology load_topology(const std::string& path);
Topology parse_topology(const std::string& json_text);

// Role matrix implied by a topology: all zeros except Role = 1 at the stations.
Eigen::MatrixXd base_node_attrs(const Topology& topo);

struct PathResult {
    std::vector<int> path;  // source first, target last
    double cost = 0.0;      // sum of travel times along path
};

// Minimum-travel-time path using edge_attrs column 0 as weights. Dijkstra with
// lower-vertex-index tie-breaking; returns nullopt when target is unreachable.
std::optional<PathResult> shortest_path(const AttributedGraph& g, int source, int target);

struct DispatchResult {
    int station = -1;
    double cost = 0.0;
    std::vector<int> path;
};

// Closest station with Role = 1 and Involvement = 0, by shortest-path cost;
// ties resolve to the lower station index. nullopt when every station is busy.
std::optional<DispatchResult> nearest_free_ambulance(const AttributedGraph& g, int patient);

}  // namespace graphwatch
