#include "graphwatch/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace graphwatch {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

std::string entry(const char* kind, std::size_t i) {
    std::ostringstream os;
    os << kind << " entry " << i;
    return os.str();
}

}  // namespace

AttributedGraph make_attributed_graph(int node_count,
                                      std::vector<std::pair<int, int>> edges,
                                      Eigen::MatrixXd node_attrs,
                                      Eigen::MatrixXd edge_attrs) {
    if (node_count <= 0) fail("graph: node_count must be positive");
    if (node_attrs.rows() != node_count || node_attrs.cols() != 2)
        fail("graph: node_attrs must be node_count x 2");
    if (edge_attrs.rows() != static_cast<Eigen::Index>(edges.size()) || edge_attrs.cols() != 2)
        fail("graph: edge_attrs must be |E| x 2");

    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto& [u, v] = edges[i];
        if (u < 0 || u >= node_count || v < 0 || v >= node_count)
            fail(entry("edge", i) + ": vertex index out of range");
        if (u == v) fail(entry("edge", i) + ": self-loop");
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second) fail(entry("edge", i) + ": duplicate unordered pair");
        const double t = edge_attrs(static_cast<Eigen::Index>(i), kTravelTimeColumn);
        if (!(t > 0.0) || !std::isfinite(t))
            fail(entry("edge", i) + ": travel time must be positive and finite");
        const double b = edge_attrs(static_cast<Eigen::Index>(i), kBlockingColumn);
        if (b != 0.0 && b != 1.0 && b != 2.0 && b != 3.0)
            fail(entry("edge", i) + ": blocking level must be one of 0,1,2,3");
    }
    for (int i = 0; i < node_count; ++i) {
        const double role = node_attrs(i, kRoleColumn);
        const double inv = node_attrs(i, kInvolvementColumn);
        if (role != 0.0 && role != 1.0) fail(entry("node", i) + ": role must be 0 or 1");
        if (inv != 0.0 && inv != 1.0) fail(entry("node", i) + ": involvement must be 0 or 1");
    }

    AttributedGraph g;
    g.node_count = node_count;
    g.edges = std::move(edges);
    g.node_attrs = std::move(node_attrs);
    g.edge_attrs = std::move(edge_attrs);
    return g;
}

Topology parse_topology(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("topology: ") + e.what());
    }
    if (!doc.is_object()) fail("topology: root must be an object");
    if (!doc.contains("nodes") || !doc["nodes"].is_number_integer())
        fail("topology: missing integer field 'nodes'");
    if (!doc.contains("edges") || !doc["edges"].is_array())
        fail("topology: missing array field 'edges'");
    if (!doc.contains("ambulances") || !doc["ambulances"].is_array())
        fail("topology: missing array field 'ambulances'");

    Topology topo;
    topo.node_count = doc["nodes"].get<int>();
    if (topo.node_count <= 0) fail("topology: 'nodes' must be positive");

    std::set<std::pair<int, int>> seen;
    const auto& edge_arr = doc["edges"];
    for (std::size_t i = 0; i < edge_arr.size(); ++i) {
        const auto& e = edge_arr[i];
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
            !e[1].is_number_integer() || !e[2].is_number_integer())
            fail(entry("edge", i) + ": expected [u, v, class] integers");
        int u = e[0].get<int>();
        int v = e[1].get<int>();
        const int cls = e[2].get<int>();
        if (u < 0 || u >= topo.node_count || v < 0 || v >= topo.node_count)
            fail(entry("edge", i) + ": vertex index out of range");
        if (u == v) fail(entry("edge", i) + ": self-loop");
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second) fail(entry("edge", i) + ": duplicate unordered pair");
        if (cls != 1 && cls != 2 && cls != 3 && cls != 5)
            fail(entry("edge", i) + ": class must be one of 1,2,3,5");
        topo.edges.emplace_back(u, v);
        topo.edge_class.push_back(cls);
    }
    if (topo.edges.empty()) fail("topology: at least one edge required");

    std::set<int> amb;
    const auto& amb_arr = doc["ambulances"];
    for (std::size_t i = 0; i < amb_arr.size(); ++i) {
        if (!amb_arr[i].is_number_integer()) fail(entry("ambulance", i) + ": expected integer");
        const int a = amb_arr[i].get<int>();
        if (a < 0 || a >= topo.node_count) fail(entry("ambulance", i) + ": vertex index out of range");
        if (!amb.insert(a).second) fail(entry("ambulance", i) + ": duplicate station");
    }
    if (amb.empty()) fail("topology: at least one ambulance station required");
    topo.ambulance_nodes.assign(amb.begin(), amb.end());
    return topo;
}

Topology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("topology: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_topology(buf.str());
}

Eigen::MatrixXd base_node_attrs(const Topology& topo) {
    Eigen::MatrixXd attrs = Eigen::MatrixXd::Zero(topo.node_count, 2);
    for (int a : topo.ambulance_nodes) attrs(a, kRoleColumn) = 1.0;
    return attrs;
}

std::optional<PathResult> shortest_path(const AttributedGraph& g, int source, int target) {
    if (source < 0 || source >= g.node_count || target < 0 || target >= g.node_count)
        fail("shortest_path: vertex index out of range");

    struct Arc {
        int to;
        double weight;
    };
    std::vector<std::vector<Arc>> adj(g.node_count);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto [u, v] = g.edges[i];
        const double w = g.edge_attrs(static_cast<Eigen::Index>(i), kTravelTimeColumn);
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.node_count, kInf);
    std::vector<int> prev(g.node_count, -1);
    std::vector<bool> done(g.node_count, false);

    // (dist, vertex) min-heap; the vertex component makes ties deterministic.
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);

    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = true;
        if (u == target) break;
        for (const Arc& arc : adj[u]) {
            const double nd = d + arc.weight;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                prev[arc.to] = u;
                heap.emplace(nd, arc.to);
            }
        }
    }

    if (dist[target] == kInf) return std::nullopt;

    PathResult result;
    result.cost = dist[target];
    for (int v = target; v != -1; v = prev[v]) result.path.push_back(v);
    std::reverse(result.path.begin(), result.path.end());
    return result;
}

std::optional<DispatchResult> nearest_free_ambulance(const AttributedGraph& g, int patient) {
    if (patient < 0 || patient >= g.node_count)
        fail("nearest_free_ambulance: vertex index out of range");
    if (g.node_attrs(patient, kRoleColumn) != 0.0)
        fail("nearest_free_ambulance: node is not a patient");

    std::optional<DispatchResult> best;
    for (int v = 0; v < g.node_count; ++v) {
        if (g.node_attrs(v, kRoleColumn) != 1.0) continue;
        if (g.node_attrs(v, kInvolvementColumn) != 0.0) continue;
        auto sp = shortest_path(g, v, patient);
        if (!sp) continue;
        if (!best || sp->cost < best->cost) {
            best = DispatchResult{v, sp->cost, std::move(sp->path)};
        }
    }
    return best;
}

}  // namespace graphwatch
