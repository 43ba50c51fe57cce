#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "graphwatch/graph.hpp"
#include "graphwatch/rng.hpp"

#include <cmath>
#include <limits>
#include <optional>

using namespace graphwatch;

namespace {

AttributedGraph make_graph(int nodes, const std::vector<std::tuple<int, int, double>>& weighted_edges,
                           const std::vector<int>& stations = {},
                           const std::vector<int>& busy = {}) {
    std::vector<std::pair<int, int>> edges;
    Eigen::MatrixXd edge_attrs(static_cast<Eigen::Index>(weighted_edges.size()), 2);
    for (std::size_t i = 0; i < weighted_edges.size(); ++i) {
        const auto& [u, v, w] = weighted_edges[i];
        edges.emplace_back(u, v);
        edge_attrs(static_cast<Eigen::Index>(i), 0) = w;
        edge_attrs(static_cast<Eigen::Index>(i), 1) = 0.0;
    }
    Eigen::MatrixXd node_attrs = Eigen::MatrixXd::Zero(nodes, 2);
    for (int s : stations) node_attrs(s, kRoleColumn) = 1.0;
    for (int b : busy) node_attrs(b, kInvolvementColumn) = 1.0;
    return make_attributed_graph(nodes, edges, node_attrs, edge_attrs);
}

// Exhaustive minimum over all simple paths, accumulating the cost left to
// right from the source so float sums are comparable with Dijkstra's.
struct BruteForce {
    const AttributedGraph& g;
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<bool> visited;
    double best = std::numeric_limits<double>::infinity();

    explicit BruteForce(const AttributedGraph& graph) : g(graph), adj(graph.node_count) {
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            const auto [u, v] = g.edges[i];
            const double w = g.edge_attrs(static_cast<Eigen::Index>(i), kTravelTimeColumn);
            adj[u].emplace_back(v, w);
            adj[v].emplace_back(u, w);
        }
    }

    void dfs(int u, int target, double cost) {
        if (u == target) {
            if (cost < best) best = cost;
            return;
        }
        visited[u] = true;
        for (const auto& [v, w] : adj[u])
            if (!visited[v]) dfs(v, target, cost + w);
        visited[u] = false;
    }

    std::optional<double> min_cost(int source, int target) {
        visited.assign(g.node_count, false);
        best = std::numeric_limits<double>::infinity();
        dfs(source, target, 0.0);
        if (std::isinf(best)) return std::nullopt;
        return best;
    }
};

AttributedGraph random_graph(Rng& rng) {
    const int n = static_cast<int>(rng.uniform_int(2, 8));
    std::vector<std::tuple<int, int, double>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform01() < 0.4) edges.emplace_back(u, v, rng.uniform(0.1, 5.0));
    if (edges.empty()) edges.emplace_back(0, 1, rng.uniform(0.1, 5.0));
    return make_graph(n, edges);
}

AttributedGraph shipped_topology_graph() {
    const Topology topo = load_topology("configs/topology.json");
    Eigen::MatrixXd edge_attrs(static_cast<Eigen::Index>(topo.edges.size()), 2);
    for (std::size_t i = 0; i < topo.edges.size(); ++i) {
        edge_attrs(static_cast<Eigen::Index>(i), 0) = static_cast<double>(topo.edge_class[i]);
        edge_attrs(static_cast<Eigen::Index>(i), 1) = 0.0;
    }
    return make_attributed_graph(topo.node_count, topo.edges, base_node_attrs(topo), edge_attrs);
}

}  // namespace

TEST_CASE("shortest_path identity and single-path cases") {
    auto g = make_graph(3, {{0, 1, 1.0}, {1, 2, 2.0}});

    auto same = shortest_path(g, 1, 1);
    REQUIRE(same.has_value());
    CHECK(same->cost == 0.0);
    CHECK(same->path == std::vector<int>{1});

    auto line = shortest_path(g, 0, 2);
    REQUIRE(line.has_value());
    CHECK(line->cost == doctest::Approx(3.0));
    CHECK(line->path == std::vector<int>{0, 1, 2});
}

TEST_CASE("shortest_path reports unreachable targets") {
    auto g = make_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    CHECK_FALSE(shortest_path(g, 0, 3).has_value());
    CHECK(shortest_path(g, 2, 3).has_value());
}

TEST_CASE("path cost equals recomputed edge-weight sum") {
    Rng rng(77001);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = random_graph(rng);
        const int s = static_cast<int>(rng.uniform_int(0, g.node_count - 1));
        const int t = static_cast<int>(rng.uniform_int(0, g.node_count - 1));
        auto sp = shortest_path(g, s, t);
        if (!sp) continue;
        REQUIRE(sp->path.front() == s);
        REQUIRE(sp->path.back() == t);
        double recomputed = 0.0;
        for (std::size_t i = 0; i + 1 < sp->path.size(); ++i) {
            int u = sp->path[i], v = sp->path[i + 1];
            if (u > v) std::swap(u, v);
            bool found = false;
            for (std::size_t e = 0; e < g.edges.size(); ++e) {
                if (g.edges[e] == std::make_pair(u, v)) {
                    recomputed += g.edge_attrs(static_cast<Eigen::Index>(e), kTravelTimeColumn);
                    found = true;
                    break;
                }
            }
            REQUIRE(found);
        }
        CHECK(sp->cost == doctest::Approx(recomputed).epsilon(1e-12));
    }
}

TEST_CASE("brute-force equivalence on random graphs up to 8 vertices") {
    Rng rng(424242);
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto g = random_graph(rng);
        BruteForce oracle(g);
        const int s = static_cast<int>(rng.uniform_int(0, g.node_count - 1));
        const int t = static_cast<int>(rng.uniform_int(0, g.node_count - 1));
        auto sp = shortest_path(g, s, t);
        auto expect = oracle.min_cost(s, t);
        REQUIRE(sp.has_value() == expect.has_value());
        if (sp) {
            CHECK(sp->cost == *expect);  // exact float equality
            ++compared;
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("shortest-path metric properties on the shipped topology") {
    auto g = shipped_topology_graph();
    REQUIRE(g.node_count == 18);
    REQUIRE(g.edges.size() == 25);

    std::vector<std::vector<double>> cost(18, std::vector<double>(18, 0.0));
    for (int a = 0; a < 18; ++a)
        for (int b = 0; b < 18; ++b) {
            auto sp = shortest_path(g, a, b);
            REQUIRE(sp.has_value());  // connected
            cost[a][b] = sp->cost;
        }

    for (int a = 0; a < 18; ++a)
        for (int b = 0; b < 18; ++b) {
            CHECK(cost[a][b] == doctest::Approx(cost[b][a]).epsilon(1e-12));
            for (int c = 0; c < 18; ++c)
                CHECK(cost[a][c] <= cost[a][b] + cost[b][c] + 1e-9);
        }
}

TEST_CASE("shipped topology station-to-patient costs match exhaustive enumeration") {
    auto g = shipped_topology_graph();
    BruteForce oracle(g);
    for (int station : {4, 13}) {
        for (int patient = 0; patient < 18; ++patient) {
            if (patient == 4 || patient == 13) continue;
            auto sp = shortest_path(g, station, patient);
            auto expect = oracle.min_cost(station, patient);
            REQUIRE(sp.has_value());
            REQUIRE(expect.has_value());
            CHECK(sp->cost == *expect);
        }
    }
}

TEST_CASE("nearest_free_ambulance dominance, exhaustion and tie-breaking") {
    // Station 1 adjacent to patient 0; station 3 three hops away.
    auto g = make_graph(5, {{0, 1, 1.0}, {0, 4, 1.0}, {4, 2, 1.0}, {2, 3, 1.0}}, {1, 3});
    auto pick = nearest_free_ambulance(g, 0);
    REQUIRE(pick.has_value());
    CHECK(pick->station == 1);
    CHECK(pick->cost == doctest::Approx(1.0));

    auto busy = make_graph(5, {{0, 1, 1.0}, {0, 4, 1.0}, {4, 2, 1.0}, {2, 3, 1.0}}, {1, 3}, {1, 3});
    CHECK_FALSE(nearest_free_ambulance(busy, 0).has_value());

    // Equal cost from both stations: lower station index wins, in both layouts.
    auto tie = make_graph(3, {{0, 1, 2.0}, {1, 2, 2.0}}, {0, 2});
    auto chosen = nearest_free_ambulance(tie, 1);
    REQUIRE(chosen.has_value());
    CHECK(chosen->station == 0);
}

TEST_CASE("attributed-graph invariants are enforced") {
    CHECK_THROWS_AS(make_graph(3, {{0, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(3, {{0, 1, 1.0}, {1, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(3, {{0, 5, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(3, {{0, 1, -2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_graph(3, {{0, 1, 0.0}}), std::invalid_argument);

    Eigen::MatrixXd bad_nodes = Eigen::MatrixXd::Zero(2, 2);
    bad_nodes(0, kRoleColumn) = 2.0;
    Eigen::MatrixXd edge_attrs(1, 2);
    edge_attrs << 1.0, 0.0;
    CHECK_THROWS_AS(make_attributed_graph(2, {{0, 1}}, bad_nodes, edge_attrs),
                    std::invalid_argument);
}

TEST_CASE("topology parsing rejects malformed entries with positions") {
    CHECK_THROWS_WITH_AS(parse_topology(R"({"nodes":3,"edges":[[0,1,1],[1,9,2]],"ambulances":[0]})"),
                         doctest::Contains("edge entry 1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_topology(R"({"nodes":3,"edges":[[0,1,4]],"ambulances":[0]})"),
                         doctest::Contains("edge entry 0"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_topology(R"({"nodes":3,"edges":[[0,1,1]],"ambulances":[7]})"),
                         doctest::Contains("ambulance entry 0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_topology("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(parse_topology(R"({"nodes":3,"ambulances":[0]})"), std::invalid_argument);

    const Topology topo = parse_topology(
        R"({"version":1,"nodes":4,"edges":[[1,0,1],[1,2,3],[2,3,5]],"ambulances":[3,0]})");
    CHECK(topo.node_count == 4);
    CHECK(topo.edges[0] == std::pair<int, int>{0, 1});  // canonicalized
    CHECK(topo.ambulance_nodes == std::vector<int>{0, 3});
    CHECK(topo.patient_count() == 2);
}
