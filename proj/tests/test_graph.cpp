#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <sstream>

#include "specclust/graph.hpp"
#include "support.hpp"

using namespace specclust;
using testing::make_graph;

namespace {

std::vector<Edge> edge_vector(const Graph& g) { return {g.edges().begin(), g.edges().end()}; }

}  // namespace

TEST_CASE("degrees of small graphs") {
  CHECK(degrees(make_graph(2, {{0, 1}})) == std::vector<std::size_t>{1, 1});
  CHECK(degrees(Graph::empty(3)) == std::vector<std::size_t>{0, 0, 0});
  CHECK(degrees(make_graph(3, {{0, 1}, {1, 2}, {0, 2}})) == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("degree sum is twice the edge count") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = testing::random_graph(60, 0.08, seed);
    const auto d = degrees(g);
    CHECK(std::accumulate(d.begin(), d.end(), std::size_t{0}) == 2 * g.edge_count());
  }
}

TEST_CASE("graph construction") {
  SUBCASE("duplicates collapse in either orientation") {
    const auto g = make_graph(3, {{0, 1}, {1, 0}, {0, 1}, {2, 1}});
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(0, 2));
  }
  SUBCASE("self-loop and out-of-range ids throw") {
    CHECK_THROWS(make_graph(3, {{1, 1}}));
    CHECK_THROWS(make_graph(3, {{0, 3}}));
  }
  SUBCASE("neighbors are sorted") {
    const auto g = make_graph(5, {{0, 4}, {0, 2}, {0, 1}, {3, 0}});
    const auto nb = g.neighbors(0);
    CHECK(std::vector<NodeId>(nb.begin(), nb.end()) == std::vector<NodeId>{1, 2, 3, 4});
  }
}

TEST_CASE("largest connected component") {
  SUBCASE("triangle plus isolated vertex") {
    const auto sub = largest_connected_component(make_graph(4, {{0, 1}, {1, 2}, {0, 2}}));
    CHECK(sub.graph.node_count() == 3);
    CHECK(sub.graph.edge_count() == 3);
    CHECK(sub.old_to_new == std::vector<NodeId>{0, 1, 2, kNoNode});
  }
  SUBCASE("equal sizes keep the component with node 0") {
    const auto sub = largest_connected_component(make_graph(4, {{2, 3}, {0, 1}}));
    CHECK(sub.new_to_old == std::vector<NodeId>{0, 1});
  }
  SUBCASE("tie break looks at the smallest member, not the first edge") {
    const auto sub = largest_connected_component(make_graph(6, {{4, 5}, {1, 3}}));
    CHECK(sub.new_to_old == std::vector<NodeId>{1, 3});
  }
  SUBCASE("connected path is returned whole") {
    const auto sub = largest_connected_component(testing::path_graph(5));
    CHECK(sub.graph.node_count() == 5);
    CHECK(sub.new_to_old == std::vector<NodeId>{0, 1, 2, 3, 4});
  }
}

TEST_CASE("largest connected component is idempotent") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto once = largest_connected_component(testing::random_graph(80, 0.02, seed));
    const auto twice = largest_connected_component(once.graph);
    CHECK(twice.graph.node_count() == once.graph.node_count());
    CHECK(edge_vector(twice.graph) == edge_vector(once.graph));
  }
}

TEST_CASE("prune_min_degree") {
  SUBCASE("path 0-1-2 with min degree 2 disappears") {
    const auto r = prune_min_degree(testing::path_graph(3), 2);
    CHECK(r.sub.graph.node_count() == 0);
    CHECK(r.rounds == 2);
  }
  SUBCASE("triangle survives") {
    const auto r = prune_min_degree(make_graph(3, {{0, 1}, {1, 2}, {0, 2}}), 2);
    CHECK(r.sub.graph.node_count() == 3);
    CHECK(r.rounds == 0);
  }
  SUBCASE("pendant on a triangle is removed") {
    const auto r = prune_min_degree(make_graph(4, {{0, 1}, {1, 2}, {0, 2}, {0, 3}}), 2);
    CHECK(r.sub.new_to_old == std::vector<NodeId>{0, 1, 2});
    CHECK(r.sub.graph.edge_count() == 3);
    CHECK(r.rounds == 1);
  }
  SUBCASE("single pass leaves newly exposed low-degree nodes") {
    const auto g = testing::path_graph(4);
    const auto once = prune_min_degree(g, 2, 1);
    CHECK(once.sub.new_to_old == std::vector<NodeId>{1, 2});
    CHECK(prune_min_degree(g, 2).sub.graph.node_count() == 0);
  }
}

TEST_CASE("prune with min degree 1 drops exactly the isolated nodes") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = testing::random_graph(50, 0.03, seed);
    const auto r = prune_min_degree(g, 1);
    std::vector<NodeId> expected;
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (g.degree(v) >= 1) expected.push_back(v);
    CHECK(r.sub.new_to_old == expected);
    CHECK(r.sub.graph.edge_count() == g.edge_count());
    CHECK(r.rounds <= 1);
  }
}

TEST_CASE("merge_snapshots") {
  SUBCASE("union of overlapping sets") {
    const std::vector<Graph> s = {make_graph(3, {{0, 1}}), make_graph(3, {{0, 1}, {1, 2}})};
    CHECK(edge_vector(merge_snapshots(s)) == std::vector<Edge>{{0, 1}, {1, 2}});
  }
  SUBCASE("two empty graphs") {
    const std::vector<Graph> s = {Graph::empty(3), Graph::empty(3)};
    CHECK(merge_snapshots(s).edge_count() == 0);
  }
  SUBCASE("disjoint edge sets") {
    const std::vector<Graph> s = {make_graph(4, {{0, 1}}), make_graph(4, {{2, 3}})};
    CHECK(edge_vector(merge_snapshots(s)) == std::vector<Edge>{{0, 1}, {2, 3}});
  }
  SUBCASE("mismatched node counts throw") {
    const std::vector<Graph> s = {Graph::empty(3), Graph::empty(4)};
    CHECK_THROWS(merge_snapshots(s));
  }
}

TEST_CASE("load_edge_list") {
  SUBCASE("numeric path") {
    std::istringstream in("0 1\n1 2\n");
    const auto r = load_edge_list(in);
    CHECK(r.graph.node_count() == 3);
    CHECK(edge_vector(r.graph) == std::vector<Edge>{{0, 1}, {1, 2}});
  }
  SUBCASE("reversed duplicate collapses") {
    std::istringstream in("a b\nb a\n");
    const auto r = load_edge_list(in);
    CHECK(r.graph.node_count() == 2);
    CHECK(r.graph.edge_count() == 1);
    CHECK(r.duplicates_collapsed == 1);
    CHECK(r.nodes.token(0) == "a");
  }
  SUBCASE("self-loop dropped and counted") {
    std::istringstream in("0 0\n0 1\n");
    const auto r = load_edge_list(in);
    CHECK(r.graph.edge_count() == 1);
    CHECK(r.self_loops_dropped == 1);
  }
  SUBCASE("tokens numbered by first appearance") {
    std::istringstream in("# header\n\nz y\ny x\n");
    const auto r = load_edge_list(in);
    CHECK(r.nodes.find("z") == 0);
    CHECK(r.nodes.find("y") == 1);
    CHECK(r.nodes.find("x") == 2);
    CHECK(r.nodes.find("w") == kNoNode);
  }
  SUBCASE("malformed line reports its number") {
    std::istringstream in("0 1\n# ok\n2\n");
    try {
      load_edge_list(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
}

TEST_CASE("save then load reproduces the graph up to relabeling") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = testing::random_graph(40, 0.1, seed);
    const auto sub = prune_min_degree(g, 1).sub.graph;
    std::stringstream buf;
    save_edge_list(buf, sub);
    const auto back = load_edge_list(buf);
    REQUIRE(back.graph.node_count() == sub.node_count());
    REQUIRE(back.graph.edge_count() == sub.edge_count());
    for (const auto& e : back.graph.edges()) {
      const auto u = static_cast<NodeId>(std::stoul(back.nodes.token(e.first)));
      const auto v = static_cast<NodeId>(std::stoul(back.nodes.token(e.second)));
      CHECK(sub.has_edge(u, v));
    }
  }
}

TEST_CASE("labels round trip and reject unknown nodes") {
  std::istringstream edges("a b\nb c\n");
  const auto load = load_edge_list(edges);
  const NodeLabeling labels({1, 0, 1});
  std::stringstream buf;
  save_labels(buf, labels, &load.nodes);
  const auto back = load_labels(buf, load.nodes);
  CHECK(back.labels() == labels.labels());
  CHECK(back.class_sizes() == std::vector<std::size_t>{1, 2});

  std::istringstream bad("a\t0\nq\t1\nb\t0\nc\t1\n");
  CHECK_THROWS(load_labels(bad, load.nodes));
}

TEST_CASE("labeling restricted through a subgraph") {
  const auto sub = largest_connected_component(make_graph(5, {{1, 2}, {2, 3}}));
  const NodeLabeling labels({0, 1, 0, 1, 0});
  CHECK(labels.restrict_to(sub).labels() == std::vector<int>{1, 0, 1});
  CHECK_THROWS(NodeLabeling({0, -1}));
}
