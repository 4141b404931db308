#include "mpolsr/error.hpp"
#include "mpolsr/netgraph.hpp"
#include "mpolsr/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mpolsr;

namespace {

constexpr NodeId S = 0, A = 1, B = 2, D = 3, X = 4;

Graph line()
{
  Graph g;
  g.add_link(S, X);
  g.add_link(X, D);
  return g;
}

Graph diamond()
{
  Graph g;
  g.add_link(S, A);
  g.add_link(A, D);
  g.add_link(S, B);
  g.add_link(B, D);
  return g;
}

// 3x3 grid ids 0..8 row-major; the centre is the only way from 0 to 8.
Graph articulated_grid()
{
  Graph g;
  for (auto [a, b] : {std::pair{0, 1}, {0, 3}, {1, 2}, {3, 6}, {1, 4}, {3, 4}, {4, 5}, {4, 7}, {5, 8}, {7, 8}})
    g.add_link(static_cast<NodeId>(a), static_cast<NodeId>(b));
  return g;
}

} // namespace

TEST_CASE("graph edits")
{
  Graph g;
  g.add_arc(1, 2, 3.0);
  CHECK(g.has_vertex(1));
  CHECK(g.has_vertex(2));
  CHECK(g.cost(1, 2) == 3.0);
  CHECK_FALSE(g.has_arc(2, 1));
  g.add_arc(1, 2, 5.0);
  CHECK(g.cost(1, 2) == 5.0);
  CHECK(g.arc_count() == 1);

  CHECK_THROWS_AS(g.add_arc(1, 1), InputError);
  CHECK_THROWS_AS(g.add_arc(1, 3, 0.0), InputError);
  CHECK_THROWS_AS(g.add_arc(1, 3, -1.0), InputError);
  CHECK_THROWS_AS(g.add_arc(1, 3, INFINITY), InputError);
  CHECK_THROWS_AS(g.cost(2, 1), InputError);

  g.add_link(2, 3);
  g.remove_vertex(2);
  CHECK(g.vertices() == std::set<NodeId>{1, 3});
  CHECK(g.arc_count() == 0);
}

TEST_CASE("bulk construction matches incremental")
{
  Graph bulk({9}, {{{1, 2}, 1.0}, {{2, 1}, 4.0}, {{1, 2}, 2.0}});
  Graph inc;
  inc.add_vertex(9);
  inc.add_arc(1, 2, 2.0);
  inc.add_arc(2, 1, 4.0);
  CHECK(bulk == inc);
}

TEST_CASE("dijkstra on a line")
{
  auto tree = dijkstra(line(), S);
  CHECK(tree.distance == std::map<NodeId, double>{{S, 0.0}, {X, 1.0}, {D, 2.0}});
  CHECK(get_path(tree, D)->hops == std::vector<NodeId>{S, X, D});
  CHECK(get_path(tree, S)->hops == std::vector<NodeId>{S});
  CHECK_THROWS_AS(dijkstra(line(), 77), InputError);
}

TEST_CASE("unreachable destination is absent")
{
  Graph g = line();
  g.add_arc(D, 9);
  g.add_arc(8, 9);
  auto tree = dijkstra(g, S);
  CHECK_FALSE(tree.reaches(8));
  CHECK(tree.predecessor.count(8) == 0);
  CHECK_FALSE(get_path(tree, 8).has_value());
  CHECK_THROWS_AS(multipath_dijkstra(S, 8, g, 2), RouteNotFound);
}

TEST_CASE("dijkstra agrees with bellman-ford")
{
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Graph g;
    const std::size_t n = 8;
    for (NodeId v = 0; v < n; ++v)
      g.add_vertex(v);
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = 0; b < n; ++b)
        if (a != b && rng.uniform() < 0.3)
          g.add_arc(a, b, 0.5 + rng.uniform(0.0, 9.0));
    auto source = static_cast<NodeId>(rng.index(n));
    auto tree = dijkstra(g, source);
    auto truth = oracle::bellman_ford(g, source);
    REQUIRE(tree.distance.size() == truth.size());
    for (const auto& [v, d] : truth) {
      CHECK(tree.distance.at(v) == doctest::Approx(d));
      auto path = get_path(tree, v);
      REQUIRE(path);
      CHECK(path_cost(g, *path) == doctest::Approx(d));
    }
  }
}

TEST_CASE("diamond yields both disjoint paths")
{
  auto paths = multipath_dijkstra(S, D, diamond(), 2);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].hops == std::vector<NodeId>{S, A, D});
  CHECK(paths[1].hops == std::vector<NodeId>{S, B, D});

  auto enumerated = oracle::simple_paths(diamond(), S, D);
  CHECK(enumerated.size() == 2);
  CHECK(node_disjoint(paths[0], paths[1]));

  auto deleted = multipath_node_delete(S, D, diamond(), 2);
  CHECK(deleted == paths);
}

TEST_CASE("single route repeats")
{
  auto paths = multipath_dijkstra(S, D, line(), 3);
  REQUIRE(paths.size() == 3);
  for (const auto& p : paths)
    CHECK(p.hops == std::vector<NodeId>{S, X, D});
  CHECK(multipath_node_delete(S, D, line(), 2).size() == 1);
}

TEST_CASE("articulation node is shared by penalty paths only")
{
  Graph g = articulated_grid();
  for (const auto& p : oracle::simple_paths(g, 0, 8))
    CHECK(std::find(p.begin(), p.end(), NodeId{4}) != p.end());

  auto paths = multipath_dijkstra(0, 8, g, 2);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].contains(4));
  CHECK(paths[1].contains(4));
  CHECK(paths[0] != paths[1]);

  CHECK(multipath_node_delete(0, 8, g, 2).size() == 1);
}

TEST_CASE("penalize applies each function to its arc class")
{
  Rng rng(5);
  auto transform = CostTransform::multiplicative(3.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g = oracle::random_connected(rng, 7, 0.4, 5);
    auto tree = dijkstra(g, 0);
    auto path = *get_path(tree, static_cast<NodeId>(1 + rng.index(6)));
    Graph next = penalize(g, path, transform);
    REQUIRE(next.arcs() == g.arcs());
    for (const auto& a : g.arcs()) {
      double c = g.cost(a.tail, a.head);
      double expected = c;
      if (path.uses_arc(a.tail, a.head) || path.uses_arc(a.head, a.tail))
        expected = 3.0 * c;
      else if (path.contains(a.head))
        expected = 2.0 * c;
      CHECK(next.cost(a.tail, a.head) == expected);
      CHECK(next.cost(a.tail, a.head) >= c);
    }
  }
}

TEST_CASE("first multipath route is a shortest path")
{
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    auto n = 2 + rng.index(6);
    Graph g = oracle::random_connected(rng, n, 0.35, 4);
    auto d = static_cast<NodeId>(1 + rng.index(n - 1));
    auto paths = multipath_dijkstra(0, d, g, 3);
    REQUIRE(paths.size() == 3);
    CHECK(path_cost(g, paths[0]) == oracle::brute_force_distance(g, 0, d));
    CHECK(paths[0] == *get_path(dijkstra(g, 0), d));
    for (const auto& p : paths) {
      CHECK(p.source() == 0);
      CHECK(p.destination() == d);
    }
  }
}

TEST_CASE("node deletion paths are node disjoint")
{
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g = oracle::random_connected(rng, 9, 0.3, 1);
    auto paths = multipath_node_delete(0, 8, g, 4);
    REQUIRE_FALSE(paths.empty());
    for (std::size_t i = 0; i < paths.size(); ++i)
      for (std::size_t j = i + 1; j < paths.size(); ++j)
        CHECK(node_disjoint(paths[i], paths[j]));
  }
}

TEST_CASE("path helpers")
{
  Path sxd{{S, X, D}};
  CHECK(path_cost(line(), sxd) == 2.0);
  CHECK_THROWS_AS(path_cost(line(), Path{{S, D}}), InputError);
  CHECK(node_disjoint(Path{{S, A, D}}, Path{{S, B, D}}));
  CHECK_FALSE(arc_disjoint(sxd, sxd));
  CHECK_FALSE(arc_disjoint(sxd, Path{{D, X}}));
  CHECK(arc_disjoint(Path{{S, A, D}}, Path{{S, B, D}}));
  std::ostringstream os;
  os << sxd;
  CHECK_FALSE(os.str().empty());
}

TEST_CASE("cost transform names")
{
  CHECK(CostTransform::from_name("2c").on_path(3.0) == 6.0);
  CHECK(CostTransform::from_name("2c").toward_path(3.0) == 6.0);
  auto mul = CostTransform::from_name("mul:4,1.5");
  CHECK(mul.on_path(2.0) == 8.0);
  CHECK(mul.toward_path(2.0) == 3.0);
  CHECK_NOTHROW(CostTransform::from_name("link_disjoint"));
  CHECK_NOTHROW(CostTransform::from_name("node_disjoint"));
  CHECK_THROWS_AS(CostTransform::from_name("3c"), InputError);
  CHECK_THROWS(CostTransform::multiplicative(1.0, 2.0));
}

TEST_CASE("topology text")
{
  std::istringstream in("# comment\n1 2 1.5\n2 1 1.5\n\n2 3 2\n");
  Graph g = parse_topology(in);
  CHECK(g.vertex_count() == 3);
  CHECK(g.cost(1, 2) == 1.5);
  CHECK(g.cost(2, 3) == 2.0);
  std::istringstream bad("1 x 2\n");
  CHECK_THROWS_AS(parse_topology(bad), InputError);
}
