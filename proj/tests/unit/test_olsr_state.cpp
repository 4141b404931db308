#include "mpolsr/olsr_state.hpp"
#include "mpolsr/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpolsr;

namespace {

HelloMsg hello(NodeId from, std::vector<HelloEntry> listed, double t = 0.0)
{
  return {from, std::move(listed), t};
}

TcMsg tc(NodeId from, std::vector<NodeId> advertised, std::uint16_t ansn, std::uint16_t seq = 0)
{
  return {from, std::move(advertised), ansn, seq, 0.0};
}

// Brings `state` to a symmetric link with `n`, which reports `reach` as its
// own symmetric neighbors.
void make_sym(NodeState& state, NodeId n, const std::vector<NodeId>& reach, double now)
{
  std::vector<HelloEntry> listed{{state.self_id(), LinkStatus::Sym}};
  for (NodeId r : reach)
    listed.push_back({r, LinkStatus::Sym});
  state.process_hello(hello(n, listed), now);
}

bool serial_newer(std::uint16_t a, std::uint16_t b)
{
  const unsigned diff = static_cast<std::uint16_t>(a - b);
  return (diff >= 1 && diff < 32768) || (diff == 32768 && a > b);
}

} // namespace

TEST_CASE("hello handshake")
{
  NodeState s(0);
  s.process_hello(hello(1, {}), 0.0);
  CHECK(s.link_set().at(1).status == LinkStatus::Asym);
  CHECK_FALSE(s.is_sym_neighbor(1));

  s.process_hello(hello(1, {{0, LinkStatus::Sym}}), 1.0);
  CHECK(s.link_set().at(1).status == LinkStatus::Sym);
  CHECK(s.link_set().at(1).expiry == 1.0 + s.timers().neighbor_hold);
  CHECK_FALSE(s.is_mpr_selector(1));

  s.process_hello(hello(1, {{0, LinkStatus::MprSelected}}), 2.0);
  CHECK(s.is_mpr_selector(1));
}

TEST_CASE("generated hello marks mprs")
{
  NodeState s(0);
  make_sym(s, 1, {5}, 0.0);
  make_sym(s, 2, {}, 0.0);
  s.process_hello(hello(3, {}), 0.0);
  auto h = s.generate_hello(0.5);
  CHECK(h.originator == 0);
  std::vector<HelloEntry> expected{{1, LinkStatus::MprSelected}, {2, LinkStatus::Sym}, {3, LinkStatus::Asym}};
  CHECK(h.listed_neighbors == expected);
  CHECK(s.mpr_set() == std::set<NodeId>{1});
}

TEST_CASE("two-hop set excludes self and tracks replacement")
{
  NodeState s(0);
  make_sym(s, 1, {0, 7, 8}, 0.0);
  CHECK(s.two_hop_view().at(1) == std::set<NodeId>{7, 8});
  make_sym(s, 1, {9}, 1.0);
  CHECK(s.two_hop_view().at(1) == std::set<NodeId>{9});
}

TEST_CASE("mpr examples")
{
  std::map<NodeId, std::set<NodeId>> reach{{1, {10, 11}}, {2, {11}}};
  CHECK(select_mprs(0, {1, 2}, reach) == std::set<NodeId>{1});
  CHECK(oracle::min_cover_size(0, {1, 2}, reach) == 1);

  reach = {{1, {10, 11}}, {2, {12}}};
  CHECK(select_mprs(0, {1, 2}, reach) == std::set<NodeId>{1, 2});
  CHECK(oracle::min_cover_size(0, {1, 2}, reach) == 2);

  CHECK(select_mprs(0, {1, 2}, {}).empty());
  // Nodes that are themselves neighbors are not two-hop targets.
  CHECK(select_mprs(0, {1, 2}, {{1, {2, 0}}}).empty());
}

TEST_CASE("greedy mpr covers and stays near optimal")
{
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::set<NodeId> neighbors;
    const auto n_nb = 1 + rng.index(6);
    for (NodeId v = 1; v <= n_nb; ++v)
      neighbors.insert(v);
    std::map<NodeId, std::set<NodeId>> reach;
    for (NodeId nb : neighbors)
      for (NodeId x = 1; x <= 12; ++x)
        if (x != nb && rng.uniform() < 0.3)
          reach[nb].insert(x);
    auto mprs = select_mprs(0, neighbors, reach);
    CHECK(mpr_coverage_holds(0, neighbors, reach, mprs));
    CHECK(std::includes(neighbors.begin(), neighbors.end(), mprs.begin(), mprs.end()));

    std::set<NodeId> targets;
    for (const auto& [nb, r] : reach)
      for (NodeId x : r)
        if (!neighbors.count(x))
          targets.insert(x);
    std::set<NodeId> covered;
    for (NodeId m : mprs)
      if (reach.count(m))
        covered.insert(reach[m].begin(), reach[m].end());
    CHECK(std::includes(covered.begin(), covered.end(), targets.begin(), targets.end()));

    auto best = oracle::min_cover_size(0, neighbors, reach);
    double bound = static_cast<double>(best) * std::log(std::max<double>(1.0, static_cast<double>(targets.size()))) + 1.0;
    CHECK(static_cast<double>(mprs.size()) <= std::max(bound, static_cast<double>(best)));
  }
}

TEST_CASE("serial number comparison")
{
  CHECK(seq_newer(1, 0));
  CHECK_FALSE(seq_newer(0, 1));
  CHECK_FALSE(seq_newer(5, 5));
  CHECK(seq_newer(0, 65535));
  CHECK(seq_newer(3, 65530));
  CHECK_FALSE(seq_newer(65530, 3));
  CHECK(seq_newer(32767, 0));

  for (unsigned base : {0u, 1u, 100u, 32767u, 32768u, 65000u, 65535u})
    for (unsigned off = 0; off < 65536; off += 7) {
      auto a = static_cast<std::uint16_t>(base + off);
      auto b = static_cast<std::uint16_t>(base);
      CHECK(seq_newer(a, b) == serial_newer(a, b));
      if (a != b)
        CHECK(seq_newer(a, b) != seq_newer(b, a));
    }
}

TEST_CASE("tc freshness")
{
  NodeState s(0);
  s.process_tc(tc(5, {6, 7}, 10), 0.0);
  REQUIRE(s.topology_set().count(5));
  CHECK(s.topology_set().at(5).advertised == std::vector<NodeId>{6, 7});

  s.process_tc(tc(5, {8}, 9), 1.0);
  CHECK(s.topology_set().at(5).advertised == std::vector<NodeId>{6, 7});
  CHECK(s.topology_set().at(5).ansn == 10);

  s.process_tc(tc(5, {8}, 11), 2.0);
  CHECK(s.topology_set().at(5).advertised == std::vector<NodeId>{8});

  s.process_tc(tc(9, {1}, 65535), 2.0);
  s.process_tc(tc(9, {2}, 0), 3.0);
  CHECK(s.topology_set().at(9).ansn == 0);
  CHECK(s.topology_set().at(9).advertised == std::vector<NodeId>{2});
}

TEST_CASE("tc ansn")
{
  NodeState s(0);
  auto empty = s.generate_tc(0.0);
  CHECK(empty.advertised_neighbors.empty());
  CHECK(s.generate_hello(0.0).listed_neighbors.empty());

  make_sym(s, 1, {}, 0.0);
  make_sym(s, 2, {}, 0.0);
  auto first = s.generate_tc(1.0);
  CHECK(first.advertised_neighbors == std::vector<NodeId>{1, 2});
  auto again = s.generate_tc(2.0);
  CHECK(again.ansn == first.ansn);
  CHECK(again.msg_seq != first.msg_seq);

  s.purge_neighbor(2);
  auto after = s.generate_tc(3.0);
  CHECK(after.ansn == static_cast<std::uint16_t>(first.ansn + 1));
  CHECK(after.advertised_neighbors == std::vector<NodeId>{1});
}

TEST_CASE("expiry")
{
  NodeState s(0);
  make_sym(s, 1, {10}, 0.0);
  make_sym(s, 2, {11}, 0.0);
  s.process_tc(tc(10, {1}, 1), 0.0);
  CHECK(s.mpr_set() == std::set<NodeId>{1, 2});

  auto before = s.build_graph();
  s.expire_entries(1.0);
  CHECK(s.build_graph() == before);

  make_sym(s, 1, {10}, 3.0);
  s.expire_entries(0.0 + s.timers().neighbor_hold);
  CHECK(s.sym_neighbors() == std::set<NodeId>{1});
  CHECK(s.mpr_set() == std::set<NodeId>{1});
  CHECK(mpr_coverage_holds(0, s.sym_neighbors(), s.two_hop_view(), s.mpr_set()));

  s.expire_entries(100.0);
  CHECK(s.link_set().empty());
  CHECK(s.sym_neighbors().empty());
  CHECK(s.mpr_set().empty());
  CHECK(s.topology_set().empty());
  CHECK(s.build_graph().vertex_count() == 1);
}

TEST_CASE("stale topology entry keeps its arcs until expiry")
{
  NodeState s(0);
  make_sym(s, 1, {2}, 0.0);
  s.process_tc(tc(2, {1, 3}, 1), 0.0);
  CHECK(s.build_graph().has_arc(2, 3));
  s.expire_entries(s.timers().topology_hold - 0.5);
  CHECK(s.build_graph().has_arc(2, 3));
  s.expire_entries(s.timers().topology_hold);
  CHECK_FALSE(s.build_graph().has_arc(2, 3));
}

TEST_CASE("graph contents")
{
  NodeState s(0);
  CHECK(s.build_graph().vertices() == std::set<NodeId>{0});

  make_sym(s, 1, {2}, 0.0);
  s.process_hello(hello(4, {}), 0.0);
  s.process_tc(tc(2, {0, 1, 3}, 1), 0.0);
  Graph g = s.build_graph();
  CHECK(g.vertices() == std::set<NodeId>{0, 1, 2, 3, 4});
  CHECK(g.has_arc(0, 1));
  CHECK(g.has_arc(1, 0));
  CHECK(g.has_arc(1, 2));
  CHECK(g.has_arc(2, 3));
  CHECK(g.has_arc(3, 2));
  CHECK_FALSE(g.has_arc(0, 4));
  CHECK_FALSE(g.has_arc(2, 0));
  for (const auto& a : g.arcs())
    CHECK(g.cost(a.tail, a.head) == 1.0);

  Graph weighted = s.build_graph([](NodeId t, NodeId h) { return 1.0 + t + h; });
  CHECK(weighted.cost(1, 2) == 4.0);
}

TEST_CASE("purge")
{
  NodeState s(0);
  make_sym(s, 1, {5}, 0.0);
  s.process_hello(hello(1, {{0, LinkStatus::MprSelected}, {5, LinkStatus::Sym}}), 0.0);
  CHECK(s.purge_neighbor(1));
  CHECK_FALSE(s.purge_neighbor(1));
  CHECK(s.link_set().empty());
  CHECK(s.two_hop_set().empty());
  CHECK(s.mpr_selector_set().empty());
  CHECK(s.mpr_set().empty());
}

TEST_CASE("incremental graph tracks the rebuilt graph")
{
  Rng rng(99);
  for (int run = 0; run < 40; ++run) {
    NodeState s(0);
    double now = 0.0;
    std::map<NodeId, std::uint16_t> ansn;
    Graph previous = s.build_graph();
    auto version = s.topology_version();
    for (int step = 0; step < 400; ++step) {
      now += rng.uniform(0.0, 0.8);
      const auto kind = rng.index(10);
      const auto from = static_cast<NodeId>(1 + rng.index(9));
      if (kind < 5) {
        std::vector<HelloEntry> listed;
        for (NodeId v = 0; v <= 9; ++v)
          if (v != from && rng.uniform() < 0.35)
            listed.push_back({v, static_cast<LinkStatus>(rng.index(3))});
        s.process_hello(hello(from, listed), now);
      } else if (kind < 8) {
        std::vector<NodeId> adv;
        for (NodeId v = 0; v <= 12; ++v)
          if (v != from && rng.uniform() < 0.3)
            adv.push_back(v);
        auto& a = ansn[from];
        a = static_cast<std::uint16_t>(a + rng.index(3) - (rng.uniform() < 0.1 ? 2 : 0));
        s.process_tc(tc(from, adv, a), now);
      } else if (kind == 8) {
        s.expire_entries(now);
        for (const auto& [n, e] : s.link_set())
          CHECK(e.expiry > now);
        for (const auto& [n, e] : s.two_hop_set())
          CHECK(e.expiry > now);
        for (const auto& [n, e] : s.topology_set())
          CHECK(e.expiry > now);
      } else {
        s.purge_neighbor(from);
      }

      Graph rebuilt = s.build_graph();
      REQUIRE(s.graph() == rebuilt);
      CHECK((rebuilt != previous) == (s.topology_version() != version));
      CHECK(mpr_coverage_holds(0, s.sym_neighbors(), s.two_hop_view(), s.mpr_set()));
      auto sym = s.sym_neighbors();
      CHECK(std::includes(sym.begin(), sym.end(), s.mpr_set().begin(), s.mpr_set().end()));
      previous = std::move(rebuilt);
      version = s.topology_version();
    }
  }
}
