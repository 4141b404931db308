#include "mpolsr/olsr_state.hpp"

#include "mpolsr/error.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace mpolsr {

bool
seq_newer(std::uint16_t a, std::uint16_t b)
{
  constexpr std::uint16_t half = 32768;
  return (a > b && a - b <= half) || (b > a && b - a > half);
}

namespace {

std::set<NodeId>
strict_two_hop(NodeId self, const std::set<NodeId>& sym, const std::map<NodeId, std::set<NodeId>>& two_hop)
{
  std::set<NodeId> out;
  for (const auto& [via, reach] : two_hop) {
    if (!sym.count(via))
      continue;
    for (NodeId n : reach)
      if (n != self && !sym.count(n))
        out.insert(n);
  }
  return out;
}

const std::set<NodeId>&
reach_of(const std::map<NodeId, std::set<NodeId>>& two_hop, NodeId via)
{
  static const std::set<NodeId> none;
  auto it = two_hop.find(via);
  return it == two_hop.end() ? none : it->second;
}

/// Symmetric neighbor with the sorted nodes it reaches, in ascending
/// neighbor order.
template <class Nodes>
using Reach = std::vector<std::pair<NodeId, const Nodes*>>;

std::vector<NodeId>
sorted_unique(std::vector<NodeId> v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <class Nodes>
std::set<NodeId>
greedy_mprs(NodeId self, const Reach<Nodes>& reach)
{
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  NodeId max_id = self;
  std::size_t total = 0;
  for (const auto& [via, nodes] : reach) {
    max_id = std::max(max_id, via);
    if (!nodes->empty())
      max_id = std::max(max_id, *nodes->rbegin());
    total += nodes->size();
  }

  // slot[id]: position in `targets` of a strict two-hop node. Small ids use
  // a table; large ones a sorted list.
  std::vector<NodeId> targets;
  std::vector<std::size_t> slot;
  std::function<std::size_t(NodeId)> target_of;
  if (max_id <= 4 * total + 1024) {
    slot.assign(static_cast<std::size_t>(max_id) + 1, 0);
    for (const auto& [via, nodes] : reach)
      for (NodeId n : *nodes)
        slot[n] = 1;
    slot[self] = 0;
    for (const auto& [via, nodes] : reach)
      slot[via] = 0;
    for (std::size_t v = 0; v < slot.size(); ++v) {
      if (slot[v]) {
        slot[v] = targets.size();
        targets.push_back(static_cast<NodeId>(v));
      } else {
        slot[v] = none;
      }
    }
    target_of = [&](NodeId n) { return slot[n]; };
  } else {
    for (const auto& [via, nodes] : reach)
      targets.insert(targets.end(), nodes->begin(), nodes->end());
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::erase_if(targets, [&](NodeId t) {
      return t == self || std::binary_search(reach.begin(), reach.end(), std::pair<NodeId, const Nodes*>{t, nullptr},
                                             [](const auto& a, const auto& b) { return a.first < b.first; });
    });
    target_of = [&](NodeId n) {
      auto it = std::lower_bound(targets.begin(), targets.end(), n);
      return it == targets.end() || *it != n ? none : static_cast<std::size_t>(it - targets.begin());
    };
  }

  // covers[i]: indices into `targets` reached through neighbor i.
  std::vector<std::vector<std::size_t>> covers(reach.size());
  std::vector<std::size_t> reachers(targets.size(), 0);
  std::vector<std::size_t> sole(targets.size(), 0);
  for (std::size_t i = 0; i < reach.size(); ++i)
    for (NodeId n : *reach[i].second) {
      const std::size_t t = target_of(n);
      if (t == none)
        continue;
      covers[i].push_back(t);
      ++reachers[t];
      sole[t] = i;
    }

  std::set<NodeId> mprs;
  std::vector<char> chosen(reach.size(), 0);
  std::vector<char> covered(targets.size(), 0);
  std::size_t left = targets.size();
  auto choose = [&](std::size_t i) {
    chosen[i] = 1;
    mprs.insert(reach[i].first);
    for (std::size_t t : covers[i])
      if (!covered[t]) {
        covered[t] = 1;
        --left;
      }
  };
  for (std::size_t t = 0; t < targets.size(); ++t)
    if (reachers[t] == 1 && !chosen[sole[t]])
      choose(sole[t]);

  while (left > 0) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < reach.size(); ++i) {
      if (chosen[i])
        continue;
      const auto gain = static_cast<std::size_t>(
        std::count_if(covers[i].begin(), covers[i].end(), [&](std::size_t t) { return !covered[t]; }));
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    assert(best_gain > 0);
    choose(best);
  }
  return mprs;
}

} // namespace

std::set<NodeId>
select_mprs(NodeId self, const std::set<NodeId>& sym, const std::map<NodeId, std::set<NodeId>>& two_hop)
{
  Reach<std::set<NodeId>> reach;
  for (NodeId n : sym)
    if (n != self)
      reach.emplace_back(n, &reach_of(two_hop, n));
  return greedy_mprs(self, reach);
}

bool
mpr_coverage_holds(NodeId self,
                   const std::set<NodeId>& sym,
                   const std::map<NodeId, std::set<NodeId>>& two_hop,
                   const std::set<NodeId>& mprs)
{
  for (NodeId m : mprs)
    if (!sym.count(m))
      return false;
  for (NodeId t : strict_two_hop(self, sym, two_hop)) {
    bool covered = std::any_of(mprs.begin(), mprs.end(), [&](NodeId m) { return reach_of(two_hop, m).count(t) != 0; });
    if (!covered)
      return false;
  }
  return true;
}

NodeState::NodeState(NodeId self, OlsrTimers timers)
  : m_self(self)
  , m_timers(timers)
{
  m_vertex_refs.emplace(self, 1);
}

void
NodeState::ref_vertex(NodeId v, int delta)
{
  if (delta > 0) {
    if (m_vertex_refs[v]++ == 0)
      touch();
    return;
  }
  auto it = m_vertex_refs.find(v);
  assert(it != m_vertex_refs.end() && it->second > 0);
  if (--it->second == 0) {
    m_vertex_refs.erase(it);
    touch();
  }
}

void
NodeState::ref_link(NodeId a, NodeId b, int delta)
{
  if (a == b)
    return;
  const auto [lo, hi] = std::minmax(a, b);
  const std::uint64_t key = (std::uint64_t{lo} << 32) | hi;
  if (delta > 0) {
    if (m_link_refs[key]++ != 0)
      return;
  } else {
    auto it = m_link_refs.find(key);
    assert(it != m_link_refs.end() && it->second > 0);
    if (--it->second != 0)
      return;
    m_link_refs.erase(it);
  }
  touch();
  auto relink = [&](NodeId from, NodeId to) {
    auto& adj = m_adjacent[from];
    auto pos = std::lower_bound(adj.begin(), adj.end(), to);
    if (delta > 0) {
      adj.insert(pos, to);
    } else {
      adj.erase(pos);
      if (adj.empty())
        m_adjacent.erase(from);
    }
  };
  relink(a, b);
  relink(b, a);
  ref_vertex(a, delta);
  ref_vertex(b, delta);
}

void
NodeState::ref_reach(NodeId via, const std::vector<NodeId>& nodes, int delta)
{
  for (NodeId n : nodes)
    if (n != m_self)
      ref_link(via, n, delta);
}

void
NodeState::replace_reach(NodeId via, const std::vector<NodeId>& before, const std::vector<NodeId>& after)
{
  auto b = before.begin();
  auto a = after.begin();
  while (b != before.end() || a != after.end()) {
    if (a == after.end() || (b != before.end() && *b < *a)) {
      if (*b != m_self)
        ref_link(via, *b, -1);
      ++b;
    } else if (b == before.end() || *a < *b) {
      if (*a != m_self)
        ref_link(via, *a, +1);
      ++a;
    } else {
      ++a;
      ++b;
    }
  }
}

// Two-hop reach counts toward the graph only while its neighbor is
// symmetric, so status changes move those references too.
void
NodeState::set_link_status(NodeId n, std::optional<LinkStatus> before, std::optional<LinkStatus> after)
{
  if (before == after)
    return;
  const auto th = m_two_hop.find(n);
  auto apply = [&](std::optional<LinkStatus> status, int delta) {
    if (!status)
      return;
    ref_vertex(n, delta);
    if (*status == LinkStatus::Sym) {
      ref_link(m_self, n, delta);
      if (th != m_two_hop.end())
        ref_reach(n, th->second.nodes, delta);
    }
  };
  apply(after, +1);
  apply(before, -1);
}

void
NodeState::advance_clock(double now)
{
  m_clock = std::max(m_clock, now);
}

void
NodeState::process_hello(const HelloMsg& msg, double now)
{
  if (msg.originator == m_self)
    throw InputError("HELLO originated by the receiving node");
  advance_clock(now);

  bool listed = false;
  bool selected = false;
  std::vector<NodeId> their_sym;
  for (const auto& e : msg.listed_neighbors) {
    if (e.neighbor == m_self) {
      listed = true;
      selected = selected || e.status == LinkStatus::MprSelected;
    } else if (e.status != LinkStatus::Asym) {
      their_sym.push_back(e.neighbor);
    }
  }
  std::sort(their_sym.begin(), their_sym.end());
  their_sym.erase(std::unique(their_sym.begin(), their_sym.end()), their_sym.end());

  bool neighborhood_changed = false;
  const LinkStatus status = listed ? LinkStatus::Sym : LinkStatus::Asym;
  auto [link, inserted] = m_links.try_emplace(msg.originator);
  if (inserted || link->second.status != status) {
    set_link_status(msg.originator, inserted ? std::nullopt : std::optional{link->second.status}, status);
    link->second.status = status;
    neighborhood_changed = true;
  }
  link->second.expiry = now + m_timers.neighbor_hold;

  if (status == LinkStatus::Sym) {
    auto [th, fresh] = m_two_hop.try_emplace(msg.originator);
    if (fresh || th->second.nodes != their_sym) {
      replace_reach(msg.originator, th->second.nodes, their_sym);
      th->second.nodes = std::move(their_sym);
      neighborhood_changed = true;
    }
    th->second.expiry = now + m_timers.neighbor_hold;
  } else if (m_two_hop.erase(msg.originator)) {
    neighborhood_changed = true;
  }

  if (selected)
    m_selectors[msg.originator] = now + m_timers.neighbor_hold;
  else
    m_selectors.erase(msg.originator);

  if (neighborhood_changed)
    m_mprs_stale = true;
}

void
NodeState::process_tc(const TcMsg& msg, double now)
{
  if (msg.originator == m_self)
    return;
  advance_clock(now);

  auto it = m_topology.find(msg.originator);
  if (it == m_topology.end()) {
    std::vector<NodeId> advertised = sorted_unique(msg.advertised_neighbors);
    ref_vertex(msg.originator, +1);
    ref_reach(msg.originator, advertised, +1);
    m_topology.emplace(msg.originator, TopologyEntry{std::move(advertised), msg.ansn, now + m_timers.topology_hold});
    return;
  }
  TopologyEntry& entry = it->second;
  if (seq_newer(msg.ansn, entry.ansn)) {
    std::vector<NodeId> advertised = sorted_unique(msg.advertised_neighbors);
    if (entry.advertised != advertised) {
      replace_reach(msg.originator, entry.advertised, advertised);
      entry.advertised = std::move(advertised);
    }
    entry.ansn = msg.ansn;
    entry.expiry = now + m_timers.topology_hold;
  } else if (msg.ansn == entry.ansn) {
    // Periodic re-advertisement of unchanged content keeps the entry alive.
    entry.expiry = std::max(entry.expiry, now + m_timers.topology_hold);
  }
}

void
NodeState::expire_entries(double now)
{
  advance_clock(now);
  bool neighborhood_changed = false;

  for (auto it = m_links.begin(); it != m_links.end();) {
    if (it->second.expiry <= now) {
      set_link_status(it->first, it->second.status, std::nullopt);
      it = m_links.erase(it);
      neighborhood_changed = true;
    } else {
      ++it;
    }
  }
  for (auto it = m_two_hop.begin(); it != m_two_hop.end();) {
    if (it->second.expiry <= now || !is_sym_neighbor(it->first)) {
      if (is_sym_neighbor(it->first))
        ref_reach(it->first, it->second.nodes, -1);
      it = m_two_hop.erase(it);
      neighborhood_changed = true;
    } else {
      ++it;
    }
  }
  std::erase_if(m_selectors, [&](const auto& kv) { return kv.second <= now || !is_sym_neighbor(kv.first); });

  for (auto it = m_topology.begin(); it != m_topology.end();) {
    if (it->second.expiry <= now) {
      ref_reach(it->first, it->second.advertised, -1);
      ref_vertex(it->first, -1);
      it = m_topology.erase(it);
    } else {
      ++it;
    }
  }

  if (neighborhood_changed)
    m_mprs_stale = true;
}

bool
NodeState::purge_neighbor(NodeId neighbor)
{
  auto it = m_links.find(neighbor);
  if (it == m_links.end())
    return false;
  set_link_status(neighbor, it->second.status, std::nullopt);
  m_links.erase(it);
  m_two_hop.erase(neighbor);
  m_selectors.erase(neighbor);
  m_mprs_stale = true;
  return true;
}

HelloMsg
NodeState::generate_hello(double now) const
{
  HelloMsg msg;
  msg.originator = m_self;
  msg.emission_time = now;
  for (const auto& [n, link] : m_links) {
    LinkStatus s = link.status;
    if (s == LinkStatus::Sym && mpr_set().count(n))
      s = LinkStatus::MprSelected;
    msg.listed_neighbors.push_back({n, s});
  }
  return msg;
}

TcMsg
NodeState::generate_tc(double now)
{
  std::set<NodeId> advertised = sym_neighbors();
  if (advertised != m_last_advertised) {
    ++m_ansn;
    m_last_advertised = advertised;
  }
  TcMsg msg;
  msg.originator = m_self;
  msg.advertised_neighbors.assign(advertised.begin(), advertised.end());
  msg.ansn = m_ansn;
  msg.msg_seq = m_msg_seq++;
  msg.emission_time = now;
  return msg;
}

std::set<NodeId>
NodeState::select_mprs() const
{
  static const std::vector<NodeId> none;
  Reach<std::vector<NodeId>> reach;
  for (const auto& [n, link] : m_links) {
    if (link.status != LinkStatus::Sym)
      continue;
    auto it = m_two_hop.find(n);
    reach.emplace_back(n, it == m_two_hop.end() ? &none : &it->second.nodes);
  }
  return greedy_mprs(m_self, reach);
}

const std::set<NodeId>&
NodeState::update_mprs()
{
  m_mprs_stale = true;
  return mpr_set();
}

const std::set<NodeId>&
NodeState::mpr_set() const
{
  if (m_mprs_stale) {
    m_mprs = select_mprs();
    m_mprs_stale = false;
    assert(mpr_coverage_holds(m_self, sym_neighbors(), two_hop_view(), m_mprs));
  }
  return m_mprs;
}

bool
NodeState::is_sym_neighbor(NodeId n) const
{
  auto it = m_links.find(n);
  return it != m_links.end() && it->second.status == LinkStatus::Sym;
}

std::set<NodeId>
NodeState::sym_neighbors() const
{
  std::set<NodeId> out;
  for (const auto& [n, link] : m_links)
    if (link.status == LinkStatus::Sym)
      out.insert(out.end(), n);
  return out;
}

std::map<NodeId, std::set<NodeId>>
NodeState::two_hop_view() const
{
  std::map<NodeId, std::set<NodeId>> out;
  for (const auto& [via, entry] : m_two_hop)
    if (is_sym_neighbor(via))
      out.emplace(via, std::set<NodeId>(entry.nodes.begin(), entry.nodes.end()));
  return out;
}

Graph
NodeState::build_graph(const ArcCostFn& cost) const
{
  std::vector<NodeId> vertices;
  std::vector<std::pair<Arc, double>> arcs;
  auto link = [&](NodeId a, NodeId b) {
    if (a == b)
      return;
    arcs.push_back({{a, b}, cost ? cost(a, b) : 1.0});
    arcs.push_back({{b, a}, cost ? cost(b, a) : 1.0});
  };

  vertices.push_back(m_self);
  for (const auto& [n, entry] : m_links) {
    vertices.push_back(n);
    if (entry.status == LinkStatus::Sym)
      link(m_self, n);
  }
  for (const auto& [via, entry] : m_two_hop) {
    if (!is_sym_neighbor(via))
      continue;
    for (NodeId n : entry.nodes)
      if (n != m_self)
        link(via, n);
  }
  for (const auto& [orig, entry] : m_topology) {
    vertices.push_back(orig);
    if (orig == m_self)
      continue;
    for (NodeId n : entry.advertised)
      if (n != m_self)
        link(orig, n);
  }
  return Graph(std::move(vertices), std::move(arcs));
}

const Graph&
NodeState::graph() const
{
  if (!m_graph_cache || m_graph_cache->first != m_version) {
    std::vector<NodeId> ids;
    std::vector<Graph::Adjacency> out;
    ids.reserve(m_vertex_refs.size());
    out.reserve(m_vertex_refs.size());
    auto adj = m_adjacent.begin();
    for (const auto& [v, count] : m_vertex_refs) {
      ids.push_back(v);
      auto& arcs = out.emplace_back();
      if (adj != m_adjacent.end() && adj->first == v) {
        arcs.reserve(adj->second.size());
        for (NodeId head : adj->second)
          arcs.emplace_back(head, 1.0);
        ++adj;
      }
    }
    m_graph_cache.emplace(m_version, Graph::from_sorted(std::move(ids), std::move(out)));
  }
  return m_graph_cache->second;
}

} // namespace mpolsr
