#include "mpolsr/mp_routing.hpp"

#include "mpolsr/error.hpp"

namespace mpolsr {

RouteSet
compute_routes(const NodeState& state, NodeId dest, std::size_t n_paths, const CostTransform& transform)
{
  if (dest == state.self_id())
    throw InputError("route requested to self");
  const Graph& g = state.graph();
  if (!g.has_vertex(dest))
    throw RouteNotFound("destination " + std::to_string(dest) + " unknown");
  RouteSet rs;
  rs.destination = dest;
  rs.paths = multipath_dijkstra(state.self_id(), dest, g, n_paths, transform);
  rs.topology_version = state.topology_version();
  return rs;
}

RouteSet&
RouteCache::routes_for(const NodeState& state, NodeId dest, std::size_t n_paths, const CostTransform& transform)
{
  auto it = m_sets.find(dest);
  if (it != m_sets.end() && it->second.topology_version == state.topology_version() &&
      it->second.paths.size() == n_paths)
    return it->second;

  std::size_t cursor = it == m_sets.end() ? 0 : it->second.next_path_index;
  ++m_computations;
  RouteSet fresh;
  try {
    fresh = compute_routes(state, dest, n_paths, transform);
  } catch (const RouteNotFound&) {
    if (it != m_sets.end())
      m_sets.erase(it);
    throw;
  }
  fresh.next_path_index = cursor % fresh.paths.size();
  return m_sets[dest] = std::move(fresh);
}

SourceRouteHeader
dispatch(RouteSet& routes, std::uint32_t flow_id, std::uint32_t packet_seq, std::optional<std::uint32_t> description_index)
{
  if (routes.paths.empty())
    throw InputError("dispatch on an empty route set");
  std::size_t index = 0;
  if (description_index) {
    index = *description_index % routes.paths.size();
  } else {
    index = routes.next_path_index % routes.paths.size();
    routes.next_path_index = (index + 1) % routes.paths.size();
  }
  SourceRouteHeader h;
  h.hops = routes.paths[index].hops;
  h.next_index = 1;
  h.flow_id = flow_id;
  h.packet_seq = packet_seq;
  h.description_index = description_index;
  return h;
}

ForwardAction
forward(const SourceRouteHeader& header, const NodeState& state, const ForwardOptions& options)
{
  using namespace forward_action;
  const NodeId self = state.self_id();
  if (self == header.destination())
    return Deliver{};
  if (header.next_index == 0 || header.next_index >= header.hops.size())
    return Drop{DropReason::NoRoute};
  if (header.hops_taken() + 1 > options.max_hops)
    return Drop{DropReason::Ttl};

  const NodeId listed = header.hops[header.next_index];
  if (!options.route_recovery || state.is_sym_neighbor(listed)) {
    SourceRouteHeader next = header;
    ++next.next_index;
    return Forward{listed, std::move(next)};
  }

  if (header.recovery_count >= options.max_recoveries)
    return Drop{DropReason::NoRoute};
  const Graph& g = state.graph();
  if (!g.has_vertex(header.destination()))
    return Drop{DropReason::NoRoute};
  auto repair = get_path(dijkstra(g, self), header.destination());
  if (!repair || repair->hops.size() < 2)
    return Drop{DropReason::NoRoute};

  SourceRouteHeader next = header;
  next.hops.resize(header.next_index); // keep the consumed prefix, ending at self
  next.hops.insert(next.hops.end(), repair->hops.begin() + 1, repair->hops.end());
  ++next.recovery_count;
  ++next.next_index;
  return Recovered{repair->hops[1], std::move(next)};
}

std::string_view
to_string(forward_action::DropReason reason)
{
  switch (reason) {
  case forward_action::DropReason::NoRoute:
    return "no-route";
  case forward_action::DropReason::Ttl:
    return "ttl";
  }
  return "unknown";
}

std::optional<NodeId>
HopByHopTable::next_hop(const NodeState& state, NodeId dest)
{
  if (m_version != state.topology_version())
    rebuild(state);
  auto it = m_next.find(dest);
  if (it == m_next.end())
    return std::nullopt;
  return it->second;
}

void
HopByHopTable::rebuild(const NodeState& state)
{
  ++m_rebuilds;
  m_version = state.topology_version();
  m_next.clear();
  const SourceTree tree = dijkstra(state.graph(), state.self_id());
  for (const auto& [v, d] : tree.distance) {
    if (v == tree.root)
      continue;
    NodeId hop = v;
    while (tree.predecessor.at(hop) != tree.root)
      hop = tree.predecessor.at(hop);
    m_next[v] = hop;
  }
}

} // namespace mpolsr
