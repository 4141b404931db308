#ifndef MPOLSR_MP_ROUTING_HPP
#define MPOLSR_MP_ROUTING_HPP

#include "mpolsr/netgraph.hpp"
#include "mpolsr/olsr_state.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace mpolsr {

/// Hop list carried by every source-routed data packet.
struct SourceRouteHeader
{
  std::vector<NodeId> hops;
  /// Index into `hops` of the next node to visit; hops[next_index - 1] is
  /// the node currently holding the packet.
  std::size_t next_index = 1;
  std::uint32_t flow_id = 0;
  std::uint32_t packet_seq = 0;
  std::optional<std::uint32_t> description_index;
  std::uint32_t recovery_count = 0;

  NodeId source() const { return hops.front(); }
  NodeId destination() const { return hops.back(); }
  NodeId current() const { return hops[next_index - 1]; }
  /// Hops already traversed.
  std::size_t hops_taken() const { return next_index - 1; }

  bool operator==(const SourceRouteHeader&) const = default;
};

struct RouteSet
{
  NodeId destination = 0;
  std::vector<Path> paths;
  std::uint64_t topology_version = 0;
  std::size_t next_path_index = 0;
};

/// Builds the local graph and runs Multipath Dijkstra towards `dest`.
/// Throws RouteNotFound when `dest` is unknown or unreachable.
RouteSet compute_routes(const NodeState& state, NodeId dest, std::size_t n_paths, const CostTransform& transform);

///
/// \brief On-demand route cache of one source node.
///
/// A cached RouteSet is reused iff the node's topology version has not moved
/// since it was computed. The round-robin cursor survives recomputation.
///
class RouteCache
{
public:
  RouteSet& routes_for(const NodeState& state, NodeId dest, std::size_t n_paths, const CostTransform& transform);
  std::size_t computations() const { return m_computations; }
  void clear() { m_sets.clear(); }

private:
  std::map<NodeId, RouteSet> m_sets;
  std::size_t m_computations = 0;
};

/// Round-robin assignment: the packet takes paths[next_path_index] and the
/// cursor advances. With a description index the path is chosen as
/// description_index mod |paths| and the cursor is left alone.
SourceRouteHeader dispatch(RouteSet& routes,
                           std::uint32_t flow_id,
                           std::uint32_t packet_seq,
                           std::optional<std::uint32_t> description_index = std::nullopt);

namespace forward_action {

struct Deliver
{
};

struct Forward
{
  NodeId next_hop;
  SourceRouteHeader header;
};

struct Recovered
{
  NodeId next_hop;
  SourceRouteHeader header;
};

enum class DropReason
{
  NoRoute,
  Ttl,
};

struct Drop
{
  DropReason reason;
};

} // namespace forward_action

using ForwardAction = std::variant<forward_action::Deliver,
                                   forward_action::Forward,
                                   forward_action::Recovered,
                                   forward_action::Drop>;

struct ForwardOptions
{
  /// Without recovery the listed next hop is used blindly.
  bool route_recovery = true;
  std::size_t max_hops = 32;
  std::uint32_t max_recoveries = 4;
};

/// Decides what the current hop does with a source-routed packet. When the
/// listed next hop is not a symmetric neighbor and recovery is enabled, a
/// single shortest path from this node replaces the rest of the route.
ForwardAction forward(const SourceRouteHeader& header, const NodeState& state, const ForwardOptions& options = {});

std::string_view to_string(forward_action::DropReason reason);

///
/// \brief Next-hop table for hop-by-hop (classical OLSR) forwarding.
///
/// Lazily rebuilt from the node's graph when its topology version moves.
///
class HopByHopTable
{
public:
  std::optional<NodeId> next_hop(const NodeState& state, NodeId dest);
  std::size_t rebuilds() const { return m_rebuilds; }

private:
  void rebuild(const NodeState& state);

  std::optional<std::uint64_t> m_version;
  std::map<NodeId, NodeId> m_next;
  std::size_t m_rebuilds = 0;
};

} // namespace mpolsr

#endif
