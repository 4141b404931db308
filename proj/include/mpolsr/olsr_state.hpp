#ifndef MPOLSR_OLSR_STATE_HPP
#define MPOLSR_OLSR_STATE_HPP

#include "mpolsr/netgraph.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace mpolsr {

enum class LinkStatus
{
  Asym,
  Sym,
  /// Symmetric, and the HELLO originator selected this neighbor as MPR.
  MprSelected,
};

struct HelloEntry
{
  NodeId neighbor;
  LinkStatus status;

  bool operator==(const HelloEntry&) const = default;
};

struct HelloMsg
{
  NodeId originator = 0;
  std::vector<HelloEntry> listed_neighbors;
  double emission_time = 0.0;
};

struct TcMsg
{
  NodeId originator = 0;
  /// The full symmetric neighbor set, not only MPR selectors.
  std::vector<NodeId> advertised_neighbors;
  std::uint16_t ansn = 0;
  /// Per-originator message sequence number, used for duplicate
  /// suppression while flooding.
  std::uint16_t msg_seq = 0;
  double emission_time = 0.0;
};

struct OlsrTimers
{
  double hello_interval = 2.0;
  double tc_interval = 5.0;
  double neighbor_hold = 6.0;
  double topology_hold = 15.0;

  static OlsrTimers from_intervals(double hello, double tc)
  {
    return {hello, tc, 3.0 * hello, 3.0 * tc};
  }
};

/// RFC 3626 sequence number comparison: true when `a` is newer than `b`.
bool seq_newer(std::uint16_t a, std::uint16_t b);

/// Greedy MPR heuristic. Every strict two-hop node (not self, not a
/// symmetric neighbor) ends up covered. Sole reachers are taken first, then
/// the neighbor covering most uncovered nodes, ties to the smaller id.
std::set<NodeId> select_mprs(NodeId self,
                             const std::set<NodeId>& sym_neighbors,
                             const std::map<NodeId, std::set<NodeId>>& two_hop);

/// True when every strict two-hop node is reachable through `mprs`.
bool mpr_coverage_holds(NodeId self,
                        const std::set<NodeId>& sym_neighbors,
                        const std::map<NodeId, std::set<NodeId>>& two_hop,
                        const std::set<NodeId>& mprs);

/// Optional hook giving the cost of arc tail->head; defaults to 1.0.
using ArcCostFn = std::function<double(NodeId tail, NodeId head)>;

///
/// \brief Per-node OLSR databases.
///
/// Single-owner mutable value. `topology_version()` changes exactly when the
/// vertex or link set seen by `build_graph()` changes. Expiry refreshes and
/// entries that only duplicate a known link leave it alone.
///
class NodeState
{
public:
  struct LinkEntry
  {
    LinkStatus status = LinkStatus::Asym; // Asym or Sym only
    double expiry = 0.0;
  };

  struct TwoHopEntry
  {
    std::vector<NodeId> nodes; // sorted, unique
    double expiry = 0.0;
  };

  struct TopologyEntry
  {
    std::vector<NodeId> advertised; // sorted, unique
    std::uint16_t ansn = 0;
    double expiry = 0.0;
  };

  explicit NodeState(NodeId self, OlsrTimers timers = {});

  NodeId self_id() const { return m_self; }
  const OlsrTimers& timers() const { return m_timers; }
  double clock() const { return m_clock; }
  std::uint64_t topology_version() const { return m_version; }

  void process_hello(const HelloMsg& msg, double now);
  void process_tc(const TcMsg& msg, double now);
  /// Removes every entry whose expiry is at or before `now`; reselects MPRs
  /// when the neighborhood changed.
  void expire_entries(double now);
  /// Link-layer feedback: forget the neighbor immediately. Returns false
  /// when it was not in the link set.
  bool purge_neighbor(NodeId neighbor);

  HelloMsg generate_hello(double now) const;
  /// Advertises every symmetric neighbor; the ANSN is bumped iff the set
  /// differs from the previous TC.
  TcMsg generate_tc(double now);

  /// Recomputes the MPR set from the current neighborhood and stores it.
  /// Neighborhood changes mark the set stale; readers refresh it on demand.
  const std::set<NodeId>& update_mprs();
  std::set<NodeId> select_mprs() const;

  /// Vertices: self and every node known from the link, two-hop and
  /// topology sets. Arcs (both directions): symmetric links, two-hop links
  /// of symmetric neighbors and advertised topology links. Advertised links
  /// touching self are skipped since the link set is authoritative there.
  Graph build_graph(const ArcCostFn& cost = {}) const;
  /// build_graph() with unit costs, cached until the topology version
  /// moves.
  const Graph& graph() const;

  bool is_sym_neighbor(NodeId n) const;
  std::set<NodeId> sym_neighbors() const;
  std::map<NodeId, std::set<NodeId>> two_hop_view() const;

  const std::map<NodeId, LinkEntry>& link_set() const { return m_links; }
  const std::map<NodeId, TwoHopEntry>& two_hop_set() const { return m_two_hop; }
  const std::set<NodeId>& mpr_set() const;
  const std::map<NodeId, double>& mpr_selector_set() const { return m_selectors; }
  const std::map<NodeId, TopologyEntry>& topology_set() const { return m_topology; }
  bool is_mpr_selector(NodeId n) const { return m_selectors.count(n) != 0; }

private:
  void advance_clock(double now);
  void touch() { ++m_version; }
  void ref_vertex(NodeId v, int delta);
  void ref_link(NodeId a, NodeId b, int delta);
  void ref_reach(NodeId via, const std::vector<NodeId>& nodes, int delta);
  void replace_reach(NodeId via, const std::vector<NodeId>& before, const std::vector<NodeId>& after);
  void set_link_status(NodeId n, std::optional<LinkStatus> before, std::optional<LinkStatus> after);

  NodeId m_self;
  OlsrTimers m_timers;
  double m_clock = 0.0;
  std::uint64_t m_version = 0;

  std::map<NodeId, LinkEntry> m_links;
  std::map<NodeId, TwoHopEntry> m_two_hop;
  mutable std::set<NodeId> m_mprs;
  mutable bool m_mprs_stale = false;
  std::map<NodeId, double> m_selectors;
  std::map<NodeId, TopologyEntry> m_topology;

  // Reference counts over every source that contributes to the graph.
  // Links are keyed smaller id first; a vertex is referenced once per
  // live link touching it.
  std::map<NodeId, std::uint32_t> m_vertex_refs;
  std::unordered_map<std::uint64_t, std::uint32_t> m_link_refs;
  std::map<NodeId, std::vector<NodeId>> m_adjacent; // live links, sorted
  mutable std::optional<std::pair<std::uint64_t, Graph>> m_graph_cache;

  std::set<NodeId> m_last_advertised;
  std::uint16_t m_ansn = 0;
  std::uint16_t m_msg_seq = 0;
};

} // namespace mpolsr

#endif
