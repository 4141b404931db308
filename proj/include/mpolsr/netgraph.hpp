#ifndef MPOLSR_NETGRAPH_HPP
#define MPOLSR_NETGRAPH_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mpolsr {

using NodeId = std::uint32_t;

struct Arc
{
  NodeId tail;
  NodeId head;

  Arc reversed() const { return {head, tail}; }
  auto operator<=>(const Arc&) const = default;
};

struct Path;
struct CostTransform;

///
/// \brief Directed weighted topology snapshot.
///
/// Every arc carries a strictly positive, finite cost. Adding an arc
/// implicitly adds both endpoints to the vertex set.
///
class Graph
{
public:
  /// Out-arcs as (head, cost), sorted by head.
  using Adjacency = std::vector<std::pair<NodeId, double>>;

  Graph() = default;
  /// Bulk construction. Arc endpoints join the vertex set; a repeated arc
  /// keeps its last cost. Same preconditions as add_arc().
  Graph(std::vector<NodeId> vertices, std::vector<std::pair<Arc, double>> arcs);
  /// Adopts prepared storage: `ids` strictly ascending, `out[i]` the
  /// out-arcs of ids[i] sorted by head, every head present in `ids`.
  static Graph from_sorted(std::vector<NodeId> ids, std::vector<Adjacency> out);

  void add_vertex(NodeId v);
  /// Inserts or overwrites the arc cost. Throws InputError on a
  /// non-positive or non-finite cost, or on a self loop.
  void add_arc(NodeId tail, NodeId head, double cost = 1.0);
  /// Both directions with the same cost.
  void add_link(NodeId a, NodeId b, double cost = 1.0);
  void remove_vertex(NodeId v);
  void remove_arc(NodeId tail, NodeId head);

  bool has_vertex(NodeId v) const { return index_of(v).has_value(); }
  bool has_arc(NodeId tail, NodeId head) const;
  /// Throws InputError when the arc is absent.
  double cost(NodeId tail, NodeId head) const;
  void set_cost(NodeId tail, NodeId head, double cost);

  std::set<NodeId> vertices() const;
  std::vector<Arc> arcs() const;
  std::size_t vertex_count() const { return m_ids.size(); }
  std::size_t arc_count() const;

  /// Out-neighbors of `v` with their costs, ordered by head id.
  const Adjacency& out_arcs(NodeId v) const;

  /// Dense position of `v` in ascending vertex order.
  std::optional<std::size_t> index_of(NodeId v) const;
  NodeId vertex_at(std::size_t index) const { return m_ids[index]; }
  const Adjacency& out_arcs_at(std::size_t index) const { return m_out[index]; }

  bool operator==(const Graph&) const = default;

private:
  friend Graph penalize(const Graph& graph, const Path& path, const CostTransform& transform);

  std::size_t ensure_vertex(NodeId v);
  const double* find_cost(NodeId tail, NodeId head) const;

  std::vector<NodeId> m_ids;
  std::vector<Adjacency> m_out;
};

struct Path
{
  std::vector<NodeId> hops;

  NodeId source() const { return hops.front(); }
  NodeId destination() const { return hops.back(); }
  std::size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }
  bool contains(NodeId v) const;
  /// True when (tail, head) is a consecutive pair of this path.
  bool uses_arc(NodeId tail, NodeId head) const;

  bool operator==(const Path&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Path& p);

///
/// \brief The pair of cost-increase functions used between Multipath
/// Dijkstra iterations.
///
/// `on_path` is applied to arcs of the last path (or whose reverse is on
/// it); `toward_path` to the remaining arcs whose head is a vertex of the
/// last path. Both must satisfy on_path(c) >= toward_path(c) >= c.
///
struct CostTransform
{
  std::string name;
  std::function<double(double)> on_path;
  std::function<double(double)> toward_path;

  /// c -> a*c and c -> b*c with a >= b >= 1.
  static CostTransform multiplicative(double on_path_factor, double toward_path_factor);
  /// The experimental setting: both functions double the cost.
  static CostTransform doubling() { return multiplicative(2.0, 2.0); }
  /// Accepts "2c" (the default), "link_disjoint", "node_disjoint" and
  /// "mul:<a>,<b>". Throws InputError for anything else.
  static CostTransform from_name(const std::string& name);
};

struct SourceTree
{
  NodeId root = 0;
  std::map<NodeId, NodeId> predecessor;
  std::map<NodeId, double> distance;

  bool reaches(NodeId v) const { return distance.count(v) != 0; }
};

/// Standard Dijkstra. Among equal tentative distances the smallest node id
/// is settled first, and a predecessor is only replaced on a strictly
/// shorter distance. Throws InputError when `source` is not a vertex.
SourceTree dijkstra(const Graph& graph, NodeId source);

std::optional<Path> get_path(const SourceTree& tree, NodeId dest);

/// One application of the cost transform against a single found path.
Graph penalize(const Graph& graph, const Path& path, const CostTransform& transform);

/// Returns exactly `n_paths` paths in discovery order; paths may repeat
/// when the topology offers no alternative. Throws RouteNotFound when
/// `dest` is unreachable and InputError on unknown endpoints.
std::vector<Path> multipath_dijkstra(NodeId source,
                                     NodeId dest,
                                     const Graph& graph,
                                     std::size_t n_paths,
                                     const CostTransform& transform = CostTransform::doubling());

/// Node-deletion variant: intermediate vertices of every found path are
/// removed before the next search. Returns up to `n_paths` node-disjoint
/// paths; a shorter result is the shortfall indicator.
std::vector<Path> multipath_node_delete(NodeId source, NodeId dest, const Graph& graph, std::size_t n_paths);

/// Throws InputError when a hop pair is not an arc of `graph`.
double path_cost(const Graph& graph, const Path& path);
/// No undirected link is shared by the two paths.
bool arc_disjoint(const Path& a, const Path& b);
/// No vertex is shared, ignoring the endpoints of either path.
bool node_disjoint(const Path& a, const Path& b);

/// Reads `tail head cost` lines; `#` starts a comment.
Graph parse_topology(std::istream& in);

} // namespace mpolsr

#endif
