#include "mpolsr/netgraph.hpp"

#include "mpolsr/error.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

namespace mpolsr {

namespace {

bool
head_less(const std::pair<NodeId, double>& arc, NodeId head)
{
  return arc.first < head;
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// Node id to dense index, by table when ids are small.
class IndexLookup
{
public:
  explicit IndexLookup(const Graph& graph)
    : m_graph(graph)
  {
    const std::size_t n = graph.vertex_count();
    if (n == 0 || graph.vertex_at(n - 1) > 4 * n + 1024)
      return;
    m_table.assign(static_cast<std::size_t>(graph.vertex_at(n - 1)) + 1, kNone);
    for (std::size_t i = 0; i < n; ++i)
      m_table[graph.vertex_at(i)] = i;
  }

  std::size_t operator()(NodeId v) const
  {
    if (!m_table.empty())
      return v < m_table.size() ? m_table[v] : kNone;
    return m_graph.index_of(v).value_or(kNone);
  }

private:
  const Graph& m_graph;
  std::vector<std::size_t> m_table;
};

struct DenseTree
{
  std::vector<double> dist;
  std::vector<std::size_t> pred;
  std::vector<char> settled;
};

// Dense indices follow ascending node ids, so ordering the frontier by
// (distance, index) settles the smallest id first among equals.
DenseTree
dense_dijkstra(const Graph& graph, const IndexLookup& lookup, std::size_t root)
{
  const std::size_t n = graph.vertex_count();
  DenseTree t{std::vector<double>(n, std::numeric_limits<double>::infinity()),
              std::vector<std::size_t>(n, kNone),
              std::vector<char>(n, 0)};

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  t.dist[root] = 0.0;
  frontier.push({0.0, root});

  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (t.settled[u])
      continue;
    t.settled[u] = 1;
    for (const auto& [head, c] : graph.out_arcs_at(u)) {
      const std::size_t v = lookup(head);
      if (t.settled[v])
        continue;
      const double nd = d + c;
      if (nd < t.dist[v]) {
        t.dist[v] = nd;
        t.pred[v] = u;
        frontier.push({nd, v});
      }
    }
  }
  return t;
}

} // namespace

std::optional<std::size_t>
Graph::index_of(NodeId v) const
{
  auto it = std::lower_bound(m_ids.begin(), m_ids.end(), v);
  if (it == m_ids.end() || *it != v)
    return std::nullopt;
  return static_cast<std::size_t>(it - m_ids.begin());
}

std::size_t
Graph::ensure_vertex(NodeId v)
{
  auto it = std::lower_bound(m_ids.begin(), m_ids.end(), v);
  const auto pos = static_cast<std::size_t>(it - m_ids.begin());
  if (it == m_ids.end() || *it != v) {
    m_ids.insert(it, v);
    m_out.insert(m_out.begin() + static_cast<std::ptrdiff_t>(pos), Adjacency{});
  }
  return pos;
}

const double*
Graph::find_cost(NodeId tail, NodeId head) const
{
  const auto t = index_of(tail);
  if (!t)
    return nullptr;
  const auto& out = m_out[*t];
  auto it = std::lower_bound(out.begin(), out.end(), head, head_less);
  return it != out.end() && it->first == head ? &it->second : nullptr;
}

Graph::Graph(std::vector<NodeId> vertices, std::vector<std::pair<Arc, double>> arcs)
{
  NodeId max_id = 0;
  for (const auto& [arc, cost] : arcs) {
    if (arc.tail == arc.head)
      throw InputError("self loop on node " + std::to_string(arc.tail));
    if (!(cost > 0.0) || !std::isfinite(cost))
      throw InputError("arc cost must be positive and finite");
    max_id = std::max({max_id, arc.tail, arc.head});
  }
  for (NodeId v : vertices)
    max_id = std::max(max_id, v);

  // Topology graphs have small dense ids; a lookup table avoids sorting
  // every repeated endpoint. Sparse ids fall back to sort and unique.
  const std::size_t total = vertices.size() + arcs.size();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> slot;
  if (max_id <= 4 * total + 1024) {
    slot.assign(static_cast<std::size_t>(max_id) + 1, none);
    auto mark = [&](NodeId v) { slot[v] = 0; };
    for (NodeId v : vertices)
      mark(v);
    for (const auto& [arc, cost] : arcs) {
      mark(arc.tail);
      mark(arc.head);
    }
    for (std::size_t v = 0; v < slot.size(); ++v)
      if (slot[v] != none) {
        slot[v] = m_ids.size();
        m_ids.push_back(static_cast<NodeId>(v));
      }
  } else {
    for (const auto& [arc, cost] : arcs) {
      vertices.push_back(arc.tail);
      vertices.push_back(arc.head);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    m_ids = std::move(vertices);
  }
  m_out.resize(m_ids.size());

  auto tail_index = [&](NodeId tail) { return slot.empty() ? *index_of(tail) : slot[tail]; };
  std::vector<std::size_t> degree(m_ids.size(), 0);
  for (const auto& [arc, cost] : arcs)
    ++degree[tail_index(arc.tail)];
  for (std::size_t i = 0; i < m_out.size(); ++i)
    m_out[i].reserve(degree[i]);
  for (const auto& [arc, cost] : arcs)
    m_out[tail_index(arc.tail)].push_back({arc.head, cost});

  for (auto& out : m_out) {
    // Insertion sort: stable, allocation free and quick on short lists.
    for (std::size_t i = 1; i < out.size(); ++i) {
      const auto item = out[i];
      std::size_t j = i;
      for (; j > 0 && out[j - 1].first > item.first; --j)
        out[j] = out[j - 1];
      out[j] = item;
    }
    // Repeated arcs keep the last cost given.
    std::size_t kept = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (kept > 0 && out[kept - 1].first == out[i].first)
        out[kept - 1].second = out[i].second;
      else
        out[kept++] = out[i];
    }
    out.resize(kept);
  }
}

Graph
Graph::from_sorted(std::vector<NodeId> ids, std::vector<Adjacency> out)
{
  assert(ids.size() == out.size());
  assert(std::adjacent_find(ids.begin(), ids.end(), std::greater_equal<>()) == ids.end());
  Graph g;
  g.m_ids = std::move(ids);
  g.m_out = std::move(out);
  return g;
}

void
Graph::add_vertex(NodeId v)
{
  ensure_vertex(v);
}

void
Graph::add_arc(NodeId tail, NodeId head, double cost)
{
  if (tail == head)
    throw InputError("self loop on node " + std::to_string(tail));
  if (!(cost > 0.0) || !std::isfinite(cost))
    throw InputError("arc cost must be positive and finite");
  ensure_vertex(head);
  auto& out = m_out[ensure_vertex(tail)];
  auto it = std::lower_bound(out.begin(), out.end(), head, head_less);
  if (it != out.end() && it->first == head)
    it->second = cost;
  else
    out.insert(it, {head, cost});
}

void
Graph::add_link(NodeId a, NodeId b, double cost)
{
  add_arc(a, b, cost);
  add_arc(b, a, cost);
}

void
Graph::remove_vertex(NodeId v)
{
  const auto idx = index_of(v);
  if (!idx)
    return;
  m_ids.erase(m_ids.begin() + static_cast<std::ptrdiff_t>(*idx));
  m_out.erase(m_out.begin() + static_cast<std::ptrdiff_t>(*idx));
  for (auto& out : m_out) {
    auto it = std::lower_bound(out.begin(), out.end(), v, head_less);
    if (it != out.end() && it->first == v)
      out.erase(it);
  }
}

void
Graph::remove_arc(NodeId tail, NodeId head)
{
  const auto t = index_of(tail);
  if (!t)
    return;
  auto& out = m_out[*t];
  auto it = std::lower_bound(out.begin(), out.end(), head, head_less);
  if (it != out.end() && it->first == head)
    out.erase(it);
}

bool
Graph::has_arc(NodeId tail, NodeId head) const
{
  return find_cost(tail, head) != nullptr;
}

double
Graph::cost(NodeId tail, NodeId head) const
{
  if (const double* c = find_cost(tail, head))
    return *c;
  throw InputError("no arc " + std::to_string(tail) + "->" + std::to_string(head));
}

void
Graph::set_cost(NodeId tail, NodeId head, double cost)
{
  auto* c = const_cast<double*>(find_cost(tail, head));
  if (!c)
    throw InputError("no arc " + std::to_string(tail) + "->" + std::to_string(head));
  if (!(cost > 0.0) || !std::isfinite(cost))
    throw InputError("arc cost must be positive and finite");
  *c = cost;
}

std::set<NodeId>
Graph::vertices() const
{
  return std::set<NodeId>(m_ids.begin(), m_ids.end());
}

std::vector<Arc>
Graph::arcs() const
{
  std::vector<Arc> out;
  for (std::size_t i = 0; i < m_ids.size(); ++i)
    for (const auto& [head, c] : m_out[i])
      out.push_back({m_ids[i], head});
  return out;
}

std::size_t
Graph::arc_count() const
{
  std::size_t n = 0;
  for (const auto& out : m_out)
    n += out.size();
  return n;
}

const Graph::Adjacency&
Graph::out_arcs(NodeId v) const
{
  static const Adjacency empty;
  const auto idx = index_of(v);
  return idx ? m_out[*idx] : empty;
}

bool
Path::contains(NodeId v) const
{
  return std::find(hops.begin(), hops.end(), v) != hops.end();
}

bool
Path::uses_arc(NodeId tail, NodeId head) const
{
  for (std::size_t i = 0; i + 1 < hops.size(); ++i)
    if (hops[i] == tail && hops[i + 1] == head)
      return true;
  return false;
}

std::ostream&
operator<<(std::ostream& os, const Path& p)
{
  os << '[';
  for (std::size_t i = 0; i < p.hops.size(); ++i)
    os << (i ? "," : "") << p.hops[i];
  return os << ']';
}

CostTransform
CostTransform::multiplicative(double a, double b)
{
  if (!(a >= b) || !(b >= 1.0) || !std::isfinite(a))
    throw InputError("cost transform factors must satisfy a >= b >= 1");
  std::ostringstream name;
  name << "mul:" << a << ',' << b;
  return CostTransform{name.str(), [a](double c) { return a * c; }, [b](double c) { return b * c; }};
}

CostTransform
CostTransform::from_name(const std::string& name)
{
  if (name == "2c") {
    auto t = doubling();
    t.name = "2c";
    return t;
  }
  if (name == "link_disjoint") {
    auto t = multiplicative(100.0, 1.0);
    t.name = name;
    return t;
  }
  if (name == "node_disjoint") {
    auto t = multiplicative(100.0, 100.0);
    t.name = name;
    return t;
  }
  if (name.rfind("mul:", 0) == 0) {
    std::istringstream in(name.substr(4));
    double a = 0.0;
    double b = 0.0;
    char comma = 0;
    if (in >> a >> comma >> b && comma == ',' && (in >> std::ws).eof())
      return multiplicative(a, b);
  }
  throw InputError("unknown cost transform '" + name + "'");
}

SourceTree
dijkstra(const Graph& graph, NodeId source)
{
  const auto root = graph.index_of(source);
  if (!root)
    throw InputError("unknown source node " + std::to_string(source));

  const DenseTree t = dense_dijkstra(graph, IndexLookup(graph), *root);
  SourceTree tree;
  tree.root = source;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    if (!t.settled[v])
      continue;
    tree.distance.emplace_hint(tree.distance.end(), graph.vertex_at(v), t.dist[v]);
    if (t.pred[v] != kNone)
      tree.predecessor.emplace_hint(tree.predecessor.end(), graph.vertex_at(v), graph.vertex_at(t.pred[v]));
  }
  return tree;
}

std::optional<Path>
get_path(const SourceTree& tree, NodeId dest)
{
  if (!tree.reaches(dest))
    return std::nullopt;
  Path p;
  for (NodeId v = dest;; v = tree.predecessor.at(v)) {
    p.hops.push_back(v);
    if (v == tree.root)
      break;
  }
  std::reverse(p.hops.begin(), p.hops.end());
  return p;
}

Graph
penalize(const Graph& graph, const Path& path, const CostTransform& transform)
{
  Graph next = graph;
  const IndexLookup lookup(graph);
  std::vector<char> touched(graph.vertex_count(), 0);
  for (NodeId v : path.hops)
    if (const std::size_t i = lookup(v); i != kNone)
      touched[i] = 1;

  // Only arcs with an endpoint on the path can change.
  for (std::size_t t = 0; t < next.m_out.size(); ++t) {
    const NodeId tail = next.m_ids[t];
    for (auto& [head, c] : next.m_out[t]) {
      const bool head_on = touched[lookup(head)] != 0;
      if (!head_on && !touched[t])
        continue;
      if (head_on && touched[t] && (path.uses_arc(tail, head) || path.uses_arc(head, tail)))
        c = transform.on_path(c);
      else if (head_on)
        c = transform.toward_path(c);
    }
  }
  return next;
}

namespace {

void
check_endpoints(const Graph& graph, NodeId source, NodeId dest, std::size_t n_paths)
{
  if (!graph.has_vertex(source))
    throw InputError("unknown source node " + std::to_string(source));
  if (!graph.has_vertex(dest))
    throw InputError("unknown destination node " + std::to_string(dest));
  if (n_paths == 0)
    throw InputError("n_paths must be positive");
}

} // namespace

std::vector<Path>
multipath_dijkstra(NodeId source, NodeId dest, const Graph& graph, std::size_t n_paths, const CostTransform& transform)
{
  check_endpoints(graph, source, dest, n_paths);

  // Flat arc arrays let each round penalize costs in place.
  const IndexLookup lookup(graph);
  const std::size_t n = graph.vertex_count();
  std::vector<std::size_t> first(n + 1, 0);
  std::vector<std::size_t> head;
  std::vector<double> cost;
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& [h, c] : graph.out_arcs_at(v)) {
      head.push_back(lookup(h));
      cost.push_back(c);
    }
    first[v + 1] = head.size();
  }

  const std::size_t root = lookup(source);
  const std::size_t target = lookup(dest);
  std::vector<double> dist(n);
  std::vector<std::size_t> pred(n);
  std::vector<char> settled(n);
  std::vector<std::size_t> position(n);
  std::vector<Path> paths;
  using Entry = std::pair<double, std::size_t>;
  for (std::size_t i = 0; i < n_paths; ++i) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(pred.begin(), pred.end(), kNone);
    std::fill(settled.begin(), settled.end(), 0);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    dist[root] = 0.0;
    frontier.push({0.0, root});
    while (!frontier.empty()) {
      const auto [d, u] = frontier.top();
      frontier.pop();
      if (settled[u])
        continue;
      settled[u] = 1;
      for (std::size_t a = first[u]; a < first[u + 1]; ++a) {
        const std::size_t v = head[a];
        if (settled[v])
          continue;
        const double nd = d + cost[a];
        if (nd < dist[v]) {
          dist[v] = nd;
          pred[v] = u;
          frontier.push({nd, v});
        }
      }
    }
    if (!settled[target])
      throw RouteNotFound("no route from " + std::to_string(source) + " to " + std::to_string(dest));

    std::vector<std::size_t> hops;
    for (std::size_t v = target; v != kNone; v = pred[v])
      hops.push_back(v);
    std::reverse(hops.begin(), hops.end());
    Path path;
    for (std::size_t v : hops)
      path.hops.push_back(graph.vertex_at(v));
    paths.push_back(std::move(path));
    if (i + 1 == n_paths)
      break;

    // Shortest paths are simple, so path arcs join consecutive positions.
    std::fill(position.begin(), position.end(), kNone);
    for (std::size_t k = 0; k < hops.size(); ++k)
      position[hops[k]] = k;
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t a = first[t]; a < first[t + 1]; ++a) {
        const std::size_t h = head[a];
        if (position[h] == kNone)
          continue;
        const bool on_path = position[t] != kNone &&
                             (position[t] + 1 == position[h] || position[h] + 1 == position[t]);
        cost[a] = on_path ? transform.on_path(cost[a]) : transform.toward_path(cost[a]);
      }
  }
  return paths;
}

std::vector<Path>
multipath_node_delete(NodeId source, NodeId dest, const Graph& graph, std::size_t n_paths)
{
  check_endpoints(graph, source, dest, n_paths);

  std::vector<Path> paths;
  Graph current = graph;
  while (paths.size() < n_paths) {
    auto path = get_path(dijkstra(current, source), dest);
    if (!path)
      break;
    // A direct arc has no intermediate node to delete; drop the arc itself
    // so it is reported once.
    if (path->hops.size() <= 2)
      current.remove_arc(source, dest);
    for (std::size_t i = 1; i + 1 < path->hops.size(); ++i)
      current.remove_vertex(path->hops[i]);
    paths.push_back(std::move(*path));
    if (source == dest)
      break;
  }
  return paths;
}

double
path_cost(const Graph& graph, const Path& path)
{
  if (path.hops.empty())
    throw InputError("empty path");
  if (!graph.has_vertex(path.hops.front()))
    throw InputError("path starts outside the graph");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.hops.size(); ++i)
    total += graph.cost(path.hops[i], path.hops[i + 1]);
  return total;
}

bool
arc_disjoint(const Path& a, const Path& b)
{
  for (std::size_t i = 0; i + 1 < a.hops.size(); ++i)
    if (b.uses_arc(a.hops[i], a.hops[i + 1]) || b.uses_arc(a.hops[i + 1], a.hops[i]))
      return false;
  return true;
}

bool
node_disjoint(const Path& a, const Path& b)
{
  auto endpoint = [&](NodeId v) {
    return v == a.source() || v == a.destination() || v == b.source() || v == b.destination();
  };
  for (std::size_t i = 1; i + 1 < a.hops.size(); ++i)
    if (!endpoint(a.hops[i]) && b.contains(a.hops[i]))
      return false;
  return true;
}

Graph
parse_topology(std::istream& in)
{
  Graph g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream fields(line);
    long long tail = 0;
    long long head = 0;
    double cost = 0.0;
    if (!(fields >> tail)) {
      if ((fields.clear(), fields >> std::ws).eof())
        continue;
      throw InputError("topology line " + std::to_string(lineno) + ": expected 'tail head cost'");
    }
    if (!(fields >> head >> cost) || !(fields >> std::ws).eof() || tail < 0 || head < 0)
      throw InputError("topology line " + std::to_string(lineno) + ": expected 'tail head cost'");
    try {
      g.add_arc(static_cast<NodeId>(tail), static_cast<NodeId>(head), cost);
    } catch (const InputError& e) {
      throw InputError("topology line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return g;
}

} // namespace mpolsr
