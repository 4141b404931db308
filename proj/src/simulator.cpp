#include "mpolsr/simulator.hpp"

#include "mpolsr/error.hpp"
#include "mpolsr/mdc_codec.hpp"
#include "mpolsr/mobility.hpp"
#include "mpolsr/mp_routing.hpp"
#include "mpolsr/redundancy.hpp"
#include "mpolsr/rng.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <variant>

namespace mpolsr {

namespace {

constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
constexpr double kExpiryScanPeriod = 0.5;
constexpr double kDuplicateHold = 30.0;
constexpr std::uint8_t kTcTtl = 255;

enum RngStream : std::uint64_t
{
  kMobilityStream = 1,
  kTrafficStream = 2,
  kJitterStream = 3,
};

enum class EventKind
{
  HelloEmit,
  TcEmit,
  ExpiryScan,
  MobilityUpdate,
  AppSend,
  TransmitComplete,
  FlushTimer,
  ScriptedMove,
};

struct Event
{
  double time;
  std::uint64_t seq;
  EventKind kind;
  NodeId node;
  std::uint64_t arg;
};

struct LaterFirst
{
  bool operator()(const Event& a, const Event& b) const
  {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct TcFrame
{
  TcMsg msg;
  std::uint8_t ttl = kTcTtl;
};

struct DataFrame
{
  /// Index of the packet record, or of the description record for MDC.
  std::uint64_t record = 0;
  bool is_description = false;
  std::uint32_t flow = 0;
  NodeId dst = 0;
  SourceRouteHeader header;
  /// Hops taken under hop-by-hop forwarding.
  std::uint32_t hops = 0;
  std::shared_ptr<const Projection> description;
};

struct Frame
{
  NodeId sender = 0;
  NodeId receiver = kBroadcast;
  std::size_t bytes = 0;
  std::variant<HelloMsg, TcFrame, DataFrame> body;

  bool is_control() const { return !std::holds_alternative<DataFrame>(body); }
};

struct SeenTc
{
  double expiry = 0.0;
  bool forwarded = false;
};

struct SimNode
{
  explicit SimNode(NodeId id, OlsrTimers timers)
    : olsr(id, timers)
  {
  }

  NodeState olsr;
  RouteCache routes;
  HopByHopTable table;
  std::deque<Frame> control_queue;
  std::deque<Frame> data_queue;
  std::optional<Frame> in_service;
  std::map<std::pair<NodeId, std::uint16_t>, SeenTc> seen_tc;
  std::optional<std::uint16_t> last_sent_ansn;

  std::size_t queued() const { return control_queue.size() + data_queue.size(); }
};

struct Flow
{
  FlowSpec spec;
  std::uint32_t next_seq = 0;
  std::optional<GeometricalBuffer> buffer;
  /// Packet records waiting in the geometrical buffer.
  std::vector<std::uint64_t> buffered;
  double first_buffered = 0.0;
};

struct BlockRecord
{
  std::uint32_t flow = 0;
  std::uint32_t block_id = 0;
  double first_buffered = 0.0;
  std::vector<std::uint64_t> packets;
  std::vector<Projection> received;
  bool resolved = false;
};

struct DescriptionRecord
{
  std::uint64_t block = 0;
  PacketFate fate = PacketFate::InFlight;
};

Bytes
make_payload(std::uint32_t flow, std::uint32_t seq, std::size_t size)
{
  std::uint64_t state = (static_cast<std::uint64_t>(flow) << 32 | seq) ^ 0x5eed5eed5eed5eedULL;
  Bytes out(size);
  for (std::size_t i = 0; i < size; i += 8) {
    const std::uint64_t word = splitmix64(state);
    for (std::size_t b = 0; b < 8 && i + b < size; ++b)
      out[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  return out;
}

std::vector<FlowSpec>
choose_flows(const ScenarioConfig& c, Rng& rng)
{
  if (!c.flows.empty())
    return c.flows;
  std::vector<FlowSpec> pairs;
  for (NodeId s = 0; s < c.node_count; ++s)
    for (NodeId d = 0; d < c.node_count; ++d)
      if (s != d)
        pairs.push_back({s, d});
  const std::size_t n = std::min(c.n_sources, pairs.size());
  for (std::size_t i = 0; i < n; ++i)
    std::swap(pairs[i], pairs[i + rng.index(pairs.size() - i)]);
  pairs.resize(n);
  return pairs;
}

} // namespace

struct Simulator::Impl
{
  ScenarioConfig config;
  std::ostream* trace_out = nullptr;
  CostTransform transform;
  ForwardOptions forward_options;
  MobilityParams mobility_params;

  Rng mobility_rng;
  Rng traffic_rng;
  Rng jitter_rng;

  double clock = 0.0;
  std::uint64_t next_seq = 0;
  std::uint64_t executed = 0;
  std::priority_queue<Event, std::vector<Event>, LaterFirst> events;

  std::vector<SimNode> nodes;
  std::vector<MobileNode> motion;
  std::vector<FlowSpec> flow_specs;
  std::vector<Flow> flows;
  double traffic_stop = 0.0;

  RunTrace run;
  std::vector<BlockRecord> blocks;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> block_index;
  std::vector<DescriptionRecord> descriptions;
  std::optional<CodecConfig> codec;

  Impl(const ScenarioConfig& c, std::ostream* out)
    : config(c)
    , trace_out(out)
    , mobility_rng(Rng::derive(c.rng_seed, kMobilityStream))
    , traffic_rng(Rng::derive(c.rng_seed, kTrafficStream))
    , jitter_rng(Rng::derive(c.rng_seed, kJitterStream))
  {
    config.validate();
    transform = CostTransform::from_name(config.cost_transform);
    forward_options.route_recovery = config.protocol != Protocol::SrMpolsr;
    forward_options.max_hops = config.max_hops;
    forward_options.max_recoveries = config.max_recoveries;
    mobility_params = MobilityParams::from(config);
    traffic_stop = config.sim_duration - config.drain;

    const OlsrTimers timers = OlsrTimers::from_intervals(config.hello_interval, config.tc_interval);
    nodes.reserve(config.node_count);
    for (NodeId i = 0; i < config.node_count; ++i) {
      nodes.emplace_back(i, timers);
      auto fixed = config.initial_positions.find(i);
      motion.push_back(
        place_node(mobility_params, mobility_rng, fixed == config.initial_positions.end() ? nullptr : &fixed->second));
    }

    if (config.protocol == Protocol::MdcMpolsr) {
      codec = CodecConfig::standard(config.mdc.m, config.mdc.n);
      codec->validate();
      run.mdc = MdcStats{};
    }

    for (NodeId i = 0; i < config.node_count; ++i) {
      schedule(jitter_rng.uniform(0.0, config.hello_interval), EventKind::HelloEmit, i);
      schedule(jitter_rng.uniform(0.0, config.tc_interval), EventKind::TcEmit, i);
    }
    schedule(kExpiryScanPeriod, EventKind::ExpiryScan, 0);
    if (config.mobility == MobilityModel::RandomWaypoint)
      schedule(config.mobility_step, EventKind::MobilityUpdate, 0);
    for (std::size_t k = 0; k < config.moves.size(); ++k)
      schedule(config.moves[k].time, EventKind::ScriptedMove, config.moves[k].node, k);

    flow_specs = choose_flows(config, traffic_rng);
    for (std::size_t f = 0; f < flow_specs.size(); ++f) {
      Flow flow;
      flow.spec = flow_specs[f];
      if (codec)
        flow.buffer.emplace(config.mdc.m, config.payload_bytes);
      flows.push_back(std::move(flow));
      schedule(config.warmup + traffic_rng.uniform(0.0, config.packet_interval), EventKind::AppSend, flow_specs[f].src, f);
    }
  }

  void schedule(double at, EventKind kind, NodeId node, std::uint64_t arg = 0)
  {
    assert(at >= clock);
    events.push({at, next_seq++, kind, node, arg});
  }

  template <typename... Parts>
  void log(NodeId node, const char* kind, const Parts&... detail)
  {
    if (!trace_out)
      return;
    *trace_out << format_number(clock) << '\t' << node << '\t' << kind << '\t';
    ((*trace_out << detail), ...);
    *trace_out << '\n';
  }

  // ---- event loop ----------------------------------------------------------

  void run_until(double limit)
  {
    limit = std::min(limit, config.sim_duration);
    while (!events.empty() && events.top().time <= limit) {
      const Event ev = events.top();
      events.pop();
      clock = ev.time;
      ++executed;
      execute(ev);
    }
    clock = std::max(clock, limit);
  }

  void execute(const Event& ev)
  {
    switch (ev.kind) {
    case EventKind::HelloEmit:
      emit_hello(ev.node);
      break;
    case EventKind::TcEmit:
      emit_tc(ev.node);
      break;
    case EventKind::ExpiryScan:
      expiry_scan();
      break;
    case EventKind::MobilityUpdate:
      mobility_step(motion, mobility_params, config.mobility_step, mobility_rng);
      schedule(clock + config.mobility_step, EventKind::MobilityUpdate, 0);
      break;
    case EventKind::AppSend:
      app_send(static_cast<std::size_t>(ev.arg));
      break;
    case EventKind::TransmitComplete:
      transmit_complete(ev.node);
      break;
    case EventKind::FlushTimer:
      flush_timer(static_cast<std::size_t>(ev.arg >> 32), static_cast<std::uint32_t>(ev.arg));
      break;
    case EventKind::ScriptedMove: {
      const ScriptedMove& mv = config.moves[ev.arg];
      motion[mv.node].position = mv.to;
      motion[mv.node].waypoint = mv.to;
      log(mv.node, "move", format_number(mv.to.x), ',', format_number(mv.to.y));
      break;
    }
    }
  }

  double next_period(double interval) { return clock + interval - jitter_rng.uniform(0.0, interval / 4.0); }

  // ---- OLSR signaling ------------------------------------------------------

  void emit_hello(NodeId n)
  {
    SimNode& node = nodes[n];
    node.olsr.expire_entries(clock);
    HelloMsg msg = node.olsr.generate_hello(clock);
    const std::size_t bytes = 12 + 4 * msg.listed_neighbors.size();
    log(n, "hello-emit", msg.listed_neighbors.size(), " entries");
    enqueue(n, Frame{n, kBroadcast, bytes, std::move(msg)});
    schedule(next_period(config.hello_interval), EventKind::HelloEmit, n);
  }

  void emit_tc(NodeId n)
  {
    SimNode& node = nodes[n];
    node.olsr.expire_entries(clock);
    TcMsg msg = node.olsr.generate_tc(clock);
    const bool changed = node.last_sent_ansn && *node.last_sent_ansn != msg.ansn;
    if (!msg.advertised_neighbors.empty() || changed) {
      node.last_sent_ansn = msg.ansn;
      node.seen_tc[{n, msg.msg_seq}] = {clock + kDuplicateHold, true};
      const std::size_t bytes = 16 + 4 * msg.advertised_neighbors.size();
      log(n, "tc-emit", "ansn=", msg.ansn, " advertised=", msg.advertised_neighbors.size());
      enqueue(n, Frame{n, kBroadcast, bytes, TcFrame{std::move(msg), kTcTtl}});
    }
    schedule(next_period(config.tc_interval), EventKind::TcEmit, n);
  }

  void expiry_scan()
  {
    for (auto& node : nodes) {
      node.olsr.expire_entries(clock);
      std::erase_if(node.seen_tc, [&](const auto& kv) { return kv.second.expiry <= clock; });
    }
    schedule(clock + kExpiryScanPeriod, EventKind::ExpiryScan, 0);
  }

  void receive_tc(NodeId n, NodeId sender, const TcFrame& frame)
  {
    SimNode& node = nodes[n];
    const TcMsg& msg = frame.msg;
    if (msg.originator == n || !node.olsr.is_sym_neighbor(sender))
      return;
    auto [it, fresh] = node.seen_tc.try_emplace({msg.originator, msg.msg_seq}, SeenTc{clock + kDuplicateHold, false});
    if (fresh)
      node.olsr.process_tc(msg, clock);
    if (!it->second.forwarded && frame.ttl > 1 && node.olsr.is_mpr_selector(sender)) {
      it->second.forwarded = true;
      log(n, "tc-forward", "originator=", msg.originator, " seq=", msg.msg_seq);
      enqueue(n, Frame{n, kBroadcast, 16 + 4 * msg.advertised_neighbors.size(), TcFrame{msg, static_cast<std::uint8_t>(frame.ttl - 1)}});
    }
  }

  // ---- radio and queues ----------------------------------------------------

  bool in_range(NodeId a, NodeId b) const
  {
    const double dx = motion[a].position.x - motion[b].position.x;
    const double dy = motion[a].position.y - motion[b].position.y;
    return dx * dx + dy * dy <= config.radio_range * config.radio_range;
  }

  void enqueue(NodeId n, Frame frame)
  {
    SimNode& node = nodes[n];
    if (node.queued() >= config.queue_capacity) {
      if (auto* data = std::get_if<DataFrame>(&frame.body)) {
        log(n, "drop", "queue-full");
        settle(*data, PacketFate::DroppedQueue);
      } else {
        log(n, "drop", "queue-full control");
      }
      return;
    }
    if (frame.is_control())
      node.control_queue.push_back(std::move(frame));
    else
      node.data_queue.push_back(std::move(frame));
    if (!node.in_service)
      start_service(n);
  }

  void start_service(NodeId n)
  {
    SimNode& node = nodes[n];
    auto& q = node.control_queue.empty() ? node.data_queue : node.control_queue;
    if (q.empty())
      return;
    node.in_service = std::move(q.front());
    q.pop_front();
    schedule(clock + 1.0 / config.link_bandwidth, EventKind::TransmitComplete, n);
  }

  void transmit_complete(NodeId n)
  {
    Frame frame = std::move(*nodes[n].in_service);
    nodes[n].in_service.reset();
    if (frame.is_control()) {
      ++run.control_frames;
      run.control_overhead_bytes += frame.bytes;
    }

    if (frame.receiver == kBroadcast) {
      for (NodeId r = 0; r < nodes.size(); ++r)
        if (r != n && in_range(n, r))
          receive(r, frame);
    } else {
      receive(frame.receiver, frame);
    }
    start_service(n);
  }

  void receive(NodeId r, const Frame& frame)
  {
    if (const auto* hello = std::get_if<HelloMsg>(&frame.body))
      nodes[r].olsr.process_hello(*hello, clock);
    else if (const auto* tc = std::get_if<TcFrame>(&frame.body))
      receive_tc(r, frame.sender, *tc);
    else
      handle_data(r, std::get<DataFrame>(frame.body));
  }

  // ---- data plane ----------------------------------------------------------

  void send_data(NodeId from, NodeId to, DataFrame data)
  {
    std::size_t bytes = 8;
    if (data.description)
      bytes += data.description->wire_size();
    else
      bytes += config.payload_bytes;
    if (uses_source_routing(config.protocol))
      bytes += 4 * data.header.hops.size();
    // Unicast reachability is decided when the frame is handed to the link
    // layer; a failure is reported to the routing layer at once.
    if (!in_range(from, to)) {
      ++run.link_failures;
      log(from, "link-fail", to);
      if (has_link_feedback(config.protocol) && nodes[from].olsr.purge_neighbor(to))
        log(from, "purge", to);
      settle(data, PacketFate::DroppedLink);
      return;
    }
    enqueue(from, Frame{from, to, bytes, std::move(data)});
  }

  void handle_data(NodeId n, DataFrame data)
  {
    if (n == data.dst) {
      arrive(n, data);
      return;
    }
    route_data(n, std::move(data));
  }

  void route_data(NodeId n, DataFrame data)
  {
    SimNode& node = nodes[n];
    node.olsr.expire_entries(clock);

    if (!uses_source_routing(config.protocol)) {
      if (data.hops >= config.max_hops) {
        log(n, "drop", "ttl");
        settle(data, PacketFate::DroppedTtl);
        return;
      }
      const auto next = node.table.next_hop(node.olsr, data.dst);
      if (!next) {
        log(n, "drop", "no-route dst=", data.dst);
        settle(data, PacketFate::DroppedNoRoute);
        return;
      }
      ++data.hops;
      log(n, "forward", "flow=", data.flow, " next=", *next);
      send_data(n, *next, std::move(data));
      return;
    }

    const ForwardAction action = forward(data.header, node.olsr, forward_options);
    if (const auto* fw = std::get_if<forward_action::Forward>(&action)) {
      data.header = fw->header;
      log(n, "forward", "flow=", data.flow, " next=", fw->next_hop);
      send_data(n, fw->next_hop, std::move(data));
    } else if (const auto* rec = std::get_if<forward_action::Recovered>(&action)) {
      data.header = rec->header;
      ++run.recoveries;
      log(n, "recover", "flow=", data.flow, " next=", rec->next_hop, " count=", data.header.recovery_count);
      send_data(n, rec->next_hop, std::move(data));
    } else if (const auto* drop = std::get_if<forward_action::Drop>(&action)) {
      log(n, "drop", to_string(drop->reason));
      settle(data,
             drop->reason == forward_action::DropReason::Ttl ? PacketFate::DroppedTtl : PacketFate::DroppedNoRoute);
    } else {
      arrive(n, data);
    }
  }

  std::uint64_t hops_of(const DataFrame& data) const
  {
    return uses_source_routing(config.protocol) ? data.header.hops_taken() : data.hops;
  }

  void arrive(NodeId n, const DataFrame& data)
  {
    run.max_hops_traversed = std::max(run.max_hops_traversed, hops_of(data));
    assert(run.max_hops_traversed <= config.max_hops);
    if (!data.is_description) {
      PacketRecord& rec = run.packets[data.record];
      rec.fate = PacketFate::Delivered;
      rec.delivered_at = clock;
      log(n, "deliver", "flow=", data.flow, " seq=", rec.seq);
      return;
    }

    descriptions[data.record].fate = PacketFate::Delivered;
    BlockRecord& block = blocks[descriptions[data.record].block];
    if (block.resolved)
      return;
    const auto index = data.description->description_index;
    if (std::any_of(block.received.begin(), block.received.end(), [&](const Projection& p) {
          return p.description_index == index;
        }))
      return;
    block.received.push_back(*data.description);
    log(n, "description", "flow=", data.flow, " block=", block.block_id, " index=", index);
    if (block.received.size() < config.mdc.m)
      return;

    block.resolved = true;
    try {
      const auto rows = deblock(decode(block.received, *codec));
      bool intact = rows.size() == block.packets.size();
      for (std::size_t i = 0; intact && i < rows.size(); ++i) {
        const PacketRecord& rec = run.packets[block.packets[i]];
        intact = rows[i] == make_payload(rec.flow, rec.seq, config.payload_bytes);
      }
      if (!intact) {
        ++run.mdc->payload_mismatches;
        log(n, "block-corrupt", "flow=", data.flow, " block=", block.block_id);
        return;
      }
    } catch (const CodecError& e) {
      ++run.mdc->payload_mismatches;
      log(n, "block-corrupt", "flow=", data.flow, " block=", block.block_id, ' ', e.what());
      return;
    }
    ++run.mdc->blocks_reconstructed;
    for (std::uint64_t p : block.packets) {
      run.packets[p].fate = PacketFate::Delivered;
      run.packets[p].delivered_at = clock;
    }
    log(n, "block-decoded", "flow=", data.flow, " block=", block.block_id);
  }

  void settle(const DataFrame& data, PacketFate fate)
  {
    if (data.is_description) {
      descriptions[data.record].fate = fate;
      ++run.mdc->descriptions_lost;
    } else {
      run.packets[data.record].fate = fate;
    }
  }

  // ---- traffic -------------------------------------------------------------

  void app_send(std::size_t f)
  {
    Flow& flow = flows[f];
    if (clock >= traffic_stop)
      return;
    if (clock + config.packet_interval < traffic_stop)
      schedule(clock + config.packet_interval, EventKind::AppSend, flow.spec.src, f);

    const std::uint32_t seq = flow.next_seq++;
    const std::uint64_t record = run.packets.size();
    run.packets.push_back({static_cast<std::uint32_t>(f), seq, clock, std::nullopt, PacketFate::InFlight});
    log(flow.spec.src, "app-send", "flow=", f, " seq=", seq, " dst=", flow.spec.dst);

    if (codec) {
      if (flow.buffered.empty()) {
        flow.first_buffered = clock;
        const std::uint64_t tag = static_cast<std::uint64_t>(f) << 32 | flow.buffer->next_block_id();
        schedule(clock + config.mdc.flush_timeout, EventKind::FlushTimer, flow.spec.src, tag);
      }
      flow.buffered.push_back(record);
      if (auto block = flow.buffer->push(make_payload(static_cast<std::uint32_t>(f), seq, config.payload_bytes)))
        send_block(f, std::move(*block));
      return;
    }

    DataFrame data;
    data.record = record;
    data.flow = static_cast<std::uint32_t>(f);
    data.dst = flow.spec.dst;
    if (uses_source_routing(config.protocol)) {
      SimNode& node = nodes[flow.spec.src];
      node.olsr.expire_entries(clock);
      try {
        RouteSet& routes = node.routes.routes_for(node.olsr, flow.spec.dst, config.n_paths, transform);
        data.header = dispatch(routes, data.flow, seq);
      } catch (const RouteNotFound&) {
        log(flow.spec.src, "drop", "no-route dst=", flow.spec.dst);
        settle(data, PacketFate::DroppedNoRoute);
        return;
      }
    }
    route_data(flow.spec.src, std::move(data));
  }

  void flush_timer(std::size_t f, std::uint32_t block_id)
  {
    Flow& flow = flows[f];
    if (flow.buffer->next_block_id() != block_id || flow.buffered.empty())
      return;
    if (auto block = flow.buffer->flush())
      send_block(f, std::move(*block));
  }

  /// Path index for each description.
  std::vector<std::size_t> allocate(const RouteSet& routes)
  {
    const std::size_t n = config.mdc.n;
    const std::size_t m = config.mdc.m;
    const std::size_t paths = routes.paths.size();
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = i % paths;
    if (config.mdc.policy != AllocationPolicy::BufferHeuristic || n == m)
      return out;

    std::vector<PathStats> stats;
    for (std::size_t p = 0; p < paths; ++p) {
      PathStats s;
      s.path_index = p;
      s.buffer_capacity = static_cast<double>(config.queue_capacity);
      const auto& hops = routes.paths[p].hops;
      for (std::size_t h = 0; h + 1 < hops.size(); ++h)
        s.max_buffer_occupancy = std::max(s.max_buffer_occupancy, static_cast<double>(nodes[hops[h]].queued()));
      stats.push_back(s);
    }
    try {
      const auto shares = allocate_buffer_heuristic(stats, static_cast<double>(n - m));
      const auto counts = largest_remainder_round(shares, n - m);
      std::size_t i = m;
      for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t k = 0; k < counts[p] && i < n; ++k)
          out[i++] = p;
    } catch (const AllocationError&) {
      // every path saturated: keep the round-robin spread
    }
    return out;
  }

  void send_block(std::size_t f, DataBlock block)
  {
    Flow& flow = flows[f];
    const std::uint64_t b = blocks.size();
    BlockRecord rec;
    rec.flow = static_cast<std::uint32_t>(f);
    rec.block_id = block.block_id;
    rec.first_buffered = flow.first_buffered;
    rec.packets = std::move(flow.buffered);
    flow.buffered.clear();
    blocks.push_back(std::move(rec));
    ++run.mdc->blocks_sent;
    log(flow.spec.src, "block-sent", "flow=", f, " block=", block.block_id);

    auto projections = encode(block, *codec);
    SimNode& node = nodes[flow.spec.src];
    node.olsr.expire_entries(clock);
    RouteSet* routes = nullptr;
    try {
      routes = &node.routes.routes_for(node.olsr, flow.spec.dst, config.mdc.n, transform);
    } catch (const RouteNotFound&) {
      log(flow.spec.src, "drop", "no-route dst=", flow.spec.dst);
    }
    const std::vector<std::size_t> assignment = routes ? allocate(*routes) : std::vector<std::size_t>{};

    for (std::size_t i = 0; i < projections.size(); ++i) {
      DataFrame data;
      data.record = descriptions.size();
      data.is_description = true;
      data.flow = static_cast<std::uint32_t>(f);
      data.dst = flow.spec.dst;
      data.description = std::make_shared<const Projection>(std::move(projections[i]));
      descriptions.push_back({b, PacketFate::InFlight});
      ++run.mdc->descriptions_sent;
      if (!routes) {
        settle(data, PacketFate::DroppedNoRoute);
        continue;
      }
      const Path& path = routes->paths[assignment[i]];
      data.header.hops = path.hops;
      data.header.flow_id = data.flow;
      data.header.packet_seq = block.block_id;
      data.header.description_index = static_cast<std::uint32_t>(i);
      route_data(flow.spec.src, std::move(data));
    }
  }

  // ---- results -------------------------------------------------------------

  SimulationResult result() const
  {
    SimulationResult out;
    out.trace = run;
    std::uint64_t computations = 0;
    for (const auto& node : nodes)
      computations += node.routes.computations();
    out.trace.route_computations = computations;

    if (codec) {
      std::vector<bool> pending(blocks.size(), false);
      for (const auto& d : descriptions)
        if (d.fate == PacketFate::InFlight)
          pending[d.block] = true;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].resolved && out.trace.packets[blocks[b].packets.front()].fate == PacketFate::Delivered)
          continue;
        const PacketFate fate = pending[b] && !blocks[b].resolved ? PacketFate::InFlight : PacketFate::Undecodable;
        for (std::uint64_t p : blocks[b].packets)
          out.trace.packets[p].fate = fate;
      }
    }
    out.report = collect_metrics(out.trace);
    return out;
  }
};

Simulator::Simulator(const ScenarioConfig& config, std::ostream* trace)
  : m_impl(std::make_unique<Impl>(config, trace))
{
}

Simulator::~Simulator() = default;

void
Simulator::run_until(double t)
{
  m_impl->run_until(t);
}

void
Simulator::run()
{
  m_impl->run_until(m_impl->config.sim_duration);
}

double
Simulator::now() const
{
  return m_impl->clock;
}

std::uint64_t
Simulator::events_executed() const
{
  return m_impl->executed;
}

const ScenarioConfig&
Simulator::config() const
{
  return m_impl->config;
}

const NodeState&
Simulator::node(NodeId id) const
{
  if (id >= m_impl->nodes.size())
    throw InputError("node " + std::to_string(id) + " does not exist");
  return m_impl->nodes[id].olsr;
}

Position
Simulator::position(NodeId id) const
{
  if (id >= m_impl->motion.size())
    throw InputError("node " + std::to_string(id) + " does not exist");
  return m_impl->motion[id].position;
}

const std::vector<FlowSpec>&
Simulator::flows() const
{
  return m_impl->flow_specs;
}

SimulationResult
Simulator::result() const
{
  return m_impl->result();
}

SimulationResult
simulate(const ScenarioConfig& config, std::ostream* trace)
{
  Simulator sim(config, trace);
  sim.run();
  return sim.result();
}

MetricsReport
run(const ScenarioConfig& config)
{
  return simulate(config).report;
}

} // namespace mpolsr
