#ifndef MPOLSR_METRICS_HPP
#define MPOLSR_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpolsr {

/// Final state of one application packet.
enum class PacketFate
{
  InFlight,
  Delivered,
  DroppedNoRoute,
  DroppedQueue,
  DroppedTtl,
  /// Unicast to a node beyond radio range.
  DroppedLink,
  /// MDC only: the packet's block never gathered M descriptions.
  Undecodable,
};

std::string_view to_string(PacketFate fate);

struct PacketRecord
{
  std::uint32_t flow = 0;
  std::uint32_t seq = 0;
  double created = 0.0;
  std::optional<double> delivered_at;
  PacketFate fate = PacketFate::InFlight;
};

struct MdcStats
{
  std::uint64_t blocks_sent = 0;
  std::uint64_t blocks_reconstructed = 0;
  std::uint64_t descriptions_sent = 0;
  std::uint64_t descriptions_lost = 0;
  /// Reconstructed payloads differing from what was sent.
  std::uint64_t payload_mismatches = 0;

  bool operator==(const MdcStats&) const = default;
};

/// Everything the simulator records during a run.
struct RunTrace
{
  std::vector<PacketRecord> packets;
  std::uint64_t control_overhead_bytes = 0;
  std::uint64_t control_frames = 0;
  std::uint64_t recoveries = 0;
  std::uint64_t route_computations = 0;
  std::uint64_t link_failures = 0;
  std::uint64_t max_hops_traversed = 0;
  std::optional<MdcStats> mdc;
};

struct MetricsReport
{
  std::uint64_t sent_app_packets = 0;
  std::uint64_t delivered_app_packets = 0;
  double delivery_ratio = 0.0;
  /// Absent when nothing was delivered.
  std::optional<double> mean_end_to_end_delay;
  std::uint64_t control_overhead_bytes = 0;
  std::uint64_t control_frames = 0;
  std::uint64_t recoveries = 0;
  std::uint64_t route_computations = 0;
  std::uint64_t link_failures = 0;

  std::uint64_t dropped_no_route = 0;
  std::uint64_t dropped_queue = 0;
  std::uint64_t dropped_ttl = 0;
  std::uint64_t dropped_link = 0;
  std::uint64_t undecodable = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t max_hops_traversed = 0;

  std::optional<MdcStats> mdc;

  bool operator==(const MetricsReport&) const = default;
};

/// Delay is averaged over delivered packets only.
MetricsReport collect_metrics(const RunTrace& trace);

/// Report fields in their fixed CSV order. Absent values are empty strings.
std::vector<std::pair<std::string, std::string>> report_fields(const MetricsReport& report);

} // namespace mpolsr

#endif
