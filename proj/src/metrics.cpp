#include "mpolsr/metrics.hpp"

#include "mpolsr/scenario.hpp"

namespace mpolsr {

std::string_view
to_string(PacketFate fate)
{
  switch (fate) {
  case PacketFate::InFlight:
    return "in_flight";
  case PacketFate::Delivered:
    return "delivered";
  case PacketFate::DroppedNoRoute:
    return "dropped_no_route";
  case PacketFate::DroppedQueue:
    return "dropped_queue";
  case PacketFate::DroppedTtl:
    return "dropped_ttl";
  case PacketFate::DroppedLink:
    return "dropped_link";
  case PacketFate::Undecodable:
    return "undecodable";
  }
  return "?";
}

MetricsReport
collect_metrics(const RunTrace& trace)
{
  MetricsReport r;
  double delay_sum = 0.0;
  for (const auto& p : trace.packets) {
    ++r.sent_app_packets;
    switch (p.fate) {
    case PacketFate::Delivered:
      ++r.delivered_app_packets;
      delay_sum += *p.delivered_at - p.created;
      break;
    case PacketFate::InFlight:
      ++r.in_flight;
      break;
    case PacketFate::DroppedNoRoute:
      ++r.dropped_no_route;
      break;
    case PacketFate::DroppedQueue:
      ++r.dropped_queue;
      break;
    case PacketFate::DroppedTtl:
      ++r.dropped_ttl;
      break;
    case PacketFate::DroppedLink:
      ++r.dropped_link;
      break;
    case PacketFate::Undecodable:
      ++r.undecodable;
      break;
    }
  }
  if (r.sent_app_packets > 0)
    r.delivery_ratio = static_cast<double>(r.delivered_app_packets) / static_cast<double>(r.sent_app_packets);
  if (r.delivered_app_packets > 0)
    r.mean_end_to_end_delay = delay_sum / static_cast<double>(r.delivered_app_packets);
  r.control_overhead_bytes = trace.control_overhead_bytes;
  r.control_frames = trace.control_frames;
  r.recoveries = trace.recoveries;
  r.route_computations = trace.route_computations;
  r.link_failures = trace.link_failures;
  r.max_hops_traversed = trace.max_hops_traversed;
  r.mdc = trace.mdc;
  return r;
}

std::vector<std::pair<std::string, std::string>>
report_fields(const MetricsReport& r)
{
  auto u = [](std::uint64_t v) { return std::to_string(v); };
  auto mdc = [&](std::uint64_t MdcStats::*field) { return r.mdc ? u((*r.mdc).*field) : std::string(); };
  return {
    {"sent_app_packets", u(r.sent_app_packets)},
    {"delivered_app_packets", u(r.delivered_app_packets)},
    {"delivery_ratio", format_number(r.delivery_ratio)},
    {"mean_end_to_end_delay", r.mean_end_to_end_delay ? format_number(*r.mean_end_to_end_delay) : std::string()},
    {"control_overhead_bytes", u(r.control_overhead_bytes)},
    {"control_frames", u(r.control_frames)},
    {"recoveries", u(r.recoveries)},
    {"route_computations", u(r.route_computations)},
    {"link_failures", u(r.link_failures)},
    {"dropped_no_route", u(r.dropped_no_route)},
    {"dropped_queue", u(r.dropped_queue)},
    {"dropped_ttl", u(r.dropped_ttl)},
    {"dropped_link", u(r.dropped_link)},
    {"undecodable", u(r.undecodable)},
    {"in_flight", u(r.in_flight)},
    {"max_hops_traversed", u(r.max_hops_traversed)},
    {"mdc_blocks_sent", mdc(&MdcStats::blocks_sent)},
    {"mdc_blocks_reconstructed", mdc(&MdcStats::blocks_reconstructed)},
    {"mdc_descriptions_sent", mdc(&MdcStats::descriptions_sent)},
    {"mdc_descriptions_lost", mdc(&MdcStats::descriptions_lost)},
    {"mdc_payload_mismatches", mdc(&MdcStats::payload_mismatches)},
  };
}

} // namespace mpolsr
