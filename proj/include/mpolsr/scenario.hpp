#ifndef MPOLSR_SCENARIO_HPP
#define MPOLSR_SCENARIO_HPP

#include "mpolsr/netgraph.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpolsr {

enum class Protocol
{
  /// Single path, hop-by-hop tables, HELLO timeout detects breaks.
  Olsr,
  /// As Olsr plus link-layer feedback.
  OlsrFb,
  /// Multipath source routing with feedback, no route recovery.
  SrMpolsr,
  /// Multipath source routing with feedback and route recovery.
  ReMpolsr,
  /// ReMpolsr plus the Mojette multiple description codec.
  MdcMpolsr,
};

std::string_view to_string(Protocol p);
/// Accepts the canonical names (OLSR, OLSR_FB, SR_MPOLSR, RE_MPOLSR,
/// MDC_MPOLSR) and the short forms SR, RE, MDC.
Protocol parse_protocol(std::string_view name);

bool uses_source_routing(Protocol p);
bool has_link_feedback(Protocol p);

enum class MobilityModel
{
  Static,
  RandomWaypoint,
};

enum class AllocationPolicy
{
  /// Description i on path i mod |paths|.
  RoundRobin,
  /// Redundant descriptions split by the buffer-occupancy heuristic.
  BufferHeuristic,
};

struct Position
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(Position a, Position b);

/// Instant relocation of one node, for scripted scenarios.
struct ScriptedMove
{
  double time = 0.0;
  NodeId node = 0;
  Position to;
};

struct FlowSpec
{
  NodeId src = 0;
  NodeId dst = 0;
};

struct MdcSettings
{
  std::size_t m = 2;
  std::size_t n = 4;
  AllocationPolicy policy = AllocationPolicy::RoundRobin;
  /// A partially filled block is sent this long after its first row.
  double flush_timeout = 0.05;
};

///
/// \brief Everything a simulation run depends on.
///
/// Field names double as keys of the scenario file format; see
/// `apply_setting()`.
///
struct ScenarioConfig
{
  Protocol protocol = Protocol::ReMpolsr;
  std::size_t node_count = 50;
  double area_width = 1000.0;
  double area_height = 1000.0;
  double speed_min = 1.0;
  double speed_max = 10.0;
  double pause_time = 0.0;
  double radio_range = 250.0;
  double sim_duration = 130.0;
  /// Traffic starts after this convergence period.
  double warmup = 30.0;
  /// Traffic stops this long before the end so packets can drain.
  double drain = 5.0;
  std::uint64_t rng_seed = 1;

  std::size_t n_sources = 30;
  double packet_interval = 0.25;
  std::size_t payload_bytes = 512;

  std::size_t n_paths = 3;
  std::string cost_transform = "2c";
  MdcSettings mdc;

  std::size_t queue_capacity = 50;
  /// Frames per second served by each node's outbound FIFO.
  double link_bandwidth = 100.0;
  std::size_t max_hops = 32;
  std::uint32_t max_recoveries = 4;

  double hello_interval = 2.0;
  double tc_interval = 5.0;

  MobilityModel mobility = MobilityModel::RandomWaypoint;
  double mobility_step = 0.25;

  std::map<NodeId, Position> initial_positions;
  std::vector<ScriptedMove> moves;
  /// When non-empty, replaces the random choice of n_sources pairs.
  std::vector<FlowSpec> flows;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Sets one key. Throws ConfigError naming the key when it is unknown or
/// its value does not parse.
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Applies a `key=value` override.
void apply_override(ScenarioConfig& config, const std::string& assignment);

/// Reads `key = value` lines; `#` starts a comment. The result is
/// validated.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);

/// Scalar settings in canonical key order (per-node and per-flow
/// entries omitted).
std::vector<std::pair<std::string, std::string>> scalar_settings(const ScenarioConfig& config);

/// Round-trippable scenario file text.
std::string to_scenario_text(const ScenarioConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

} // namespace mpolsr

#endif
