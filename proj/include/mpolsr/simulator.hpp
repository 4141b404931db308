#ifndef MPOLSR_SIMULATOR_HPP
#define MPOLSR_SIMULATOR_HPP

#include "mpolsr/metrics.hpp"
#include "mpolsr/olsr_state.hpp"
#include "mpolsr/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace mpolsr {

struct SimulationResult
{
  MetricsReport report;
  /// Per-packet records with final fates, in creation order.
  RunTrace trace;
};

///
/// \brief Discrete-event MANET simulation of one scenario.
///
/// Events run in (time, sequence) order on a single thread. All randomness
/// comes from streams derived from the scenario seed, so a given
/// configuration always produces the same event sequence.
///
/// Radio is unit-disk: a frame reaches every node within radio range when
/// its transmission completes. Each node serves one FIFO (control frames
/// ahead of data) at link_bandwidth frames per second.
///
/// With an optional trace stream, every event is written as a
/// tab-separated line: time, node, kind, detail.
///
class Simulator
{
public:
  /// Throws ConfigError before anything runs when the config is invalid.
  explicit Simulator(const ScenarioConfig& config, std::ostream* trace = nullptr);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Executes every event scheduled at or before `t` (capped at the
  /// scenario duration).
  void run_until(double t);
  void run();

  double now() const;
  std::uint64_t events_executed() const;
  const ScenarioConfig& config() const;
  const NodeState& node(NodeId id) const;
  Position position(NodeId id) const;
  const std::vector<FlowSpec>& flows() const;

  /// Snapshot of the run so far; packets still travelling are InFlight.
  SimulationResult result() const;

private:
  struct Impl;
  std::unique_ptr<Impl> m_impl;
};

SimulationResult simulate(const ScenarioConfig& config, std::ostream* trace = nullptr);

/// Runs the scenario to its end and reports the metrics.
MetricsReport run(const ScenarioConfig& config);

} // namespace mpolsr

#endif
