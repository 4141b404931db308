#ifndef MPOLSR_MOBILITY_HPP
#define MPOLSR_MOBILITY_HPP

#include "mpolsr/rng.hpp"
#include "mpolsr/scenario.hpp"

#include <vector>

namespace mpolsr {

struct MobilityParams
{
  double area_width = 1000.0;
  double area_height = 1000.0;
  double speed_min = 1.0;
  double speed_max = 10.0;
  double pause_time = 0.0;

  static MobilityParams from(const ScenarioConfig& c)
  {
    return {c.area_width, c.area_height, c.speed_min, c.speed_max, c.pause_time};
  }
};

/// Random waypoint state of one node.
struct MobileNode
{
  Position position;
  Position waypoint;
  double speed = 0.0;
  double pause_left = 0.0;
};

/// Draws a fresh waypoint and speed for `node`.
void draw_leg(MobileNode& node, const MobilityParams& params, Rng& rng);

/// A node at `at` (uniform over the area when absent) with its first leg
/// drawn.
MobileNode place_node(const MobilityParams& params, Rng& rng, const Position* at = nullptr);

/// Advances every node by `dt` seconds: travel toward the waypoint, pause
/// on arrival, then draw the next leg. Throws InputError unless dt > 0.
void mobility_step(std::vector<MobileNode>& nodes, const MobilityParams& params, double dt, Rng& rng);

} // namespace mpolsr

#endif
