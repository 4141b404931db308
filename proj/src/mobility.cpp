#include "mpolsr/mobility.hpp"

#include "mpolsr/error.hpp"

#include <algorithm>

namespace mpolsr {

void
draw_leg(MobileNode& node, const MobilityParams& params, Rng& rng)
{
  node.waypoint = {rng.uniform(0.0, params.area_width), rng.uniform(0.0, params.area_height)};
  node.speed = rng.uniform(params.speed_min, params.speed_max);
}

MobileNode
place_node(const MobilityParams& params, Rng& rng, const Position* at)
{
  MobileNode node;
  node.position = at ? *at : Position{rng.uniform(0.0, params.area_width), rng.uniform(0.0, params.area_height)};
  draw_leg(node, params, rng);
  return node;
}

namespace {

void
advance(MobileNode& node, const MobilityParams& params, double dt, Rng& rng)
{
  double left = dt;
  while (left > 0.0) {
    if (node.pause_left > 0.0) {
      const double wait = std::min(node.pause_left, left);
      node.pause_left -= wait;
      left -= wait;
      if (node.pause_left <= 0.0)
        draw_leg(node, params, rng);
      continue;
    }
    if (node.speed <= 0.0)
      return;
    const double to_go = distance(node.position, node.waypoint);
    const double reach = node.speed * left;
    if (reach < to_go) {
      const double f = reach / to_go;
      node.position.x += (node.waypoint.x - node.position.x) * f;
      node.position.y += (node.waypoint.y - node.position.y) * f;
      return;
    }
    node.position = node.waypoint;
    left -= to_go / node.speed;
    node.pause_left = params.pause_time;
    if (node.pause_left <= 0.0)
      draw_leg(node, params, rng);
  }
}

} // namespace

void
mobility_step(std::vector<MobileNode>& nodes, const MobilityParams& params, double dt, Rng& rng)
{
  if (!(dt > 0.0))
    throw InputError("mobility step needs dt > 0");
  for (auto& node : nodes)
    advance(node, params, dt, rng);
}

} // namespace mpolsr
