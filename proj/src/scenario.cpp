#include "mpolsr/scenario.hpp"

#include "mpolsr/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mpolsr {

std::string_view
to_string(Protocol p)
{
  switch (p) {
  case Protocol::Olsr:
    return "OLSR";
  case Protocol::OlsrFb:
    return "OLSR_FB";
  case Protocol::SrMpolsr:
    return "SR_MPOLSR";
  case Protocol::ReMpolsr:
    return "RE_MPOLSR";
  case Protocol::MdcMpolsr:
    return "MDC_MPOLSR";
  }
  return "?";
}

Protocol
parse_protocol(std::string_view name)
{
  if (name == "OLSR")
    return Protocol::Olsr;
  if (name == "OLSR_FB")
    return Protocol::OlsrFb;
  if (name == "SR_MPOLSR" || name == "SR")
    return Protocol::SrMpolsr;
  if (name == "RE_MPOLSR" || name == "RE")
    return Protocol::ReMpolsr;
  if (name == "MDC_MPOLSR" || name == "MDC")
    return Protocol::MdcMpolsr;
  throw ConfigError("protocol", "unknown protocol '" + std::string(name) + "'");
}

bool
uses_source_routing(Protocol p)
{
  return p == Protocol::SrMpolsr || p == Protocol::ReMpolsr || p == Protocol::MdcMpolsr;
}

bool
has_link_feedback(Protocol p)
{
  return p != Protocol::Olsr;
}

double
distance(Position a, Position b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::string
format_number(double v)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::string
trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double
to_double(const std::string& key, const std::string& text)
{
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

std::uint64_t
to_unsigned(const std::string& key, const std::string& text)
{
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  return v;
}

std::vector<std::string>
split(const std::string& text, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    out.push_back(trim(item));
  return out;
}

std::size_t
indexed_key(const std::string& key, std::string_view prefix)
{
  return static_cast<std::size_t>(to_unsigned(key, key.substr(prefix.size())));
}

std::string_view
to_string(MobilityModel m)
{
  return m == MobilityModel::Static ? "static" : "random_waypoint";
}

std::string_view
to_string(AllocationPolicy p)
{
  return p == AllocationPolicy::RoundRobin ? "round_robin" : "buffer";
}

} // namespace

void
apply_setting(ScenarioConfig& c, const std::string& key, const std::string& raw)
{
  const std::string value = trim(raw);
  auto num = [&] { return to_double(key, value); };
  auto count = [&] { return static_cast<std::size_t>(to_unsigned(key, value)); };

  if (key == "protocol") {
    try {
      c.protocol = parse_protocol(value);
    } catch (const ConfigError&) {
      throw ConfigError(key, "unknown protocol '" + value + "'");
    }
  } else if (key == "node_count") {
    c.node_count = count();
  } else if (key == "area.width") {
    c.area_width = num();
  } else if (key == "area.height") {
    c.area_height = num();
  } else if (key == "speed.min") {
    c.speed_min = num();
  } else if (key == "speed.max") {
    c.speed_max = num();
  } else if (key == "speed") {
    c.speed_min = c.speed_max = num();
  } else if (key == "pause_time") {
    c.pause_time = num();
  } else if (key == "radio_range") {
    c.radio_range = num();
  } else if (key == "sim_duration") {
    c.sim_duration = num();
  } else if (key == "warmup") {
    c.warmup = num();
  } else if (key == "drain") {
    c.drain = num();
  } else if (key == "rng_seed") {
    c.rng_seed = to_unsigned(key, value);
  } else if (key == "traffic.n_sources") {
    c.n_sources = count();
  } else if (key == "traffic.packet_interval") {
    c.packet_interval = num();
  } else if (key == "traffic.payload_bytes") {
    c.payload_bytes = count();
  } else if (key == "n_paths") {
    c.n_paths = count();
  } else if (key == "cost_transform") {
    c.cost_transform = value;
  } else if (key == "mdc.m") {
    c.mdc.m = count();
  } else if (key == "mdc.n") {
    c.mdc.n = count();
  } else if (key == "mdc.policy") {
    if (value == "round_robin")
      c.mdc.policy = AllocationPolicy::RoundRobin;
    else if (value == "buffer")
      c.mdc.policy = AllocationPolicy::BufferHeuristic;
    else
      throw ConfigError(key, "expected round_robin or buffer, got '" + value + "'");
  } else if (key == "mdc.flush_timeout") {
    c.mdc.flush_timeout = num();
  } else if (key == "queue_capacity") {
    c.queue_capacity = count();
  } else if (key == "link_bandwidth") {
    c.link_bandwidth = num();
  } else if (key == "max_hops") {
    c.max_hops = count();
  } else if (key == "max_recoveries") {
    c.max_recoveries = static_cast<std::uint32_t>(count());
  } else if (key == "hello_interval") {
    c.hello_interval = num();
  } else if (key == "tc_interval") {
    c.tc_interval = num();
  } else if (key == "mobility") {
    if (value == "static")
      c.mobility = MobilityModel::Static;
    else if (value == "random_waypoint")
      c.mobility = MobilityModel::RandomWaypoint;
    else
      throw ConfigError(key, "expected static or random_waypoint, got '" + value + "'");
  } else if (key == "mobility.step") {
    c.mobility_step = num();
  } else if (key.rfind("node.", 0) == 0) {
    const auto id = static_cast<NodeId>(indexed_key(key, "node."));
    const auto parts = split(value, ',');
    if (parts.size() != 2)
      throw ConfigError(key, "expected 'x, y'");
    c.initial_positions[id] = {to_double(key, parts[0]), to_double(key, parts[1])};
  } else if (key.rfind("move.", 0) == 0) {
    const std::size_t k = indexed_key(key, "move.");
    const auto parts = split(value, ',');
    if (parts.size() != 4)
      throw ConfigError(key, "expected 'time, node, x, y'");
    if (c.moves.size() <= k)
      c.moves.resize(k + 1, ScriptedMove{-1.0, 0, {}});
    c.moves[k] = {to_double(key, parts[0]),
                  static_cast<NodeId>(to_unsigned(key, parts[1])),
                  {to_double(key, parts[2]), to_double(key, parts[3])}};
  } else if (key.rfind("flow.", 0) == 0) {
    const std::size_t k = indexed_key(key, "flow.");
    const auto parts = split(value, ',');
    if (parts.size() != 2)
      throw ConfigError(key, "expected 'src, dst'");
    if (c.flows.size() <= k)
      c.flows.resize(k + 1);
    c.flows[k] = {static_cast<NodeId>(to_unsigned(key, parts[0])), static_cast<NodeId>(to_unsigned(key, parts[1]))};
  } else {
    throw ConfigError(key, "unknown field");
  }
}

void
apply_override(ScenarioConfig& config, const std::string& assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(trim(assignment), "override must look like key=value");
  apply_setting(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void
ScenarioConfig::validate() const
{
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok)
      throw ConfigError(field, what);
  };
  require(node_count >= 1, "node_count", "must be at least 1");
  require(area_width > 0.0, "area.width", "must be positive");
  require(area_height > 0.0, "area.height", "must be positive");
  require(speed_min >= 0.0, "speed.min", "must be non-negative");
  require(speed_min <= speed_max, "speed.min", "must not exceed speed.max");
  require(pause_time >= 0.0, "pause_time", "must be non-negative");
  require(radio_range > 0.0, "radio_range", "must be positive");
  require(sim_duration > 0.0, "sim_duration", "must be positive");
  require(warmup >= 0.0, "warmup", "must be non-negative");
  require(drain >= 0.0, "drain", "must be non-negative");
  require(packet_interval > 0.0, "traffic.packet_interval", "must be positive");
  require(payload_bytes >= 1, "traffic.payload_bytes", "must be at least 1");
  require(n_paths >= 1, "n_paths", "must be at least 1");
  require(queue_capacity >= 1, "queue_capacity", "must be at least 1");
  require(link_bandwidth > 0.0, "link_bandwidth", "must be positive");
  require(max_hops >= 1, "max_hops", "must be at least 1");
  require(hello_interval > 0.0, "hello_interval", "must be positive");
  require(tc_interval > 0.0, "tc_interval", "must be positive");
  require(mobility_step > 0.0, "mobility.step", "must be positive");
  if (flows.empty())
    require(n_sources <= node_count * (node_count - 1), "traffic.n_sources", "more flows than node pairs");

  try {
    CostTransform::from_name(cost_transform);
  } catch (const InputError& e) {
    throw ConfigError("cost_transform", e.what());
  }

  if (protocol == Protocol::MdcMpolsr) {
    require(mdc.m >= 1, "mdc.m", "must be at least 1");
    require(mdc.n >= mdc.m, "mdc.n", "must be at least mdc.m");
    require(mdc.n <= 16, "mdc.n", "at most 16 descriptions are supported");
    require(mdc.flush_timeout > 0.0, "mdc.flush_timeout", "must be positive");
  }

  for (const auto& [id, pos] : initial_positions) {
    const std::string field = "node." + std::to_string(id);
    if (id >= node_count)
      throw ConfigError(field, "node id out of range");
    if (pos.x < 0.0 || pos.y < 0.0 || pos.x > area_width || pos.y > area_height)
      throw ConfigError(field, "position outside the area");
  }
  for (std::size_t k = 0; k < moves.size(); ++k) {
    const std::string field = "move." + std::to_string(k);
    if (moves[k].time < 0.0)
      throw ConfigError(field, "missing or negative time");
    if (moves[k].node >= node_count)
      throw ConfigError(field, "node id out of range");
    const Position p = moves[k].to;
    if (p.x < 0.0 || p.y < 0.0 || p.x > area_width || p.y > area_height)
      throw ConfigError(field, "position outside the area");
  }
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const std::string field = "flow." + std::to_string(k);
    if (flows[k].src >= node_count || flows[k].dst >= node_count)
      throw ConfigError(field, "node id out of range");
    if (flows[k].src == flows[k].dst)
      throw ConfigError(field, "source equals destination");
  }
}

ScenarioConfig
parse_scenario(std::istream& in)
{
  ScenarioConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

ScenarioConfig
load_scenario(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("", "cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

std::vector<std::pair<std::string, std::string>>
scalar_settings(const ScenarioConfig& c)
{
  auto n = [](double v) { return format_number(v); };
  auto u = [](std::uint64_t v) { return std::to_string(v); };
  return {
    {"protocol", std::string(to_string(c.protocol))},
    {"node_count", u(c.node_count)},
    {"area.width", n(c.area_width)},
    {"area.height", n(c.area_height)},
    {"speed.min", n(c.speed_min)},
    {"speed.max", n(c.speed_max)},
    {"pause_time", n(c.pause_time)},
    {"radio_range", n(c.radio_range)},
    {"sim_duration", n(c.sim_duration)},
    {"warmup", n(c.warmup)},
    {"drain", n(c.drain)},
    {"rng_seed", u(c.rng_seed)},
    {"traffic.n_sources", u(c.flows.empty() ? c.n_sources : c.flows.size())},
    {"traffic.packet_interval", n(c.packet_interval)},
    {"traffic.payload_bytes", u(c.payload_bytes)},
    {"n_paths", u(c.n_paths)},
    {"cost_transform", c.cost_transform},
    {"mdc.m", u(c.mdc.m)},
    {"mdc.n", u(c.mdc.n)},
    {"mdc.policy", std::string(to_string(c.mdc.policy))},
    {"mdc.flush_timeout", n(c.mdc.flush_timeout)},
    {"queue_capacity", u(c.queue_capacity)},
    {"link_bandwidth", n(c.link_bandwidth)},
    {"max_hops", u(c.max_hops)},
    {"max_recoveries", u(c.max_recoveries)},
    {"hello_interval", n(c.hello_interval)},
    {"tc_interval", n(c.tc_interval)},
    {"mobility", std::string(to_string(c.mobility))},
    {"mobility.step", n(c.mobility_step)},
  };
}

std::string
to_scenario_text(const ScenarioConfig& c)
{
  std::ostringstream out;
  for (const auto& [k, v] : scalar_settings(c))
    out << k << " = " << v << '\n';
  for (const auto& [id, p] : c.initial_positions)
    out << "node." << id << " = " << format_number(p.x) << ", " << format_number(p.y) << '\n';
  for (std::size_t k = 0; k < c.moves.size(); ++k) {
    const auto& m = c.moves[k];
    out << "move." << k << " = " << format_number(m.time) << ", " << m.node << ", " << format_number(m.to.x) << ", "
        << format_number(m.to.y) << '\n';
  }
  for (std::size_t k = 0; k < c.flows.size(); ++k)
    out << "flow." << k << " = " << c.flows[k].src << ", " << c.flows[k].dst << '\n';
  return out.str();
}

} // namespace mpolsr
