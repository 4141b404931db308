#include "mpolsr/error.hpp"
#include "mpolsr/metrics.hpp"
#include "mpolsr/mobility.hpp"
#include "mpolsr/simulator.hpp"
#include "scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mpolsr;
using namespace scenarios;

namespace {

const Protocol kAll[] = {Protocol::Olsr, Protocol::OlsrFb, Protocol::SrMpolsr, Protocol::ReMpolsr, Protocol::MdcMpolsr};

std::uint64_t accounted(const MetricsReport& r)
{
  return r.delivered_app_packets + r.dropped_no_route + r.dropped_queue + r.dropped_ttl + r.dropped_link +
         r.undecodable + r.in_flight;
}

ScenarioConfig small_mobile(Protocol p, std::uint64_t seed)
{
  ScenarioConfig c;
  c.protocol = p;
  c.node_count = 20;
  c.area_width = 600;
  c.area_height = 600;
  c.speed_min = c.speed_max = 8.0;
  c.n_sources = 6;
  c.warmup = 15;
  c.sim_duration = 40;
  c.rng_seed = seed;
  return c;
}

std::size_t delivered_after(const SimulationResult& r, double t)
{
  std::size_t n = 0;
  for (const auto& p : r.trace.packets)
    n += p.created >= t && p.fate == PacketFate::Delivered ? 1 : 0;
  return n;
}

} // namespace

TEST_CASE("two nodes in range deliver everything")
{
  for (Protocol p : kAll) {
    auto c = chain(p, 2);
    auto r = run(c);
    CHECK(r.sent_app_packets > 0);
    CHECK(r.delivery_ratio == 1.0);
  }
}

TEST_CASE("two nodes out of range deliver nothing")
{
  for (Protocol p : kAll) {
    auto c = chain(p, 2, 400.0);
    auto r = run(c);
    CHECK(r.sent_app_packets > 0);
    CHECK(r.delivery_ratio == 0.0);
    CHECK_FALSE(r.mean_end_to_end_delay.has_value());
  }
}

TEST_CASE("packet fates reconcile")
{
  for (Protocol p : kAll)
    for (std::uint64_t seed : {1, 2}) {
      auto result = simulate(small_mobile(p, seed));
      const auto& r = result.report;
      CHECK(accounted(r) == r.sent_app_packets);
      CHECK(r.delivered_app_packets <= r.sent_app_packets);
      CHECK(r.max_hops_traversed <= 32);
      for (const auto& rec : result.trace.packets) {
        CHECK(rec.delivered_at.has_value() == (rec.fate == PacketFate::Delivered));
        if (rec.delivered_at)
          CHECK(*rec.delivered_at >= rec.created);
      }
      if (p == Protocol::MdcMpolsr) {
        REQUIRE(r.mdc);
        CHECK(r.mdc->blocks_reconstructed <= r.mdc->blocks_sent);
        CHECK(r.mdc->descriptions_sent == 4 * r.mdc->blocks_sent);
        CHECK(r.mdc->payload_mismatches == 0);
      } else {
        CHECK_FALSE(r.mdc.has_value());
      }
    }
}

TEST_CASE("identical configs give identical runs")
{
  auto c = small_mobile(Protocol::ReMpolsr, 9);
  std::ostringstream t1, t2;
  auto a = simulate(c, &t1);
  auto b = simulate(c, &t2);
  CHECK(a.report == b.report);
  CHECK(t1.str() == t2.str());
  CHECK_FALSE(t1.str().empty());

  c.rng_seed = 10;
  CHECK_FALSE(run(c) == a.report);
}

TEST_CASE("trace lines have four fields and ordered times")
{
  std::ostringstream out;
  simulate(departing_relay(Protocol::ReMpolsr), &out);
  std::istringstream in(out.str());
  std::string line;
  double last = 0.0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);
    double t = std::stod(line.substr(0, line.find('\t')));
    CHECK(t >= last);
    last = t;
  }
}

TEST_CASE("static network converges to the full topology")
{
  ScenarioConfig c = static_base(Protocol::OlsrFb, 16);
  for (NodeId i = 0; i < 16; ++i)
    c.initial_positions[i] = {100.0 + 200.0 * (i % 4), 100.0 + 200.0 * (i / 4)};
  c.n_sources = 1;
  Simulator sim(c);
  sim.run_until(3 * c.tc_interval + c.hello_interval);
  for (NodeId n = 0; n < 16; ++n) {
    Graph g = sim.node(n).build_graph();
    for (NodeId a = 0; a < 16; ++a)
      for (NodeId b = 0; b < 16; ++b)
        if (a != b) {
          bool linked = distance(sim.position(a), sim.position(b)) <= c.radio_range;
          CHECK(g.has_arc(a, b) == linked);
        }
  }
}

TEST_CASE("converged chain graph")
{
  Simulator sim(chain(Protocol::Olsr, 3));
  sim.run_until(20.0);
  Graph expected;
  expected.add_link(0, 1);
  expected.add_link(1, 2);
  for (NodeId n = 0; n < 3; ++n) {
    Graph g = sim.node(n).build_graph();
    CHECK(g == expected);
    CHECK(g.arc_count() == 4);
  }
}

TEST_CASE("per-hop delay is one service time")
{
  // Three nodes in a line: each data packet crosses two FIFOs served at
  // 20 frames/s, so an unhindered packet takes 2 / 20 s.
  auto c = chain(Protocol::Olsr, 3);
  c.link_bandwidth = 20.0;
  c.packet_interval = 0.5;
  auto result = simulate(c);
  std::map<long, int> delays;
  for (const auto& p : result.trace.packets) {
    REQUIRE(p.fate == PacketFate::Delivered);
    double d = *p.delivered_at - p.created;
    CHECK(d >= 0.1 - 1e-9);
    ++delays[std::lround(d * 1e6)];
  }
  auto mode = std::max_element(delays.begin(), delays.end(), [](auto& a, auto& b) { return a.second < b.second; });
  CHECK(mode->first == 100000);
}

TEST_CASE("link feedback purges at once")
{
  for (Protocol p : {Protocol::Olsr, Protocol::OlsrFb}) {
    Simulator sim(departing_relay(p));
    sim.run_until(35.5);
    const bool stale = sim.node(kRelay).link_set().count(kDest) != 0;
    CHECK(stale == (p == Protocol::Olsr));
    sim.run_until(35.0 + sim.node(kRelay).timers().neighbor_hold + 0.5);
    CHECK(sim.node(kRelay).link_set().count(kDest) == 0);
  }
}

TEST_CASE("departing relay ranks the variants")
{
  auto after = [](Protocol p) { return delivered_after(simulate(departing_relay(p)), 35.0); };
  const auto olsr = after(Protocol::Olsr);
  const auto fb = after(Protocol::OlsrFb);
  const auto sr = after(Protocol::SrMpolsr);
  const auto re = after(Protocol::ReMpolsr);
  CHECK(fb > olsr);
  CHECK(re > sr);
  CHECK(re >= fb);
}

TEST_CASE("recovery changes nothing while routes hold")
{
  ScenarioConfig base = static_base(Protocol::SrMpolsr, 12);
  for (NodeId i = 0; i < 12; ++i)
    base.initial_positions[i] = {100.0 + 180.0 * (i % 4), 100.0 + 180.0 * (i / 4)};
  base.n_sources = 5;
  auto sr = simulate(base);
  base.protocol = Protocol::ReMpolsr;
  auto re = simulate(base);
  CHECK(sr.report.link_failures == 0);
  CHECK(re.report.recoveries == 0);
  REQUIRE(sr.trace.packets.size() == re.trace.packets.size());
  for (std::size_t i = 0; i < sr.trace.packets.size(); ++i)
    CHECK(sr.trace.packets[i].fate == re.trace.packets[i].fate);
}

TEST_CASE("mdc uses four paths and needs two descriptions")
{
  ScenarioConfig c = static_base(Protocol::MdcMpolsr, 6);
  c.initial_positions = {{0, {100, 500}}, {1, {300, 300}}, {2, {300, 430}}, {3, {300, 570}}, {4, {300, 700}}, {5, {500, 500}}};
  c.flows = {{0, 5}};
  c.n_paths = 4;
  auto r = run(c);
  REQUIRE(r.mdc);
  CHECK(r.delivery_ratio == 1.0);
  CHECK(r.mdc->blocks_reconstructed == r.mdc->blocks_sent);
  CHECK(r.mdc->descriptions_sent == 4 * r.mdc->blocks_sent);
}

TEST_CASE("invalid configuration is rejected before running")
{
  ScenarioConfig c;
  c.speed_min = 5;
  c.speed_max = 2;
  CHECK_THROWS_AS(Simulator{c}, ConfigError);
  c = ScenarioConfig{};
  c.cost_transform = "cubic";
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("metrics")
{
  RunTrace t;
  auto empty = collect_metrics(t);
  CHECK(empty.delivery_ratio == 0.0);
  CHECK_FALSE(empty.mean_end_to_end_delay.has_value());

  t.packets = {{0, 0, 1.0, 1.25, PacketFate::Delivered},
               {0, 1, 2.0, 2.75, PacketFate::Delivered},
               {0, 2, 3.0, std::nullopt, PacketFate::DroppedLink},
               {0, 3, 4.0, std::nullopt, PacketFate::InFlight}};
  auto r = collect_metrics(t);
  CHECK(r.sent_app_packets == 4);
  CHECK(r.delivered_app_packets == 2);
  CHECK(r.delivery_ratio == 0.5);
  CHECK(*r.mean_end_to_end_delay == doctest::Approx(0.5));
  CHECK(r.dropped_link == 1);
  CHECK(r.in_flight == 1);
  CHECK(report_fields(r).size() == report_fields(empty).size());
}

TEST_CASE("mobility")
{
  MobilityParams still{1000, 1000, 0, 0, 0};
  Rng rng(1);
  std::vector<MobileNode> nodes{place_node(still, rng), place_node(still, rng)};
  auto before = nodes;
  for (int i = 0; i < 100; ++i)
    mobility_step(nodes, still, 0.5, rng);
  CHECK(nodes[0].position == before[0].position);
  CHECK(nodes[1].position == before[1].position);
  CHECK_THROWS_AS(mobility_step(nodes, still, 0.0, rng), InputError);

  MobilityParams moving{1000, 1000, 2, 10, 1};
  auto trajectory = [&] {
    Rng r(77);
    std::vector<MobileNode> one{place_node(moving, r)};
    std::vector<Position> out;
    for (int i = 0; i < 500; ++i) {
      mobility_step(one, moving, 0.25, r);
      out.push_back(one[0].position);
      CHECK(one[0].position.x >= 0.0);
      CHECK(one[0].position.x <= 1000.0);
    }
    return out;
  };
  CHECK(trajectory() == trajectory());
}

TEST_CASE("random waypoint favours the centre")
{
  MobilityParams p{1000, 1000, 5, 5, 0};
  Rng rng(3);
  std::vector<MobileNode> nodes{place_node(p, rng)};
  int centre = 0;
  const int steps = 100000;
  for (int i = 0; i < steps; ++i) {
    mobility_step(nodes, p, 1.0, rng);
    const auto& pos = nodes[0].position;
    centre += std::fabs(pos.x - 500) < 250 && std::fabs(pos.y - 500) < 250 ? 1 : 0;
  }
  // The central quarter of the area holds a quarter of a uniform sample.
  CHECK(centre / static_cast<double>(steps) > 0.35);
}
