#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "satnet/errors.hpp"
#include "satnet/netsim.hpp"

using namespace satnet;
using namespace satnet::sim;
using orbit::LinkKind;
using orbit::LinkStatus;
using orbit::NodeId;
using orbit::sat_id;
using orbit::uav_id;

namespace {

orbit::Link mk_link(NodeId a, NodeId b, double bw_mbps, double latency_ms,
                    LinkKind kind = LinkKind::IntraOrbit) {
  orbit::Link l;
  l.a = a;
  l.b = b;
  if (l.b < l.a) std::swap(l.a, l.b);
  l.kind = kind;
  l.bandwidth_mbps = bw_mbps;
  l.latency_ms = latency_ms;
  l.status = LinkStatus::Active;
  return l;
}

orbit::TopologyGraph graph_of(std::vector<NodeId> nodes, std::vector<orbit::Link> links) {
  orbit::TopologyGraph g;
  g.nodes = std::move(nodes);
  std::sort(g.nodes.begin(), g.nodes.end());
  g.links = std::move(links);
  std::sort(g.links.begin(), g.links.end(), [](const orbit::Link& x, const orbit::Link& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (NodeId n : g.nodes) g.positions[n] = {};
  return g;
}

// Hand-crafted state pinned to a fixed topology: the epoch is pushed out so
// step() never rebuilds over the custom graph.
SimState hand_state(orbit::TopologyGraph g, std::vector<Service> services,
                    TrafficConfig traffic, double slot_seconds = 1.0) {
  SimState st;
  st.orbital.slot_seconds = slot_seconds;
  st.orbital.topology_epoch_slots = 1 << 20;
  st.traffic = traffic;
  for (NodeId n : g.nodes) {
    if (n.kind == orbit::NodeKind::Uav) st.uavs.push_back({n, {}});
  }
  st.graph = std::move(g);
  st.services = std::move(services);
  st.last_rebuild_clock = 0;
  st.traffic_rng = Rng(7);
  st.epoch_requests.assign(static_cast<size_t>(traffic.num_services),
                           std::vector<long>(std::max<size_t>(1, st.uavs.size()), 0));
  st.prev_epoch_requests = st.epoch_requests;
  return st;
}

Service service_at(int id, NodeId host, double state_kb = 500.0) {
  Service s;
  s.service_id = id;
  s.host = host;
  s.state_size_kb = state_kb;
  return s;
}

// kb per slot -> Mbps for 1-second slots.
double bw_for_capacity(double kb_per_slot, double slot_seconds = 1.0) {
  return kb_per_slot * 8.0 / (1000.0 * slot_seconds);
}

Packet inject_packet(SimState& st, long id, NodeId src, int service, double size_kb,
                     std::vector<NodeId> path, long deadline = 50) {
  Packet p;
  p.packet_id = id;
  p.source = src;
  p.service_id = service;
  p.size_kb = size_kb;
  p.created_slot = st.clock;
  p.path = std::move(path);
  p.position = 0;
  p.deadline_slots = deadline;
  st.packets.push_back(p);
  st.cumulative.generated += 1;
  return p;
}

}  // namespace

TEST_CASE("action indices decode onto the 7x3 composite space") {
  CHECK(kActionCount == 21);
  for (int a = 0; a < kActionCount; ++a) {
    const SatelliteAction d = decode_action(a);
    CHECK(d.migration_choice >= 0);
    CHECK(d.migration_choice <= 6);
    CHECK(encode_action(d) == a);
  }
}

TEST_CASE("link capacity follows the Mbps-to-kb conversion") {
  orbit::Link l = mk_link(sat_id(0), sat_id(1), 80.0, 5.0);
  CHECK(link_capacity_kb(l, 1.0) == doctest::Approx(10000.0));
  CHECK(link_capacity_kb(l, 10.0) == doctest::Approx(100000.0));
}

TEST_CASE("zero request probability generates nothing") {
  TrafficConfig t;
  t.p_req = 0.0;
  auto g = graph_of({sat_id(0), uav_id(0)}, {mk_link(sat_id(0), uav_id(0), 0.8, 3.0,
                                                     LinkKind::UavSat)});
  SimState st = hand_state(std::move(g), {service_at(0, sat_id(0))}, t);
  for (int i = 0; i < 100; ++i) CHECK(generate_requests(st).empty());
}

TEST_CASE("certain emission generates one packet per uav per slot") {
  TrafficConfig t;
  t.p_req = 1.0;
  auto g = graph_of({sat_id(0), uav_id(0), uav_id(1), uav_id(2), uav_id(3)},
                    {mk_link(sat_id(0), uav_id(0), 0.8, 3.0, LinkKind::UavSat)});
  SimState st = hand_state(std::move(g), {service_at(0, sat_id(0))}, t);
  for (int i = 0; i < 20; ++i) {
    const auto pkts = generate_requests(st);
    CHECK(pkts.size() == 4);
  }
}

TEST_CASE("packet sizes stay within the configured range") {
  TrafficConfig t;
  t.p_req = 1.0;
  auto g = graph_of({sat_id(0), uav_id(0)}, {});
  SimState st = hand_state(std::move(g), {service_at(0, sat_id(0))}, t);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 10000; ++i) {
    for (const Packet& p : generate_requests(st)) {
      lo = std::min(lo, p.size_kb);
      hi = std::max(hi, p.size_kb);
    }
  }
  CHECK(lo >= 100.0);
  CHECK(hi <= 1000.0);
  CHECK(lo < 150.0);   // draws actually spread over the range
  CHECK(hi > 950.0);
}

TEST_CASE("shortest path picks the two-hop route over the heavy direct edge") {
  auto g = graph_of({sat_id(0), sat_id(1), sat_id(2)},
                    {mk_link(sat_id(0), sat_id(1), 10, 5.0), mk_link(sat_id(1), sat_id(2), 10, 5.0),
                     mk_link(sat_id(0), sat_id(2), 10, 12.0)});
  const auto r = shortest_path(g, sat_id(0), sat_id(2), RouteWeight::Latency);
  REQUIRE(r.has_value());
  CHECK(r->cost == 10.0);
  CHECK(r->path == std::vector<NodeId>{sat_id(0), sat_id(1), sat_id(2)});
}

TEST_CASE("path to self is trivial") {
  auto g = graph_of({sat_id(0), sat_id(1)}, {mk_link(sat_id(0), sat_id(1), 10, 5.0)});
  const auto r = shortest_path(g, sat_id(0), sat_id(0), RouteWeight::Latency);
  REQUIRE(r.has_value());
  CHECK(r->cost == 0.0);
  CHECK(r->path == std::vector<NodeId>{sat_id(0)});
}

TEST_CASE("inactive links make a node unreachable") {
  auto g = graph_of({sat_id(0), sat_id(1)}, {mk_link(sat_id(0), sat_id(1), 10, 5.0)});
  g.links[0].status = LinkStatus::Inactive;
  CHECK_FALSE(shortest_path(g, sat_id(0), sat_id(1), RouteWeight::Latency).has_value());
}

TEST_CASE("unknown endpoints throw") {
  auto g = graph_of({sat_id(0)}, {});
  CHECK_THROWS_AS(shortest_path(g, sat_id(0), sat_id(9), RouteWeight::Latency), UnknownNode);
  CHECK_THROWS_AS(shortest_path(g, sat_id(9), sat_id(0), RouteWeight::Latency), UnknownNode);
}

namespace {

// Exhaustive simple-path enumeration; costs summed in path order, ties broken
// by the lexicographically smaller node sequence.
struct BruteRoute {
  std::vector<NodeId> path;
  double cost = 0.0;
};

void brute_dfs(const orbit::TopologyGraph& g, NodeId cur, NodeId dst, std::vector<NodeId>& path,
               std::vector<bool>& used, double cost, std::optional<BruteRoute>& best) {
  if (cur == dst) {
    if (!best || cost < best->cost || (cost == best->cost && path < best->path)) {
      best = BruteRoute{path, cost};
    }
    return;
  }
  for (const orbit::Link& l : g.links) {
    if (l.status != LinkStatus::Active || !l.touches(cur)) continue;
    const NodeId nxt = l.other(cur);
    const size_t idx = static_cast<size_t>(
        std::lower_bound(g.nodes.begin(), g.nodes.end(), nxt) - g.nodes.begin());
    if (used[idx]) continue;
    used[idx] = true;
    path.push_back(nxt);
    brute_dfs(g, nxt, dst, path, used, cost + l.latency_ms, best);
    path.pop_back();
    used[idx] = false;
  }
}

std::optional<BruteRoute> brute_force_min_latency(const orbit::TopologyGraph& g, NodeId src,
                                                  NodeId dst) {
  std::vector<NodeId> path{src};
  std::vector<bool> used(g.nodes.size(), false);
  const size_t sidx = static_cast<size_t>(
      std::lower_bound(g.nodes.begin(), g.nodes.end(), src) - g.nodes.begin());
  used[sidx] = true;
  std::optional<BruteRoute> best;
  brute_dfs(g, src, dst, path, used, 0.0, best);
  return best;
}

}  // namespace

TEST_CASE("min-latency routing matches brute-force enumeration on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(3, 8));
    std::vector<NodeId> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(sat_id(i));
    std::vector<orbit::Link> links;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.bernoulli(0.45)) {
          links.push_back(
              mk_link(sat_id(i), sat_id(j), 10.0, static_cast<double>(rng.uniform_int(1, 50))));
        }
      }
    }
    auto g = graph_of(nodes, links);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto fast = shortest_path(g, sat_id(i), sat_id(j), RouteWeight::Latency);
        const auto slow = brute_force_min_latency(g, sat_id(i), sat_id(j));
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
          CHECK(fast->cost == slow->cost);  // exact equality, integer weights
          CHECK(fast->path == slow->path);
        }
      }
    }
  }
}

TEST_CASE("load-balanced routing avoids the congested branch of a diamond") {
  // u0 - A, then A-B-D and A-C-D with equal latencies; the A-B edge carries a
  // full queue. Weighted costs: via B = 2*(1+1) + 2 = 6 on the satellite legs,
  // via C = 2 + 2 = 4, so C wins despite B being lexicographically first.
  const NodeId A = sat_id(0), B = sat_id(1), C = sat_id(2), D = sat_id(3), U = uav_id(0);
  auto g = graph_of({A, B, C, D, U},
                    {mk_link(U, A, 0.8, 2.0, LinkKind::UavSat), mk_link(A, B, 1.0, 2.0),
                     mk_link(A, C, 1.0, 2.0), mk_link(B, D, 1.0, 2.0), mk_link(C, D, 1.0, 2.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, D)}, t);

  // Occupy (A,B) exactly to capacity with an in-flight packet.
  const double cap_ab = link_capacity_kb(*st.graph.find_link(A, B), st.orbital.slot_seconds);
  inject_packet(st, 100, U, 0, cap_ab, {A, B, D});

  LinkLoadFn load = [&](const orbit::Link& l) {
    const double cap = link_capacity_kb(l, st.orbital.slot_seconds);
    return cap > 0.0 ? st.link_queue_kb(l.a, l.b) / cap : 1.0;
  };

  Packet p;
  p.packet_id = 101;
  p.source = U;
  p.service_id = 0;
  p.size_kb = 10.0;
  p.created_slot = 0;
  p.path = {U};
  REQUIRE(route_packet(st, p, RoutingMode::LoadBalanced, &load));
  CHECK(p.path == std::vector<NodeId>{U, A, C, D});

  // Without load, the tie breaks toward the lexicographically smaller branch.
  Packet q = p;
  q.path = {U};
  REQUIRE(route_packet(st, q, RoutingMode::MinLatency));
  CHECK(q.path == std::vector<NodeId>{U, A, B, D});
}

TEST_CASE("single-hop delivery to a directly linked host") {
  const NodeId A = sat_id(0), U = uav_id(0);
  auto g = graph_of({A, U}, {mk_link(U, A, 0.8, 3.0, LinkKind::UavSat)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  Packet p;
  p.source = U;
  p.service_id = 0;
  p.size_kb = 50.0;
  p.path = {U};
  REQUIRE(route_packet(st, p, RoutingMode::MinLatency));
  CHECK(p.path == std::vector<NodeId>{U, A});
}

TEST_CASE("unreachable host drops the packet and counts a violation") {
  const NodeId A = sat_id(0), B = sat_id(1), U = uav_id(0);
  auto g = graph_of({A, B, U}, {mk_link(U, A, 0.8, 3.0, LinkKind::UavSat)});
  TrafficConfig t;
  t.p_req = 1.0;
  t.num_services = 1;
  SimState st = hand_state(g, {service_at(0, B)}, t);  // B unreachable

  const SlotMetrics m = step(st, ActionSet{});
  CHECK(m.generated == 1);
  CHECK(m.dropped == 1);
  CHECK(m.violations == 1);
  CHECK(m.in_flight == 0);
  CHECK(st.conservation_holds());
}

TEST_CASE("step with no packets or migrations reports all-zero metrics") {
  const NodeId A = sat_id(0), B = sat_id(1);
  auto g = graph_of({A, B}, {mk_link(A, B, 10, 5.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  const SlotMetrics m = step(st, ActionSet{});
  CHECK(m.generated == 0);
  CHECK(m.delivered == 0);
  CHECK(m.dropped == 0);
  CHECK(m.in_flight == 0);
  CHECK(m.violations == 0);
  CHECK(m.latency_sum_slots == 0.0);
}

TEST_CASE("a 100 kb packet over an 80 kb/slot hop is delivered on the second slot") {
  // Slot 1: budget 80 < 100, transfers partially. Slot 2: the remaining 20 kb
  // fit, the packet advances and is delivered with latency 2 slots.
  const NodeId A = sat_id(0), U = uav_id(0);
  auto g = graph_of({A, U}, {mk_link(U, A, bw_for_capacity(80.0), 3.0, LinkKind::UavSat)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  inject_packet(st, 0, U, 0, 100.0, {U, A});

  const SlotMetrics s1 = step(st, ActionSet{});
  CHECK(s1.delivered == 0);
  CHECK(s1.in_flight == 1);

  const SlotMetrics s2 = step(st, ActionSet{});
  CHECK(s2.delivered == 1);
  CHECK(s2.latency_sum_slots == 2.0);
  CHECK(s2.in_flight == 0);
  CHECK(st.conservation_holds());
}

TEST_CASE("transmit is FIFO by creation with id tiebreak") {
  const NodeId A = sat_id(0), U = uav_id(0);
  auto g = graph_of({A, U}, {mk_link(U, A, bw_for_capacity(80.0), 3.0, LinkKind::UavSat)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  inject_packet(st, 0, U, 0, 60.0, {U, A});
  inject_packet(st, 1, U, 0, 60.0, {U, A});

  const SlotMetrics s1 = step(st, ActionSet{});
  CHECK(s1.delivered == 1);  // id 0 advanced; id 1 got only 20 kb of budget
  REQUIRE(st.packets.size() == 1);
  CHECK(st.packets[0].packet_id == 1);
  CHECK(st.packets[0].hop_progress_kb == doctest::Approx(20.0));

  const SlotMetrics s2 = step(st, ActionSet{});
  CHECK(s2.delivered == 1);
  CHECK(st.conservation_holds());
}

TEST_CASE("deadline expiry drops the packet with a violation") {
  const NodeId A = sat_id(0), U = uav_id(0);
  // Capacity 10 kb/slot can never move the 100 kb packet.
  auto g = graph_of({A, U}, {mk_link(U, A, bw_for_capacity(10.0), 3.0, LinkKind::UavSat)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  inject_packet(st, 0, U, 0, 100.0, {U, A}, /*deadline=*/2);

  CHECK(step(st, ActionSet{}).dropped == 0);  // age 1
  CHECK(step(st, ActionSet{}).dropped == 0);  // age 2 == deadline, still allowed
  const SlotMetrics s3 = step(st, ActionSet{});
  CHECK(s3.dropped == 1);
  CHECK(s3.violations == 1);
  CHECK(st.packets.empty());
  CHECK(st.conservation_holds());
}

TEST_CASE("stay migration choice is a no-op") {
  const NodeId A = sat_id(0), B = sat_id(1);
  auto g = graph_of({A, B}, {mk_link(A, B, bw_for_capacity(200.0), 5.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A, 400.0)}, t);
  CHECK(apply_migration(st, A, 0) == 0);
  CHECK_FALSE(st.services[0].migration.has_value());
  CHECK(st.services[0].host == A);
}

TEST_CASE("migration of 400 kb over a 200 kb/slot link completes in two slots") {
  const NodeId A = sat_id(0), B = sat_id(1);
  auto g = graph_of({A, B}, {mk_link(A, B, bw_for_capacity(200.0), 5.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A, 400.0)}, t);

  CHECK(apply_migration(st, A, 1) == 0);
  REQUIRE(st.services[0].migration.has_value());
  CHECK(st.services[0].migration->target == B);

  const SlotMetrics s1 = step(st, ActionSet{});
  CHECK(s1.migrations_completed == 0);
  CHECK(st.services[0].host == A);  // old host serves during migration

  const SlotMetrics s2 = step(st, ActionSet{});
  CHECK(s2.migrations_completed == 1);
  CHECK(st.services[0].host == B);
  CHECK_FALSE(st.services[0].migration.has_value());
}

TEST_CASE("out-of-range migration choice coerces to Stay with a violation") {
  const NodeId A = sat_id(0), B = sat_id(1);
  auto g = graph_of({A, B}, {mk_link(A, B, 10, 5.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  CHECK(apply_migration(st, A, 5) == 1);
  CHECK_FALSE(st.services[0].migration.has_value());
}

TEST_CASE("re-migrating while every hosted service is migrating is a violation no-op") {
  const NodeId A = sat_id(0), B = sat_id(1);
  auto g = graph_of({A, B}, {mk_link(A, B, bw_for_capacity(1.0), 5.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A, 400.0)}, t);
  CHECK(apply_migration(st, A, 1) == 0);
  CHECK(apply_migration(st, A, 1) == 1);  // already in progress
  CHECK(st.services[0].migration->target == B);
}

TEST_CASE("migrating a satellite that hosts nothing is a plain no-op") {
  const NodeId A = sat_id(0), B = sat_id(1);
  auto g = graph_of({A, B}, {mk_link(A, B, 10, 5.0)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, B)}, t);
  CHECK(apply_migration(st, A, 1) == 0);
}

TEST_CASE("conservation identity holds across random seeded runs") {
  orbit::OrbitalConfig oc;
  TrafficConfig t;
  std::vector<orbit::UavSite> uavs;
  for (int i = 0; i < 4; ++i)
    uavs.push_back({uav_id(i), orbit::ground_position(oc, 70.0 + 5.0 * i, 90.0 * i)});

  SimState st = make_sim(oc, t, uavs, 99);
  Rng action_rng(5);
  for (int slot = 0; slot < 1000; ++slot) {
    ActionSet actions;
    for (NodeId n : st.graph.nodes) {
      if (n.kind != orbit::NodeKind::Satellite) continue;
      SatelliteAction a;
      a.migration_choice = static_cast<int>(action_rng.uniform_int(0, 6));
      a.routing_mode = static_cast<RoutingMode>(action_rng.uniform_int(0, 2));
      actions.per_satellite[n] = a;
    }
    step(st, actions);
    REQUIRE(st.conservation_holds());
  }
  CHECK(st.cumulative.generated > 0);
  CHECK(st.cumulative.delivered > 0);
}

TEST_CASE("identical seeds produce identical metrics streams") {
  orbit::OrbitalConfig oc;
  TrafficConfig t;
  std::vector<orbit::UavSite> uavs{{uav_id(0), orbit::ground_position(oc, 80.0, 0.0)}};

  auto run = [&](uint64_t seed) {
    SimState st = make_sim(oc, t, uavs, seed);
    std::vector<SlotMetrics> ms;
    for (int slot = 0; slot < 200; ++slot) ms.push_back(step(st, ActionSet{}));
    return ms;
  };
  const auto a = run(42), b = run(42), c = run(43);
  REQUIRE(a.size() == b.size());
  bool differs_from_c = false;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].generated == b[i].generated);
    CHECK(a[i].delivered == b[i].delivered);
    CHECK(a[i].dropped == b[i].dropped);
    CHECK(a[i].latency_sum_slots == b[i].latency_sum_slots);
    if (a[i].generated != c[i].generated || a[i].delivered != c[i].delivered)
      differs_from_c = true;
  }
  CHECK(differs_from_c);
}

TEST_CASE("delivered latency is bounded below by the hop count") {
  orbit::OrbitalConfig oc;
  TrafficConfig t;
  std::vector<orbit::UavSite> uavs;
  for (int i = 0; i < 4; ++i)
    uavs.push_back({uav_id(i), orbit::ground_position(oc, 72.0 + 4.0 * i, 90.0 * i)});
  SimState st = make_sim(oc, t, uavs, 7);

  // Track per-packet path lengths at routing time via a wrapper run; here we
  // simply assert the aggregate: latency_sum >= delivered (>= one slot each).
  double latency_sum = 0.0;
  long delivered = 0;
  for (int slot = 0; slot < 500; ++slot) {
    const SlotMetrics m = step(st, ActionSet{});
    latency_sum += m.latency_sum_slots;
    delivered += m.delivered;
  }
  CHECK(delivered > 0);
  CHECK(latency_sum >= static_cast<double>(delivered));
}

TEST_CASE("episode reset flushes packets while preserving conservation") {
  orbit::OrbitalConfig oc;
  TrafficConfig t;
  std::vector<orbit::UavSite> uavs{{uav_id(0), orbit::ground_position(oc, 80.0, 0.0)},
                                   {uav_id(1), orbit::ground_position(oc, 85.0, 180.0)}};
  SimState st = make_sim(oc, t, uavs, 11);
  for (int slot = 0; slot < 57; ++slot) step(st, ActionSet{});

  const long before_dropped = st.cumulative.dropped;
  const long in_flight = static_cast<long>(st.packets.size());
  const long flushed = reset_episode(st, 1234);
  CHECK(flushed == in_flight);
  CHECK(st.cumulative.dropped == before_dropped + flushed);
  CHECK(st.packets.empty());
  CHECK(st.conservation_holds());

  // Same placement seed, same hosts.
  SimState st2 = make_sim(oc, t, uavs, 11);
  for (int slot = 0; slot < 57; ++slot) step(st2, ActionSet{});
  reset_episode(st2, 1234);
  for (size_t i = 0; i < st.services.size(); ++i)
    CHECK(st.services[i].host == st2.services[i].host);
}

TEST_CASE("queue occupancy reflects pending bytes against capacity") {
  const NodeId A = sat_id(0), U = uav_id(0);
  auto g = graph_of({A, U}, {mk_link(U, A, bw_for_capacity(100.0), 3.0, LinkKind::UavSat)});
  TrafficConfig t;
  t.p_req = 0.0;
  SimState st = hand_state(g, {service_at(0, A)}, t);
  CHECK(st.queue_occupancy(U) == 0.0);
  inject_packet(st, 0, U, 0, 50.0, {U, A});
  CHECK(st.queue_occupancy(U) == doctest::Approx(0.5));
  inject_packet(st, 1, U, 0, 500.0, {U, A});
  CHECK(st.queue_occupancy(U) == 1.0);  // clamped
}
