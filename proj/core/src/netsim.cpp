#include "satnet/netsim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <set>

#include "satnet/errors.hpp"

namespace satnet::sim {

SatelliteAction decode_action(int action_index) {
  SatelliteAction a;
  a.migration_choice = action_index / kRoutingModes;
  a.routing_mode = static_cast<RoutingMode>(action_index % kRoutingModes);
  return a;
}

int encode_action(const SatelliteAction& a) {
  return a.migration_choice * kRoutingModes + static_cast<int>(a.routing_mode);
}

void TrafficConfig::validate() const {
  if (p_req < 0.0 || p_req > 1.0) throw ConfigInvalid("p_req must be in [0,1]");
  if (packet_min_kb <= 0.0 || packet_max_kb < packet_min_kb)
    throw ConfigInvalid("packet size range invalid");
  if (deadline_slots < 1) throw ConfigInvalid("deadline_slots must be >= 1");
  if (num_services < 1) throw ConfigInvalid("num_services must be >= 1");
  if (service_state_kb <= 0.0) throw ConfigInvalid("service_state_kb must be > 0");
}

double link_capacity_kb(const Link& link, double slot_seconds) {
  return link.bandwidth_mbps * slot_seconds * 1000.0 / 8.0;
}

long SimState::window_generated_total() const {
  long s = 0;
  for (long v : window_generated) s += v;
  return s;
}

long SimState::window_delivered_at_node(NodeId n) const {
  auto it = window_delivered_at.find(n);
  if (it == window_delivered_at.end()) return 0;
  long s = 0;
  for (long v : it->second) s += v;
  return s;
}

long SimState::window_dropped_at_node(NodeId n) const {
  auto it = window_dropped_at.find(n);
  if (it == window_dropped_at.end()) return 0;
  long s = 0;
  for (long v : it->second) s += v;
  return s;
}

double SimState::link_queue_kb(NodeId a, NodeId b) const {
  if (b < a) std::swap(a, b);
  double q = 0.0;
  for (const Packet& p : packets) {
    if (p.at_destination()) continue;
    NodeId x = p.path[p.position], y = p.path[p.position + 1];
    if (y < x) std::swap(x, y);
    if (x == a && y == b) q += p.size_kb - p.hop_progress_kb;
  }
  for (const Service& s : services) {
    if (!s.migration) continue;
    NodeId x = s.host, y = s.migration->target;
    if (y < x) std::swap(x, y);
    if (x == a && y == b) q += s.migration->remaining_kb;
  }
  return q;
}

double SimState::queue_occupancy(NodeId n) const {
  double queued = 0.0;
  for (const Packet& p : packets) {
    if (!p.at_destination() && p.current_node() == n)
      queued += p.size_kb - p.hop_progress_kb;
  }
  for (const Service& s : services) {
    if (s.migration && s.host == n) queued += s.migration->remaining_kb;
  }
  double capacity = 0.0;
  for (const Link& l : graph.links) {
    if (l.status == orbit::LinkStatus::Active && l.touches(n))
      capacity += link_capacity_kb(l, orbital.slot_seconds);
  }
  if (capacity <= 0.0) return queued > 0.0 ? 1.0 : 0.0;
  return std::clamp(queued / capacity, 0.0, 1.0);
}

bool SimState::conservation_holds() const {
  return cumulative.generated ==
         cumulative.delivered + cumulative.dropped + static_cast<long>(packets.size());
}

namespace {

void push_window(std::deque<long>& q, long v, size_t cap) {
  q.push_back(v);
  while (q.size() > cap) q.pop_front();
}

struct SlotScratch {
  std::map<NodeId, long> delivered_at;
  std::map<NodeId, long> dropped_at;
};

void place_services(SimState& st, uint64_t seed) {
  Rng place_rng(seed);
  std::vector<int> sats(st.orbital.num_satellites());
  for (int i = 0; i < st.orbital.num_satellites(); ++i) sats[i] = i;
  st.services.clear();
  for (int s = 0; s < st.traffic.num_services; ++s) {
    const int pick =
        static_cast<int>(place_rng.uniform_int(0, static_cast<int64_t>(sats.size()) - 1));
    Service svc;
    svc.service_id = s;
    svc.host = orbit::sat_id(sats[static_cast<size_t>(pick)]);
    svc.state_size_kb = st.traffic.service_state_kb;
    st.services.push_back(svc);
    if (sats.size() > 1) sats.erase(sats.begin() + pick);
  }
}

}  // namespace

SimState make_sim(const orbit::OrbitalConfig& orbital, const TrafficConfig& traffic,
                  const std::vector<orbit::UavSite>& uavs, uint64_t master_seed,
                  long start_slot) {
  orbital.validate();
  traffic.validate();

  SimState st;
  st.orbital = orbital;
  st.traffic = traffic;
  st.uavs = uavs;
  st.clock = start_slot;
  st.topology_seed = derive_seed(master_seed, "topology");
  st.traffic_rng = Rng(derive_seed(master_seed, "traffic"));

  const long epoch_index = start_slot / orbital.topology_epoch_slots;
  auto positions = orbit::propagate_positions(orbital, start_slot);
  st.graph = orbit::build_topology(
      orbital, positions, uavs,
      derive_seed(st.topology_seed, "epoch", static_cast<uint64_t>(epoch_index)), start_slot);
  st.last_rebuild_clock = start_slot;

  place_services(st, derive_seed(master_seed, "services", 0));

  st.epoch_requests.assign(static_cast<size_t>(traffic.num_services),
                           std::vector<long>(uavs.size(), 0));
  st.prev_epoch_requests = st.epoch_requests;
  return st;
}

long reset_episode(SimState& state, uint64_t placement_seed) {
  const long flushed = static_cast<long>(state.packets.size());
  state.cumulative.dropped += flushed;  // keeps the conservation identity exact
  state.packets.clear();
  state.cumulative.in_flight = 0;
  for (Service& s : state.services) s.migration.reset();
  place_services(state, placement_seed);

  state.window_generated.clear();
  state.window_delivered_at.clear();
  state.window_dropped_at.clear();
  for (auto& row : state.epoch_requests) std::fill(row.begin(), row.end(), 0);
  for (auto& row : state.prev_epoch_requests) std::fill(row.begin(), row.end(), 0);
  state.pending_epoch_metrics = SlotMetrics{};
  state.pending_dropped_at.clear();
  return flushed;
}

void ensure_epoch_topology(SimState& state) {
  if (state.clock % state.orbital.topology_epoch_slots != 0) return;
  if (state.last_rebuild_clock == state.clock) return;

  const long epoch_index = state.clock / state.orbital.topology_epoch_slots;
  auto positions = orbit::propagate_positions(state.orbital, state.clock);
  orbit::TopologyGraph next = orbit::build_topology(
      state.orbital, positions, state.uavs,
      derive_seed(state.topology_seed, "epoch", static_cast<uint64_t>(epoch_index)),
      state.clock);
  state.last_updates = orbit::diff_topology(state.graph, next);
  state.graph = std::move(next);
  state.last_rebuild_clock = state.clock;

  // Re-route in-flight packets whose remaining path lost a link; a failed
  // re-route drops the packet.
  std::vector<Packet> kept;
  kept.reserve(state.packets.size());
  for (Packet& p : state.packets) {
    bool intact = true;
    for (size_t i = p.position; i + 1 < p.path.size(); ++i) {
      const Link* l = state.graph.find_link(p.path[i], p.path[i + 1]);
      if (l == nullptr || l->status != orbit::LinkStatus::Active) {
        intact = false;
        break;
      }
    }
    if (intact) {
      kept.push_back(std::move(p));
      continue;
    }
    const NodeId from = p.path[p.position];
    Packet candidate = p;
    candidate.path = {from};
    candidate.position = 0;
    candidate.hop_progress_kb = 0.0;
    if (route_packet(state, candidate, p.mode)) {
      kept.push_back(std::move(candidate));
    } else {
      state.cumulative.dropped += 1;
      state.cumulative.violations += 1;
      state.pending_epoch_metrics.dropped += 1;
      state.pending_epoch_metrics.violations += 1;
      state.pending_dropped_at[from] += 1;
    }
  }
  state.packets = std::move(kept);

  state.prev_epoch_requests = state.epoch_requests;
  for (auto& row : state.epoch_requests) std::fill(row.begin(), row.end(), 0);
}

std::vector<Packet> generate_requests(SimState& state) {
  std::vector<Packet> out;
  if (state.services.empty()) return out;
  for (const orbit::UavSite& u : state.uavs) {
    if (!state.traffic_rng.bernoulli(state.traffic.p_req)) continue;
    Packet p;
    p.packet_id = state.next_transfer_id++;
    p.source = u.id;
    p.service_id = static_cast<int>(state.traffic_rng.uniform_int(
        0, static_cast<int64_t>(state.services.size()) - 1));
    p.size_kb = state.traffic_rng.uniform(state.traffic.packet_min_kb,
                                          state.traffic.packet_max_kb);
    p.created_slot = state.clock;
    p.deadline_slots = state.traffic.deadline_slots;
    p.path = {u.id};
    p.position = 0;
    out.push_back(std::move(p));
  }
  return out;
}

std::optional<Route> shortest_path(const TopologyGraph& graph, NodeId src, NodeId dst,
                                   RouteWeight weight, const LinkLoadFn* load) {
  if (!graph.has_node(src)) throw UnknownNode("shortest_path: unknown src " + orbit::node_name(src));
  if (!graph.has_node(dst)) throw UnknownNode("shortest_path: unknown dst " + orbit::node_name(dst));

  auto edge_weight = [&](const Link& l) -> double {
    switch (weight) {
      case RouteWeight::Latency: return l.latency_ms;
      case RouteWeight::InverseBandwidth: return 1.0 / l.bandwidth_mbps;
      case RouteWeight::Load: {
        const double occ = load ? std::clamp((*load)(l), 0.0, 1.0) : 0.0;
        return l.latency_ms * (1.0 + occ);
      }
    }
    return l.latency_ms;
  };

  // Adjacency over active links.
  std::map<NodeId, std::vector<std::pair<NodeId, double>>> adj;
  for (const Link& l : graph.links) {
    if (l.status != orbit::LinkStatus::Active) continue;
    const double w = edge_weight(l);
    adj[l.a].emplace_back(l.b, w);
    adj[l.b].emplace_back(l.a, w);
  }

  // A node may forward traffic only if it is a satellite or the path
  // destination; UAVs are access endpoints.
  auto can_relay = [&](NodeId n) { return n.kind == orbit::NodeKind::Satellite || n == dst; };

  // Dijkstra from dst so the lexicographic walk from src can follow optimal
  // continuations.
  const double inf = std::numeric_limits<double>::infinity();
  std::map<NodeId, double> dist;
  for (NodeId n : graph.nodes) dist[n] = inf;
  dist[dst] = 0.0;
  std::set<std::pair<double, NodeId>> pq;
  pq.insert({0.0, dst});
  while (!pq.empty()) {
    auto [d, v] = *pq.begin();
    pq.erase(pq.begin());
    if (d > dist[v]) continue;
    if (v != dst && !can_relay(v)) continue;  // cannot pass through
    for (const auto& [u, w] : adj[v]) {
      const double nd = w + dist[v];
      if (nd < dist[u]) {
        pq.erase({dist[u], u});
        dist[u] = nd;
        pq.insert({nd, u});
      }
    }
  }
  if (dist[src] == inf) return std::nullopt;

  Route route;
  route.path.push_back(src);
  NodeId cur = src;
  double cost = 0.0;
  while (cur != dst) {
    // Neighbors are scanned in sorted id order; the first optimal
    // continuation yields the lexicographically smallest path.
    auto& edges = adj[cur];
    std::sort(edges.begin(), edges.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    bool advanced = false;
    for (const auto& [u, w] : edges) {
      if (u != dst && !can_relay(u)) continue;
      if (w + dist[u] == dist[cur]) {
        cost += w;  // path-order summation
        route.path.push_back(u);
        cur = u;
        advanced = true;
        break;
      }
    }
    if (!advanced) return std::nullopt;  // unreachable under exact arithmetic
  }
  route.cost = cost;
  return route;
}

bool route_packet(const SimState& state, Packet& packet, RoutingMode mode,
                  const LinkLoadFn* load) {
  const Service& svc = state.services.at(static_cast<size_t>(packet.service_id));
  const NodeId host = svc.host;  // mid-migration services still serve here
  RouteWeight w = RouteWeight::Latency;
  if (mode == RoutingMode::MaxBandwidth) w = RouteWeight::InverseBandwidth;
  if (mode == RoutingMode::LoadBalanced) w = RouteWeight::Load;

  const NodeId from = packet.path.empty() ? packet.source : packet.current_node();
  auto route = shortest_path(state.graph, from, host, w, load);
  if (!route) return false;
  packet.path = std::move(route->path);
  packet.position = 0;
  packet.hop_progress_kb = 0.0;
  packet.mode = mode;
  return true;
}

long apply_migration(SimState& state, NodeId satellite, int choice) {
  if (choice == 0) return 0;  // Stay

  const auto neighbors = state.graph.active_satellite_neighbors(satellite);
  if (choice < 0 || choice > static_cast<int>(neighbors.size())) {
    return 1;  // coerced to Stay, counted as a violation
  }
  const NodeId target = neighbors[static_cast<size_t>(choice - 1)];

  Service* candidate = nullptr;
  bool hosts_any = false;
  for (Service& s : state.services) {
    if (s.host != satellite) continue;
    hosts_any = true;
    if (!s.migration && (candidate == nullptr || s.service_id < candidate->service_id))
      candidate = &s;
  }
  if (!hosts_any) return 0;       // nothing to migrate; plain no-op
  if (candidate == nullptr) return 1;  // all hosted services already migrating

  MigrationJob job;
  job.target = target;
  job.remaining_kb = candidate->state_size_kb;
  job.transfer_id = state.next_transfer_id++;
  job.started_slot = state.clock;
  candidate->migration = job;
  return 0;
}

SlotMetrics step(SimState& state, const ActionSet& actions) {
  SlotMetrics slot;
  SlotScratch scratch;
  const bool decision_slot = state.clock % state.orbital.topology_epoch_slots == 0;

  // (1) Epoch rebuild (idempotent when the caller already advanced the epoch);
  // rebuild-time drops land in this slot's metrics.
  ensure_epoch_topology(state);
  slot.dropped += state.pending_epoch_metrics.dropped;
  slot.violations += state.pending_epoch_metrics.violations;
  for (const auto& [node, count] : state.pending_dropped_at) scratch.dropped_at[node] += count;
  state.pending_epoch_metrics = SlotMetrics{};
  state.pending_dropped_at.clear();

  // (2) Migrations start on decision slots only.
  if (decision_slot) {
    for (const auto& [sat, action] : actions.per_satellite) {
      const long v = apply_migration(state, sat, action.migration_choice);
      slot.violations += v;
      state.cumulative.violations += v;
    }
  }

  // (3) Generate and route new packets. Routing-time load shadows both the
  // in-flight transfers and packets routed earlier this slot.
  std::map<std::pair<NodeId, NodeId>, double> routed_load;
  LinkLoadFn load = [&](const Link& l) -> double {
    NodeId a = l.a, b = l.b;
    double q = state.link_queue_kb(a, b);
    auto it = routed_load.find({a, b});
    if (it != routed_load.end()) q += it->second;
    const double cap = link_capacity_kb(l, state.orbital.slot_seconds);
    return cap > 0.0 ? q / cap : 1.0;
  };
  for (Packet& p : generate_requests(state)) {
    slot.generated += 1;
    state.cumulative.generated += 1;
    state.epoch_requests[static_cast<size_t>(p.service_id)]
        [static_cast<size_t>(p.source.index)] += 1;
    const Service& svc = state.services.at(static_cast<size_t>(p.service_id));
    RoutingMode mode = RoutingMode::MinLatency;
    auto it = actions.per_satellite.find(svc.host);
    if (it != actions.per_satellite.end()) mode = it->second.routing_mode;
    if (route_packet(state, p, mode, &load)) {
      for (size_t i = 0; i + 1 < p.path.size(); ++i) {
        NodeId a = p.path[i], b = p.path[i + 1];
        if (b < a) std::swap(a, b);
        routed_load[{a, b}] += p.size_kb;
      }
      state.packets.push_back(std::move(p));
    } else {
      slot.dropped += 1;
      slot.violations += 1;
      state.cumulative.dropped += 1;
      state.cumulative.violations += 1;
      scratch.dropped_at[p.source] += 1;
    }
  }

  // (4) Transmit: FIFO by (creation slot, transfer id) across packets and
  // migration transfers; budget may be consumed partially across slots, and a
  // packet advances at most one hop per slot.
  std::map<std::pair<NodeId, NodeId>, double> budget;
  for (const Link& l : state.graph.links) {
    if (l.status == orbit::LinkStatus::Active)
      budget[{l.a, l.b}] = link_capacity_kb(l, state.orbital.slot_seconds);
  }
  auto budget_for = [&](NodeId a, NodeId b) -> double* {
    if (b < a) std::swap(a, b);
    auto it = budget.find({a, b});
    return it == budget.end() ? nullptr : &it->second;
  };

  struct Job {
    long created;
    long id;
    bool is_packet;
    size_t index;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < state.packets.size(); ++i)
    jobs.push_back({state.packets[i].created_slot, state.packets[i].packet_id, true, i});
  for (size_t i = 0; i < state.services.size(); ++i) {
    if (state.services[i].migration)
      jobs.push_back({state.services[i].migration->started_slot,
                      state.services[i].migration->transfer_id, false, i});
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tie(a.created, a.id) < std::tie(b.created, b.id);
  });

  for (const Job& j : jobs) {
    if (j.is_packet) {
      Packet& p = state.packets[j.index];
      if (p.at_destination()) continue;
      double* avail = budget_for(p.path[p.position], p.path[p.position + 1]);
      if (avail == nullptr || *avail <= 0.0) continue;
      const double need = p.size_kb - p.hop_progress_kb;
      if (*avail >= need) {
        *avail -= need;
        p.position += 1;
        p.hop_progress_kb = 0.0;
      } else {
        p.hop_progress_kb += *avail;
        *avail = 0.0;
      }
    } else {
      Service& s = state.services[j.index];
      MigrationJob& mj = *s.migration;
      const Link* l = state.graph.find_link(s.host, mj.target);
      if (l == nullptr || l->status != orbit::LinkStatus::Active) {
        // Migration path vanished; the transfer fails.
        s.migration.reset();
        slot.violations += 1;
        state.cumulative.violations += 1;
        continue;
      }
      double* avail = budget_for(s.host, mj.target);
      if (avail == nullptr || *avail <= 0.0) continue;
      const double take = std::min(*avail, mj.remaining_kb);
      mj.remaining_kb -= take;
      *avail -= take;
    }
  }

  // (5) Deliver packets that reached the host they were routed to.
  {
    std::vector<Packet> still;
    still.reserve(state.packets.size());
    for (Packet& p : state.packets) {
      if (p.at_destination()) {
        const double latency = static_cast<double>(state.clock - p.created_slot + 1);
        slot.delivered += 1;
        slot.latency_sum_slots += latency;
        state.cumulative.delivered += 1;
        state.cumulative.latency_sum_slots += latency;
        scratch.delivered_at[p.path.back()] += 1;
      } else {
        still.push_back(std::move(p));
      }
    }
    state.packets = std::move(still);
  }

  // (6) Deadline violations.
  {
    std::vector<Packet> still;
    still.reserve(state.packets.size());
    for (Packet& p : state.packets) {
      const long age = state.clock - p.created_slot + 1;
      if (age > p.deadline_slots) {
        slot.dropped += 1;
        slot.violations += 1;
        state.cumulative.dropped += 1;
        state.cumulative.violations += 1;
        scratch.dropped_at[p.current_node()] += 1;
      } else {
        still.push_back(std::move(p));
      }
    }
    state.packets = std::move(still);
  }

  // (7) Completed migrations move the host.
  for (Service& s : state.services) {
    if (s.migration && s.migration->remaining_kb <= 0.0) {
      s.host = s.migration->target;
      s.migration.reset();
      slot.migrations_completed += 1;
      state.cumulative.migrations_completed += 1;
    }
  }

  // (8) Metrics and observation windows.
  slot.in_flight = static_cast<long>(state.packets.size());
  state.cumulative.in_flight = slot.in_flight;

  const size_t wcap = static_cast<size_t>(state.orbital.topology_epoch_slots);
  push_window(state.window_generated, slot.generated, wcap);
  for (NodeId n : state.graph.nodes) {
    push_window(state.window_delivered_at[n], scratch.delivered_at[n], wcap);
    push_window(state.window_dropped_at[n], scratch.dropped_at[n], wcap);
  }

  assert(state.conservation_holds());
  state.clock += 1;
  return slot;
}

}  // namespace satnet::sim
