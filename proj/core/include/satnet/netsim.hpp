#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "satnet/orbit.hpp"
#include "satnet/rng.hpp"

namespace satnet::sim {

using orbit::Link;
using orbit::NodeId;
using orbit::TopologyGraph;

struct MigrationJob {
  NodeId target;
  double remaining_kb = 0.0;
  long transfer_id = 0;
  long started_slot = 0;
};

struct Service {
  int service_id = 0;
  NodeId host;  // always a satellite
  double state_size_kb = 500.0;
  std::optional<MigrationJob> migration;
};

enum class RoutingMode : int { MinLatency = 0, MaxBandwidth = 1, LoadBalanced = 2 };

struct Packet {
  long packet_id = 0;
  NodeId source;  // UAV
  int service_id = 0;
  double size_kb = 0.0;
  long created_slot = 0;
  std::vector<NodeId> path;  // begins at source, ends at host at routing time
  size_t position = 0;       // index into path of the current node
  long deadline_slots = 50;
  double hop_progress_kb = 0.0;  // budget already spent on the next hop
  RoutingMode mode = RoutingMode::MinLatency;

  NodeId current_node() const { return path[position]; }
  bool at_destination() const { return position + 1 == path.size(); }
};

struct SlotMetrics {
  long generated = 0;
  long delivered = 0;
  long dropped = 0;
  long in_flight = 0;
  double latency_sum_slots = 0.0;
  long violations = 0;
  long migrations_completed = 0;
};

// Composite per-satellite action: migration choice 0 = Stay, 1..6 = index into
// the sorted active satellite neighbor list; routing mode applies to packets
// targeting services hosted at this satellite.
struct SatelliteAction {
  int migration_choice = 0;
  RoutingMode routing_mode = RoutingMode::MinLatency;
};

struct ActionSet {
  std::map<NodeId, SatelliteAction> per_satellite;
};

inline constexpr int kMigrationChoices = 7;  // Stay + up to 6 neighbors
inline constexpr int kRoutingModes = 3;
inline constexpr int kActionCount = kMigrationChoices * kRoutingModes;  // 21

SatelliteAction decode_action(int action_index);
int encode_action(const SatelliteAction& a);

struct TrafficConfig {
  double p_req = 0.5;
  double packet_min_kb = 100.0;
  double packet_max_kb = 1000.0;
  long deadline_slots = 50;
  int num_services = 4;
  double service_state_kb = 500.0;

  void validate() const;
};

// Per-slot deliverable volume of a link in kb: Mbps * seconds * 1000 / 8.
double link_capacity_kb(const Link& link, double slot_seconds);

struct SimState {
  orbit::OrbitalConfig orbital;
  TrafficConfig traffic;
  std::vector<orbit::UavSite> uavs;

  long clock = 0;
  TopologyGraph graph;
  std::vector<Service> services;
  std::vector<Packet> packets;

  uint64_t topology_seed = 0;
  Rng traffic_rng{0};

  long last_rebuild_clock = -1;
  long next_transfer_id = 0;

  SlotMetrics cumulative;
  std::vector<orbit::TopologyUpdate> last_updates;  // from the latest epoch rebuild

  // Rebuild-time drops waiting to be folded into the next step()'s slot
  // metrics (cumulative counters are already up to date).
  SlotMetrics pending_epoch_metrics;
  std::map<NodeId, long> pending_dropped_at;

  // Request counts per (service, uav) for the current and previous epoch;
  // the greedy baseline reads the previous epoch's column.
  std::vector<std::vector<long>> epoch_requests;       // [service][uav]
  std::vector<std::vector<long>> prev_epoch_requests;

  // Trailing per-slot windows (length <= topology_epoch_slots) backing the
  // recent-throughput/drop observation features.
  std::deque<long> window_generated;
  std::map<NodeId, std::deque<long>> window_delivered_at;
  std::map<NodeId, std::deque<long>> window_dropped_at;

  long window_generated_total() const;
  long window_delivered_at_node(NodeId n) const;
  long window_dropped_at_node(NodeId n) const;

  // Remaining kb the in-flight transfers still owe to each of node n's
  // outgoing next hops, relative to the node's total active link capacity.
  double queue_occupancy(NodeId n) const;
  double link_queue_kb(NodeId a, NodeId b) const;

  bool conservation_holds() const;
};

// Fresh simulator: topology built for slot `start_slot`, services placed on
// distinct seeded satellites, windows empty.
SimState make_sim(const orbit::OrbitalConfig& orbital, const TrafficConfig& traffic,
                  const std::vector<orbit::UavSite>& uavs, uint64_t master_seed,
                  long start_slot = 0);

// Episode boundary reset: flushes in-flight packets (counted as drops, not
// violations — episode truncation, not network failure), cancels migrations,
// re-places services from the given seed, clears windows. The clock and the
// constellation keep advancing across episodes. Returns the flushed count.
long reset_episode(SimState& state, uint64_t placement_seed);

// Epoch boundary work: rebuilds the topology for the current clock, publishes
// diff updates, re-routes in-flight packets whose remaining path lost a link
// (re-route failure drops the packet), and rotates the request window. No-op
// unless clock is on an epoch boundary that has not been rebuilt yet. The
// experiment loop calls this before observing so decisions see the graph they
// act on; step() then skips the already-applied rebuild.
void ensure_epoch_topology(SimState& state);

std::vector<Packet> generate_requests(SimState& state);

enum class RouteWeight { Latency, InverseBandwidth, Load };

struct Route {
  std::vector<NodeId> path;
  double cost = 0.0;  // summed in path order
};

using LinkLoadFn = std::function<double(const Link&)>;  // occupancy fraction in [0,1]

// Minimum-weight path over Active links; ties broken by lexicographically
// smallest node-id sequence. UAV nodes never relay — they appear only as path
// endpoints. Throws UnknownNode; returns nullopt when unreachable.
std::optional<Route> shortest_path(const TopologyGraph& graph, NodeId src, NodeId dst,
                                   RouteWeight weight, const LinkLoadFn* load = nullptr);

// Assigns a path toward the packet's service host (current host; a service
// mid-migration still serves at its old host). Returns false when no route
// exists — the caller drops the packet.
bool route_packet(const SimState& state, Packet& packet, RoutingMode mode,
                  const LinkLoadFn* load = nullptr);

// Advances one slot. Phase order: epoch rebuild, migrations (decision slots
// only), request generation + routing, transmit (FIFO by creation slot, ties
// by transfer id; one hop per packet per slot, partial budget accumulates on
// the current hop), delivery, deadline drops, migration completion, metrics.
SlotMetrics step(SimState& state, const ActionSet& actions);

// Stay is a no-op. Otherwise the satellite's lowest-id non-migrating hosted
// service starts migrating to the chosen active neighbor. Out-of-range
// neighbor indices coerce to Stay and count a violation, as does attempting
// to re-migrate when every hosted service is already migrating. Returns
// violations incurred.
long apply_migration(SimState& state, NodeId satellite, int choice);

}  // namespace satnet::sim
