#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "satnet/rng.hpp"

namespace satnet::orbit {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
};

double distance_km(const Vec3& a, const Vec3& b);

enum class NodeKind : uint8_t { Satellite = 0, Uav = 1 };

struct NodeId {
  NodeKind kind = NodeKind::Satellite;
  int index = 0;

  auto operator<=>(const NodeId&) const = default;
};

NodeId sat_id(int index);
NodeId uav_id(int index);

// Satellites render as spreadsheet-style letters (A..Z, AA..), UAVs as u0, u1,
// ... — the letter form is what the topology summary codec emits.
std::string node_name(NodeId id);
std::optional<NodeId> parse_node_name(const std::string& name);

enum class LinkKind : uint8_t { IntraOrbit = 0, InterOrbit = 1, UavSat = 2 };
enum class LinkStatus : uint8_t { Active = 0, Inactive = 1 };

struct Link {
  NodeId a, b;  // normalized so a < b
  LinkKind kind = LinkKind::IntraOrbit;
  double bandwidth_mbps = 0.0;
  double latency_ms = 0.0;
  LinkStatus status = LinkStatus::Active;

  bool touches(NodeId n) const { return a == n || b == n; }
  NodeId other(NodeId n) const { return a == n ? b : a; }
};

struct OrbitalConfig {
  int num_orbits = 4;
  int sats_per_orbit = 5;
  double altitude_km = 500.0;
  double inclination_deg = 98.0;
  double earth_radius_km = 6371.0;
  double mu_km3s2 = 398600.4418;
  int topology_epoch_slots = 10;
  double slot_seconds = 10.0;
  // Inter-orbit sampling and UAV visibility knobs.
  int max_interorbit_links = 4;
  double min_elevation_deg = 10.0;
  double processing_latency_ms = 1.0;
  int max_resample_attempts = 100;

  int num_satellites() const { return num_orbits * sats_per_orbit; }
  double semi_major_axis_km() const { return earth_radius_km + altitude_km; }
  void validate() const;  // throws ConfigInvalid
};

struct UavSite {
  NodeId id;
  Vec3 position_km;  // Earth-centered, fixed
};

struct TopologyGraph {
  long time_slot = 0;
  std::vector<NodeId> nodes;  // sorted
  std::vector<Link> links;    // sorted by (a, b)
  std::map<NodeId, Vec3> positions;

  const Link* find_link(NodeId a, NodeId b) const;
  // Active neighbors of n, sorted by id; kind filter optional.
  std::vector<NodeId> active_neighbors(NodeId n) const;
  std::vector<NodeId> active_satellite_neighbors(NodeId n) const;
  int satellite_degree(NodeId n) const;  // active satellite-satellite links only
  bool has_node(NodeId n) const;
};

struct NeighborEntry {
  NodeId id;
  LinkStatus status = LinkStatus::Active;
  double bandwidth_mbps = 0.0;                // 0 when Inactive
  std::optional<double> latency_ms;           // absent when Inactive

  bool operator==(const NeighborEntry&) const = default;
};

struct TopologyUpdate {
  NodeId node_id;
  std::vector<NeighborEntry> neighbors;  // sorted by id

  bool operator==(const TopologyUpdate&) const = default;
};

// Period of a circular orbit at the configured altitude: 2*pi*sqrt(a^3/mu).
double orbital_period_s(const OrbitalConfig& config);

// Satellite positions at a slot. Planes are spread over 180 degrees of right
// ascension; satellites are evenly phased within each plane with a small
// per-plane stagger. Pure function of (config, slot).
std::map<NodeId, Vec3> propagate_positions(const OrbitalConfig& config, long slot);

Vec3 ground_position(const OrbitalConfig& config, double lat_deg, double lon_deg);

// Elevation of sat above the horizon plane at ground point u, degrees.
double elevation_deg(const Vec3& ground, const Vec3& sat);

// Builds the epoch topology: intra-orbit rings, seeded 0..max inter-orbit
// links per satellite to its nearest neighbors in adjacent planes (degree kept
// within [2,6]), and UAV links to every satellite above the minimum elevation.
// Resamples until the satellite graph is connected; throws TopologyInfeasible
// after max_resample_attempts.
TopologyGraph build_topology(const OrbitalConfig& config,
                             const std::map<NodeId, Vec3>& positions,
                             const std::vector<UavSite>& uavs,
                             uint64_t epoch_seed,
                             long time_slot = 0);

// One update per node whose incident link view changed, sorted by node id.
// Neighbors lost since `prev` appear as Inactive entries with bandwidth 0 and
// no latency. Throws NodeSetMismatch if the node sets differ.
std::vector<TopologyUpdate> diff_topology(const TopologyGraph& prev,
                                          const TopologyGraph& next);

}  // namespace satnet::orbit
