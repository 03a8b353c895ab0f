#include "satnet/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "satnet/errors.hpp"

namespace satnet::orbit {

namespace {
constexpr double kSpeedOfLightKmPerMs = 299.792458;
constexpr double kDegToRad = M_PI / 180.0;
}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double distance_km(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

NodeId sat_id(int index) { return NodeId{NodeKind::Satellite, index}; }
NodeId uav_id(int index) { return NodeId{NodeKind::Uav, index}; }

std::string node_name(NodeId id) {
  if (id.kind == NodeKind::Uav) return "u" + std::to_string(id.index);
  // Spreadsheet letters: 0 -> A, 25 -> Z, 26 -> AA.
  std::string out;
  int n = id.index;
  do {
    out.insert(out.begin(), static_cast<char>('A' + n % 26));
    n = n / 26 - 1;
  } while (n >= 0);
  return out;
}

std::optional<NodeId> parse_node_name(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name[0] == 'u') {
    if (name.size() < 2) return std::nullopt;
    int idx = 0;
    for (size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') return std::nullopt;
      idx = idx * 10 + (name[i] - '0');
    }
    return uav_id(idx);
  }
  long n = 0;
  for (char c : name) {
    if (c < 'A' || c > 'Z') return std::nullopt;
    n = n * 26 + (c - 'A' + 1);
  }
  return sat_id(static_cast<int>(n - 1));
}

void OrbitalConfig::validate() const {
  if (num_orbits < 1) throw ConfigInvalid("num_orbits must be >= 1");
  if (sats_per_orbit < 2) throw ConfigInvalid("sats_per_orbit must be >= 2");
  if (altitude_km <= 0.0) throw ConfigInvalid("altitude_km must be > 0");
  if (topology_epoch_slots < 1) throw ConfigInvalid("topology_epoch_slots must be >= 1");
  if (slot_seconds <= 0.0) throw ConfigInvalid("slot_seconds must be > 0");
  if (max_interorbit_links < 0 || max_interorbit_links > 4)
    throw ConfigInvalid("max_interorbit_links must be in [0,4]");
}

const Link* TopologyGraph::find_link(NodeId a, NodeId b) const {
  if (b < a) std::swap(a, b);
  auto it = std::lower_bound(links.begin(), links.end(), std::make_pair(a, b),
                             [](const Link& l, const std::pair<NodeId, NodeId>& key) {
                               return std::tie(l.a, l.b) < std::tie(key.first, key.second);
                             });
  if (it != links.end() && it->a == a && it->b == b) return &*it;
  return nullptr;
}

std::vector<NodeId> TopologyGraph::active_neighbors(NodeId n) const {
  std::vector<NodeId> out;
  for (const Link& l : links) {
    if (l.status != LinkStatus::Active || !l.touches(n)) continue;
    out.push_back(l.other(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> TopologyGraph::active_satellite_neighbors(NodeId n) const {
  std::vector<NodeId> out;
  for (const Link& l : links) {
    if (l.status != LinkStatus::Active || !l.touches(n)) continue;
    NodeId o = l.other(n);
    if (o.kind == NodeKind::Satellite) out.push_back(o);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int TopologyGraph::satellite_degree(NodeId n) const {
  int d = 0;
  for (const Link& l : links) {
    if (l.status != LinkStatus::Active || !l.touches(n)) continue;
    if (l.a.kind == NodeKind::Satellite && l.b.kind == NodeKind::Satellite) ++d;
  }
  return d;
}

bool TopologyGraph::has_node(NodeId n) const {
  return std::binary_search(nodes.begin(), nodes.end(), n);
}

double orbital_period_s(const OrbitalConfig& config) {
  const double a = config.semi_major_axis_km();
  return 2.0 * M_PI * std::sqrt(a * a * a / config.mu_km3s2);
}

std::map<NodeId, Vec3> propagate_positions(const OrbitalConfig& config, long slot) {
  const double a = config.semi_major_axis_km();
  const double inc = config.inclination_deg * kDegToRad;
  const double omega = 2.0 * M_PI / orbital_period_s(config);
  const double t = static_cast<double>(slot) * config.slot_seconds;
  const int total = config.num_satellites();

  std::map<NodeId, Vec3> out;
  for (int i = 0; i < total; ++i) {
    const int plane = i / config.sats_per_orbit;
    const int pos = i % config.sats_per_orbit;
    const double raan = M_PI * static_cast<double>(plane) / config.num_orbits;  // 180 deg spread
    const double phase0 = 2.0 * M_PI * static_cast<double>(pos) / config.sats_per_orbit +
                          2.0 * M_PI * static_cast<double>(plane) /
                              (config.num_orbits * config.sats_per_orbit);
    const double u = phase0 + omega * t;

    // In-plane circle, inclined about x, then rotated by RAAN about z.
    const double xp = a * std::cos(u);
    const double yp = a * std::sin(u);
    const Vec3 p{xp, yp * std::cos(inc), yp * std::sin(inc)};
    const double cr = std::cos(raan), sr = std::sin(raan);
    out[sat_id(i)] = Vec3{cr * p.x - sr * p.y, sr * p.x + cr * p.y, p.z};
  }
  return out;
}

Vec3 ground_position(const OrbitalConfig& config, double lat_deg, double lon_deg) {
  const double la = lat_deg * kDegToRad;
  const double lo = lon_deg * kDegToRad;
  const double r = config.earth_radius_km;
  return {r * std::cos(la) * std::cos(lo), r * std::cos(la) * std::sin(lo), r * std::sin(la)};
}

double elevation_deg(const Vec3& ground, const Vec3& sat) {
  const Vec3 d = sat - ground;
  const double s = ground.dot(d) / (ground.norm() * d.norm());
  return std::asin(std::clamp(s, -1.0, 1.0)) / kDegToRad;
}

namespace {

double link_latency_ms(const OrbitalConfig& config, const Vec3& a, const Vec3& b) {
  return distance_km(a, b) / kSpeedOfLightKmPerMs + config.processing_latency_ms;
}

struct LinkKey {
  NodeId a, b;
  bool operator<(const LinkKey& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
};

LinkKey make_key(NodeId x, NodeId y) {
  if (y < x) std::swap(x, y);
  return {x, y};
}

// One candidate topology draw. Degree constraints may fail; caller resamples.
bool try_build(const OrbitalConfig& config, const std::map<NodeId, Vec3>& positions,
               Rng& rng, std::vector<Link>& sat_links) {
  const int n_orbit = config.sats_per_orbit;
  const int n_sats = config.num_satellites();
  std::map<LinkKey, LinkKind> chosen;

  // Intra-orbit ring. Two satellites per orbit degenerate to a single link.
  for (int p = 0; p < config.num_orbits; ++p) {
    for (int k = 0; k < n_orbit; ++k) {
      const int i = p * n_orbit + k;
      const int j = p * n_orbit + (k + 1) % n_orbit;
      if (i == j) continue;
      chosen[make_key(sat_id(i), sat_id(j))] = LinkKind::IntraOrbit;
    }
  }

  std::vector<int> degree(n_sats, 0);
  for (const auto& [key, kind] : chosen) {
    ++degree[key.a.index];
    ++degree[key.b.index];
  }

  // Per-satellite inter-orbit proposals: k nearest in adjacent planes.
  std::set<LinkKey> proposals;
  for (int i = 0; i < n_sats; ++i) {
    const int plane = i / n_orbit;
    const int want = static_cast<int>(rng.uniform_int(0, config.max_interorbit_links));
    if (want == 0) continue;
    std::vector<std::pair<double, int>> candidates;
    for (int dp : {-1, 1}) {
      const int q = plane + dp;
      if (q < 0 || q >= config.num_orbits) continue;
      for (int k = 0; k < n_orbit; ++k) {
        const int j = q * n_orbit + k;
        candidates.emplace_back(
            distance_km(positions.at(sat_id(i)), positions.at(sat_id(j))), j);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (int c = 0; c < want && c < static_cast<int>(candidates.size()); ++c) {
      proposals.insert(make_key(sat_id(i), sat_id(candidates[c].second)));
    }
  }

  // Accept proposals in sorted order while both endpoints stay within degree 6.
  for (const LinkKey& key : proposals) {
    if (degree[key.a.index] >= 6 || degree[key.b.index] >= 6) continue;
    if (chosen.count(key)) continue;
    chosen[key] = LinkKind::InterOrbit;
    ++degree[key.a.index];
    ++degree[key.b.index];
  }

  for (int i = 0; i < n_sats; ++i) {
    if (degree[i] < 2 || degree[i] > 6) return false;
  }

  // Connectivity over the satellite graph.
  std::vector<std::vector<int>> adj(n_sats);
  for (const auto& [key, kind] : chosen) {
    adj[key.a.index].push_back(key.b.index);
    adj[key.b.index].push_back(key.a.index);
  }
  std::vector<bool> seen(n_sats, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v]) {
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  if (reached != n_sats) return false;

  sat_links.clear();
  for (const auto& [key, kind] : chosen) {
    Link l;
    l.a = key.a;
    l.b = key.b;
    l.kind = kind;
    l.status = LinkStatus::Active;
    sat_links.push_back(l);
  }
  return true;
}

}  // namespace

TopologyGraph build_topology(const OrbitalConfig& config,
                             const std::map<NodeId, Vec3>& positions,
                             const std::vector<UavSite>& uavs,
                             uint64_t epoch_seed,
                             long time_slot) {
  config.validate();
  const int n_sats = config.num_satellites();
  for (int i = 0; i < n_sats; ++i) {
    if (!positions.count(sat_id(i)))
      throw UnknownNode("build_topology: missing position for satellite " + std::to_string(i));
  }

  std::vector<Link> sat_links;
  bool ok = false;
  for (int attempt = 0; attempt < config.max_resample_attempts; ++attempt) {
    Rng rng(derive_seed(epoch_seed, "attempt", static_cast<uint64_t>(attempt)));
    if (try_build(config, positions, rng, sat_links)) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw TopologyInfeasible("build_topology: satellite degree/connectivity bounds "
                             "unsatisfiable after " +
                             std::to_string(config.max_resample_attempts) + " attempts");
  }

  TopologyGraph g;
  g.time_slot = time_slot;
  g.positions = positions;
  for (int i = 0; i < n_sats; ++i) g.nodes.push_back(sat_id(i));
  for (const UavSite& u : uavs) {
    g.nodes.push_back(u.id);
    g.positions[u.id] = u.position_km;
  }
  std::sort(g.nodes.begin(), g.nodes.end());

  g.links = std::move(sat_links);
  for (const UavSite& u : uavs) {
    for (int i = 0; i < n_sats; ++i) {
      const Vec3& sp = positions.at(sat_id(i));
      if (elevation_deg(u.position_km, sp) < config.min_elevation_deg) continue;
      Link l;
      l.a = sat_id(i);
      l.b = u.id;
      if (l.b < l.a) std::swap(l.a, l.b);
      l.kind = LinkKind::UavSat;
      l.status = LinkStatus::Active;
      g.links.push_back(l);
    }
  }
  std::sort(g.links.begin(), g.links.end(), [](const Link& x, const Link& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  // Bandwidth draws in sorted link order so the trajectory is reproducible.
  Rng bw_rng(derive_seed(epoch_seed, "bandwidth"));
  for (Link& l : g.links) {
    switch (l.kind) {
      case LinkKind::IntraOrbit: l.bandwidth_mbps = bw_rng.uniform(20.0, 80.0); break;
      case LinkKind::InterOrbit: l.bandwidth_mbps = bw_rng.uniform(1.0, 10.0); break;
      case LinkKind::UavSat: l.bandwidth_mbps = bw_rng.uniform(0.1, 0.8); break;
    }
    l.latency_ms = link_latency_ms(config, g.positions.at(l.a), g.positions.at(l.b));
  }
  return g;
}

namespace {

// Node id -> (neighbor -> entry) for active links.
std::map<NodeId, std::vector<NeighborEntry>> neighbor_views(const TopologyGraph& g) {
  std::map<NodeId, std::vector<NeighborEntry>> views;
  for (NodeId n : g.nodes) views[n];
  for (const Link& l : g.links) {
    if (l.status != LinkStatus::Active) continue;
    views[l.a].push_back(NeighborEntry{l.b, LinkStatus::Active, l.bandwidth_mbps, l.latency_ms});
    views[l.b].push_back(NeighborEntry{l.a, LinkStatus::Active, l.bandwidth_mbps, l.latency_ms});
  }
  for (auto& [n, v] : views) {
    std::sort(v.begin(), v.end(),
              [](const NeighborEntry& x, const NeighborEntry& y) { return x.id < y.id; });
  }
  return views;
}

}  // namespace

std::vector<TopologyUpdate> diff_topology(const TopologyGraph& prev, const TopologyGraph& next) {
  if (prev.nodes != next.nodes) throw NodeSetMismatch("diff_topology: node sets differ");

  auto prev_views = neighbor_views(prev);
  auto next_views = neighbor_views(next);

  std::vector<TopologyUpdate> updates;
  for (NodeId n : next.nodes) {
    const auto& before = prev_views[n];
    const auto& now = next_views[n];

    TopologyUpdate u;
    u.node_id = n;
    u.neighbors = now;
    // Neighbors that vanished are reported as Inactive.
    for (const NeighborEntry& e : before) {
      bool still = std::any_of(now.begin(), now.end(),
                               [&](const NeighborEntry& c) { return c.id == e.id; });
      if (!still) u.neighbors.push_back(NeighborEntry{e.id, LinkStatus::Inactive, 0.0, std::nullopt});
    }
    std::sort(u.neighbors.begin(), u.neighbors.end(),
              [](const NeighborEntry& x, const NeighborEntry& y) { return x.id < y.id; });

    if (before != now) updates.push_back(std::move(u));
  }
  return updates;  // nodes iterated in sorted order already
}

}  // namespace satnet::orbit
