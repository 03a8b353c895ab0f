#include "satnet/config.hpp"

#include <fstream>

#include "satnet/errors.hpp"

namespace satnet::bench {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::LlmMarl: return "llm_marl";
    case Variant::RecurrentMarl: return "recurrent_marl";
    case Variant::AcyclicMarl: return "acyclic_marl";
    case Variant::Greedy: return "greedy";
  }
  return "llm_marl";
}

std::optional<Variant> parse_variant(const std::string& name) {
  if (name == "llm_marl") return Variant::LlmMarl;
  if (name == "recurrent_marl") return Variant::RecurrentMarl;
  if (name == "acyclic_marl") return Variant::AcyclicMarl;
  if (name == "greedy") return Variant::Greedy;
  return std::nullopt;
}

std::vector<orbit::UavSite> ScenarioConfig::uav_sites() const {
  std::vector<orbit::UavSite> sites;
  for (size_t i = 0; i < uavs.size(); ++i) {
    orbit::UavSite s;
    s.id = orbit::uav_id(static_cast<int>(i));
    s.position_km = orbit::ground_position(orbital, uavs[i].lat_deg, uavs[i].lon_deg);
    sites.push_back(s);
  }
  return sites;
}

ScenarioConfig default_scenario() {
  ScenarioConfig s;
  // High-latitude sites sit under the dense part of near-polar coverage, so
  // each UAV usually sees one to three satellites with regular handovers.
  s.uavs = {{72.0, 0.0}, {78.0, 90.0}, {82.0, 180.0}, {86.0, 270.0}};
  return s;
}

void ExperimentConfig::validate() const {
  scenario.orbital.validate();
  scenario.traffic.validate();
  agent.validate();
  reward.validate();
  if (scenario.uavs.empty()) throw ConfigInvalid("scenario.uavs must not be empty");
  if (episodes < 0) throw ConfigInvalid("episodes must be >= 0");
  if (train.slots_per_episode < 1) throw ConfigInvalid("slots_per_episode must be >= 1");
  if (train.slots_per_episode % scenario.orbital.topology_epoch_slots != 0)
    throw ConfigInvalid("slots_per_episode must be a multiple of topology_epoch_slots");
  if (train.final_window_episodes < 1) throw ConfigInvalid("final_window_episodes must be >= 1");
  if (llm.mode != "stub" && llm.mode != "live")
    throw ConfigInvalid("llm.mode must be 'stub' or 'live'");
  if (llm.mode == "live") llm.endpoint.validate();
  if (agent.action_count != sim::kActionCount)
    throw ConfigInvalid("agent.action_count must be 21 (7 migration choices x 3 routing modes)");
  if (static_cast<int>(agent.input_dim) != encoder.state_dim())
    throw ConfigInvalid("agent.input_dim must equal the encoder state dimension");
  if (agent.embed_dim != static_cast<size_t>(encoder.embed_dim))
    throw ConfigInvalid("agent.embed_dim must equal encoder.embed_dim");
}

namespace {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  c.scenario = default_scenario();
  get_if(doc, "config_version", c.config_version);

  if (doc.contains("scenario")) {
    const auto& s = doc["scenario"];
    if (s.contains("orbital")) {
      const auto& o = s["orbital"];
      auto& oc = c.scenario.orbital;
      get_if(o, "num_orbits", oc.num_orbits);
      get_if(o, "sats_per_orbit", oc.sats_per_orbit);
      get_if(o, "altitude_km", oc.altitude_km);
      get_if(o, "inclination_deg", oc.inclination_deg);
      get_if(o, "earth_radius_km", oc.earth_radius_km);
      get_if(o, "mu_km3s2", oc.mu_km3s2);
      get_if(o, "topology_epoch_slots", oc.topology_epoch_slots);
      get_if(o, "slot_seconds", oc.slot_seconds);
      get_if(o, "max_interorbit_links", oc.max_interorbit_links);
      get_if(o, "min_elevation_deg", oc.min_elevation_deg);
      get_if(o, "processing_latency_ms", oc.processing_latency_ms);
      get_if(o, "max_resample_attempts", oc.max_resample_attempts);
    }
    if (s.contains("traffic")) {
      const auto& t = s["traffic"];
      auto& tc = c.scenario.traffic;
      get_if(t, "p_req", tc.p_req);
      get_if(t, "packet_min_kb", tc.packet_min_kb);
      get_if(t, "packet_max_kb", tc.packet_max_kb);
      get_if(t, "deadline_slots", tc.deadline_slots);
      get_if(t, "num_services", tc.num_services);
      get_if(t, "service_state_kb", tc.service_state_kb);
    }
    if (s.contains("uavs")) {
      c.scenario.uavs.clear();
      for (const auto& u : s["uavs"]) {
        UavPlacement p;
        get_if(u, "lat_deg", p.lat_deg);
        get_if(u, "lon_deg", p.lon_deg);
        c.scenario.uavs.push_back(p);
      }
    }
  }

  if (doc.contains("agent")) {
    const auto& a = doc["agent"];
    get_if(a, "gamma", c.agent.gamma);
    get_if(a, "eps_start", c.agent.eps_start);
    get_if(a, "eps_end", c.agent.eps_end);
    get_if(a, "eps_decay_steps", c.agent.eps_decay_steps);
    get_if(a, "batch_size", c.agent.batch_size);
    get_if(a, "target_sync_every", c.agent.target_sync_every);
    get_if(a, "lr", c.agent.lr);
  }

  if (doc.contains("reward")) {
    const auto& r = doc["reward"];
    get_if(r, "alpha1", c.reward.alpha1);
    get_if(r, "alpha2", c.reward.alpha2);
    get_if(r, "beta_penalty", c.reward.beta_penalty);
    get_if(r, "intrinsic_weight", c.reward.intrinsic_weight);
    if (r.contains("latency_norm_slots")) {
      c.reward.latency_norm_slots = r["latency_norm_slots"].get<double>();
    } else {
      c.reward.latency_norm_slots = static_cast<double>(c.scenario.traffic.deadline_slots);
    }
  } else {
    c.reward.latency_norm_slots = static_cast<double>(c.scenario.traffic.deadline_slots);
  }

  if (doc.contains("train")) {
    const auto& t = doc["train"];
    get_if(t, "slots_per_episode", c.train.slots_per_episode);
    get_if(t, "train_steps_per_epoch", c.train.train_steps_per_epoch);
    get_if(t, "replay_capacity", c.train.replay_capacity);
    get_if(t, "warmup_transitions", c.train.warmup_transitions);
    get_if(t, "feedback_every_episodes", c.train.feedback_every_episodes);
    get_if(t, "evaluation_window_episodes", c.train.evaluation_window_episodes);
    get_if(t, "final_window_episodes", c.train.final_window_episodes);
  }

  if (doc.contains("encoder")) {
    const auto& e = doc["encoder"];
    get_if(e, "message_dim", c.encoder.message_dim);
    get_if(e, "message_rounds", c.encoder.message_rounds);
    get_if(e, "hidden_dim", c.encoder.hidden_dim);
    get_if(e, "embed_dim", c.encoder.embed_dim);
  }

  if (doc.contains("variant")) {
    auto v = parse_variant(doc["variant"].get<std::string>());
    if (!v) throw ConfigInvalid("unknown variant: " + doc["variant"].get<std::string>());
    c.variant = *v;
  }
  get_if(doc, "episodes", c.episodes);
  get_if(doc, "seed", c.seed);
  get_if(doc, "output_dir", c.output_dir);

  if (doc.contains("llm")) {
    const auto& l = doc["llm"];
    get_if(l, "mode", c.llm.mode);
    get_if(l, "base_url", c.llm.endpoint.base_url);
    get_if(l, "model", c.llm.endpoint.model);
    get_if(l, "timeout_ms", c.llm.endpoint.timeout_ms);
    get_if(l, "max_retries", c.llm.endpoint.max_retries);
    get_if(l, "temperature", c.llm.endpoint.temperature);
    get_if(l, "api_key_env", c.llm.endpoint.api_key_env);
  }

  // Derived fields: composite action space and encoder-matched input width.
  c.agent.action_count = sim::kActionCount;
  c.agent.input_dim = static_cast<size_t>(c.encoder.state_dim());
  c.agent.embed_dim = static_cast<size_t>(c.encoder.embed_dim);
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc;
  doc["config_version"] = c.config_version;
  doc["scenario"]["orbital"] = {
      {"num_orbits", c.scenario.orbital.num_orbits},
      {"sats_per_orbit", c.scenario.orbital.sats_per_orbit},
      {"altitude_km", c.scenario.orbital.altitude_km},
      {"inclination_deg", c.scenario.orbital.inclination_deg},
      {"earth_radius_km", c.scenario.orbital.earth_radius_km},
      {"mu_km3s2", c.scenario.orbital.mu_km3s2},
      {"topology_epoch_slots", c.scenario.orbital.topology_epoch_slots},
      {"slot_seconds", c.scenario.orbital.slot_seconds},
      {"max_interorbit_links", c.scenario.orbital.max_interorbit_links},
      {"min_elevation_deg", c.scenario.orbital.min_elevation_deg},
      {"processing_latency_ms", c.scenario.orbital.processing_latency_ms},
      {"max_resample_attempts", c.scenario.orbital.max_resample_attempts}};
  doc["scenario"]["traffic"] = {{"p_req", c.scenario.traffic.p_req},
                                {"packet_min_kb", c.scenario.traffic.packet_min_kb},
                                {"packet_max_kb", c.scenario.traffic.packet_max_kb},
                                {"deadline_slots", c.scenario.traffic.deadline_slots},
                                {"num_services", c.scenario.traffic.num_services},
                                {"service_state_kb", c.scenario.traffic.service_state_kb}};
  nlohmann::json uavs = nlohmann::json::array();
  for (const auto& u : c.scenario.uavs)
    uavs.push_back({{"lat_deg", u.lat_deg}, {"lon_deg", u.lon_deg}});
  doc["scenario"]["uavs"] = uavs;
  doc["agent"] = {{"gamma", c.agent.gamma},
                  {"eps_start", c.agent.eps_start},
                  {"eps_end", c.agent.eps_end},
                  {"eps_decay_steps", c.agent.eps_decay_steps},
                  {"batch_size", c.agent.batch_size},
                  {"target_sync_every", c.agent.target_sync_every},
                  {"lr", c.agent.lr}};
  doc["reward"] = {{"alpha1", c.reward.alpha1},
                   {"alpha2", c.reward.alpha2},
                   {"beta_penalty", c.reward.beta_penalty},
                   {"intrinsic_weight", c.reward.intrinsic_weight},
                   {"latency_norm_slots", c.reward.latency_norm_slots}};
  doc["train"] = {{"slots_per_episode", c.train.slots_per_episode},
                  {"train_steps_per_epoch", c.train.train_steps_per_epoch},
                  {"replay_capacity", c.train.replay_capacity},
                  {"warmup_transitions", c.train.warmup_transitions},
                  {"feedback_every_episodes", c.train.feedback_every_episodes},
                  {"evaluation_window_episodes", c.train.evaluation_window_episodes},
                  {"final_window_episodes", c.train.final_window_episodes}};
  doc["encoder"] = {{"message_dim", c.encoder.message_dim},
                    {"message_rounds", c.encoder.message_rounds},
                    {"hidden_dim", c.encoder.hidden_dim},
                    {"embed_dim", c.encoder.embed_dim}};
  doc["variant"] = variant_name(c.variant);
  doc["episodes"] = c.episodes;
  doc["seed"] = c.seed;
  doc["llm"] = {{"mode", c.llm.mode},
                {"base_url", c.llm.endpoint.base_url},
                {"model", c.llm.endpoint.model},
                {"timeout_ms", c.llm.endpoint.timeout_ms},
                {"max_retries", c.llm.endpoint.max_retries},
                {"temperature", c.llm.endpoint.temperature},
                {"api_key_env", c.llm.endpoint.api_key_env}};
  doc["output_dir"] = c.output_dir;
  return doc;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigInvalid("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(f, nullptr, false);
  if (doc.is_discarded()) throw ConfigInvalid("config file is not valid JSON: " + path);
  return config_from_json(doc);
}

std::string canonical_hash(const nlohmann::json& doc) {
  const std::string s = doc.dump();  // nlohmann::json orders keys
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  return canonical_hash(config_to_json(config));
}

std::string scenario_hash(const ExperimentConfig& config) {
  nlohmann::json full = config_to_json(config);
  nlohmann::json sub;
  sub["scenario"] = full["scenario"];
  sub["agent"] = full["agent"];
  sub["reward"] = full["reward"];
  sub["train"] = full["train"];
  sub["encoder"] = full["encoder"];
  sub["episodes"] = full["episodes"];
  return canonical_hash(sub);
}

}  // namespace satnet::bench
