#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "satnet/dqn.hpp"
#include "satnet/graphstate.hpp"
#include "satnet/llm.hpp"
#include "satnet/netsim.hpp"
#include "satnet/orbit.hpp"
#include "satnet/reward.hpp"

namespace satnet::bench {

enum class Variant { LlmMarl, RecurrentMarl, AcyclicMarl, Greedy };

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(const std::string& name);

struct UavPlacement {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

struct ScenarioConfig {
  orbit::OrbitalConfig orbital;
  sim::TrafficConfig traffic;
  std::vector<UavPlacement> uavs;  // defaults to 4 high-latitude sites

  std::vector<orbit::UavSite> uav_sites() const;
};

ScenarioConfig default_scenario();

struct TrainConfig {
  int slots_per_episode = 200;
  int train_steps_per_epoch = 2;
  size_t replay_capacity = 50000;
  size_t warmup_transitions = 500;
  int feedback_every_episodes = 50;
  int evaluation_window_episodes = 20;
  int final_window_episodes = 50;
};

struct LlmSettings {
  std::string mode = "stub";  // "stub" | "live"
  llm::LlmEndpointConfig endpoint;
};

struct ExperimentConfig {
  int config_version = 1;
  ScenarioConfig scenario;
  rl::AgentConfig agent;
  reward::RewardConfig reward;
  TrainConfig train;
  graphstate::EncoderConfig encoder;
  Variant variant = Variant::LlmMarl;
  int episodes = 300;
  uint64_t seed = 1;
  LlmSettings llm;
  std::string output_dir = "runs/out";

  void validate() const;  // throws ConfigInvalid
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

// FNV-1a over the canonical (key-sorted) JSON dump.
std::string canonical_hash(const nlohmann::json& doc);
std::string config_hash(const ExperimentConfig& config);
// Hash over everything that must match for a fair cross-variant comparison
// (scenario, agent, reward, train, encoder, episodes). Variant, seed, llm
// settings and output paths are excluded.
std::string scenario_hash(const ExperimentConfig& config);

}  // namespace satnet::bench
