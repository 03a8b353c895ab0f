#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satnet/config.hpp"
#include "satnet/llm.hpp"
#include "satnet/metrics.hpp"
#include "satnet/netsim.hpp"

namespace satnet::bench {

struct RunSummary {
  double final_window_mean_reward = 0.0;
  double mean_reward = 0.0;
  std::vector<double> episode_rewards;
  long total_generated = 0;
  long total_delivered = 0;
  long total_dropped = 0;
  long total_violations = 0;
  long total_migrations = 0;
  long flushed_packets = 0;
  long llm_fallbacks = 0;
  long codec_parse_failures = 0;
  long codec_messages = 0;
  long nonfinite_substitutions = 0;
  std::vector<int> spec_versions_used;
  std::string topology_trajectory_hash;
};

struct RunManifest {
  std::string config_hash;
  std::string scenario_hash;
  std::string code_version;
  std::string started_at;
  std::string ended_at;
  std::string variant;
  uint64_t seed = 0;
  int episodes = 0;
  std::string metrics_path;
  std::string checkpoint_path;
  RunSummary summary;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

void save_manifest(const RunManifest& manifest, const std::string& path);  // atomic
RunManifest load_manifest(const std::string& path);

// Executes the configured run: wires the variant-specific pipeline, writes
// the metrics log, feature schema, checkpoint and manifest under
// config.output_dir, and returns the manifest. Deterministic per
// (config, seed) for stub and greedy variants. `client_override` replaces the
// configured LLM client (used by tests).
RunManifest run_experiment(const ExperimentConfig& config,
                           llm::LlmClient* client_override = nullptr);

// Shortest-path baseline: per satellite, migrate the pending service to the
// neighbor (or Stay) minimizing the summed MinLatency path cost from every
// UAV that requested it during the previous epoch, ignoring migration cost;
// routing mode is always MinLatency.
sim::ActionSet greedy_policy(const sim::SimState& state);

struct CompareRow {
  std::string variant;
  int runs = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct CompareSummary {
  std::vector<CompareRow> rows;  // sorted by mean, descending
  std::vector<std::string> gap_lines;  // pairwise percentage gaps
  std::string ordering;                // e.g. "llm_marl > recurrent_marl > ..."
  std::string text;                    // printable table

  nlohmann::json to_json() const;
};

// Per-variant mean +/- std of final-window episode reward across seeds.
// Throws ScenarioMismatch unless all manifests share the scenario hash;
// requires >= 2 manifests.
CompareSummary compare_variants(const std::vector<RunManifest>& manifests);

// Trailing moving average with the given window; a series shorter than the
// window collapses to a single averaged point.
std::vector<double> moving_average(const std::vector<double>& xs, size_t window);

// Reads metrics logs and writes per-(variant, seed) learning curves as plain
// tab-separated text: variant, seed, episode, smoothed reward (window 10).
void export_plot_data(const std::vector<std::string>& metrics_paths,
                      const std::string& output_path, size_t window = 10);

}  // namespace satnet::bench
