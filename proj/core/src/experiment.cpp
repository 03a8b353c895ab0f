#include "satnet/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>

#include "satnet/errors.hpp"
#include "satnet/graphstate.hpp"
#include "satnet/reward.hpp"
#include "satnet/version.hpp"

namespace satnet::bench {

namespace fs = std::filesystem;

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

uint64_t fnv1a(uint64_t h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t hash_topology(uint64_t h, const orbit::TopologyGraph& g) {
  for (const orbit::Link& l : g.links) {
    const std::string names = orbit::node_name(l.a) + "|" + orbit::node_name(l.b);
    h = fnv1a(h, names.data(), names.size());
    const int kind = static_cast<int>(l.kind);
    h = fnv1a(h, &kind, sizeof(kind));
    h = fnv1a(h, &l.bandwidth_mbps, sizeof(double));
    h = fnv1a(h, &l.latency_ms, sizeof(double));
  }
  return h;
}

std::string hex64(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void accumulate(sim::SlotMetrics& into, const sim::SlotMetrics& slot) {
  into.generated += slot.generated;
  into.delivered += slot.delivered;
  into.dropped += slot.dropped;
  into.latency_sum_slots += slot.latency_sum_slots;
  into.violations += slot.violations;
  into.migrations_completed += slot.migrations_completed;
  into.in_flight = slot.in_flight;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double tail_mean(const std::vector<double>& xs, size_t window) {
  if (xs.empty()) return 0.0;
  const size_t n = std::min(window, xs.size());
  double s = 0.0;
  for (size_t i = xs.size() - n; i < xs.size(); ++i) s += xs[i];
  return s / static_cast<double>(n);
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["scenario_hash"] = scenario_hash;
  j["code_version"] = code_version;
  j["started_at"] = started_at;
  j["ended_at"] = ended_at;
  j["variant"] = variant;
  j["seed"] = seed;
  j["episodes"] = episodes;
  j["metrics_path"] = metrics_path;
  j["checkpoint_path"] = checkpoint_path;
  nlohmann::json s;
  s["final_window_mean_reward"] = summary.final_window_mean_reward;
  s["mean_reward"] = summary.mean_reward;
  s["episode_rewards"] = summary.episode_rewards;
  s["total_generated"] = summary.total_generated;
  s["total_delivered"] = summary.total_delivered;
  s["total_dropped"] = summary.total_dropped;
  s["total_violations"] = summary.total_violations;
  s["total_migrations"] = summary.total_migrations;
  s["flushed_packets"] = summary.flushed_packets;
  s["llm_fallbacks"] = summary.llm_fallbacks;
  s["codec_parse_failures"] = summary.codec_parse_failures;
  s["codec_messages"] = summary.codec_messages;
  s["nonfinite_substitutions"] = summary.nonfinite_substitutions;
  s["spec_versions_used"] = summary.spec_versions_used;
  s["topology_trajectory_hash"] = summary.topology_trajectory_hash;
  j["summary"] = s;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.config_hash = j.value("config_hash", "");
  m.scenario_hash = j.value("scenario_hash", "");
  m.code_version = j.value("code_version", "");
  m.started_at = j.value("started_at", "");
  m.ended_at = j.value("ended_at", "");
  m.variant = j.value("variant", "");
  m.seed = j.value("seed", uint64_t{0});
  m.episodes = j.value("episodes", 0);
  m.metrics_path = j.value("metrics_path", "");
  m.checkpoint_path = j.value("checkpoint_path", "");
  if (j.contains("summary")) {
    const auto& s = j["summary"];
    m.summary.final_window_mean_reward = s.value("final_window_mean_reward", 0.0);
    m.summary.mean_reward = s.value("mean_reward", 0.0);
    if (s.contains("episode_rewards"))
      m.summary.episode_rewards = s["episode_rewards"].get<std::vector<double>>();
    m.summary.total_generated = s.value("total_generated", 0L);
    m.summary.total_delivered = s.value("total_delivered", 0L);
    m.summary.total_dropped = s.value("total_dropped", 0L);
    m.summary.total_violations = s.value("total_violations", 0L);
    m.summary.total_migrations = s.value("total_migrations", 0L);
    m.summary.flushed_packets = s.value("flushed_packets", 0L);
    m.summary.llm_fallbacks = s.value("llm_fallbacks", 0L);
    m.summary.codec_parse_failures = s.value("codec_parse_failures", 0L);
    m.summary.codec_messages = s.value("codec_messages", 0L);
    m.summary.nonfinite_substitutions = s.value("nonfinite_substitutions", 0L);
    if (s.contains("spec_versions_used"))
      m.summary.spec_versions_used = s["spec_versions_used"].get<std::vector<int>>();
    m.summary.topology_trajectory_hash = s.value("topology_trajectory_hash", "");
  }
  return m;
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw OutputUnwritable("save_manifest: cannot open " + tmp);
    f << manifest.to_json().dump(2) << '\n';
    if (!f) throw OutputUnwritable("save_manifest: write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LogCorrupt("cannot open manifest: " + path);
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) throw LogCorrupt("manifest is not valid JSON: " + path);
  return RunManifest::from_json(j);
}

sim::ActionSet greedy_policy(const sim::SimState& state) {
  sim::ActionSet actions;
  for (orbit::NodeId node : state.graph.nodes) {
    if (node.kind != orbit::NodeKind::Satellite) continue;
    sim::SatelliteAction action;  // Stay, MinLatency

    const sim::Service* svc = nullptr;
    for (const sim::Service& s : state.services) {
      if (s.host == node && !s.migration &&
          (svc == nullptr || s.service_id < svc->service_id))
        svc = &s;
    }
    if (svc != nullptr) {
      std::vector<orbit::NodeId> requesters;
      const auto& row = state.prev_epoch_requests[static_cast<size_t>(svc->service_id)];
      for (size_t u = 0; u < row.size(); ++u) {
        if (row[u] > 0) requesters.push_back(orbit::uav_id(static_cast<int>(u)));
      }
      if (!requesters.empty()) {
        const auto neighbors = state.graph.active_satellite_neighbors(node);
        const double unreachable_cost = 1e6;
        auto score = [&](orbit::NodeId candidate) {
          double total = 0.0;
          for (orbit::NodeId uav : requesters) {
            auto route = sim::shortest_path(state.graph, uav, candidate,
                                            sim::RouteWeight::Latency);
            total += route ? route->cost : unreachable_cost;
          }
          return total;
        };
        double best = score(node);  // Stay keeps ties
        int best_choice = 0;
        for (size_t i = 0; i < neighbors.size(); ++i) {
          const double s = score(neighbors[i]);
          if (s < best) {
            best = s;
            best_choice = static_cast<int>(i) + 1;
          }
        }
        action.migration_choice = best_choice;
      }
    }
    actions.per_satellite[node] = action;
  }
  return actions;
}

RunManifest run_experiment(const ExperimentConfig& config, llm::LlmClient* client_override) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (!fs::is_directory(config.output_dir))
    throw OutputUnwritable("run_experiment: cannot create " + config.output_dir);

  const std::string tag = variant_name(config.variant) + "-s" + std::to_string(config.seed);
  RunManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.scenario_hash = scenario_hash(config);
  manifest.code_version = kVersion;
  manifest.started_at = iso_timestamp();
  manifest.variant = variant_name(config.variant);
  manifest.seed = config.seed;
  manifest.episodes = config.episodes;
  manifest.metrics_path = (fs::path(config.output_dir) / ("metrics-" + tag + ".jsonl")).string();

  // Published feature vocabulary for prompt rendering and external tooling.
  const nlohmann::json schema = graphstate::feature_schema_json();
  {
    const auto schema_path = fs::path(config.output_dir) / "feature_schema.json";
    std::ofstream f(schema_path);
    f << schema.dump(2) << '\n';
  }

  const bool greedy = config.variant == Variant::Greedy;
  const bool llm_variant = config.variant == Variant::LlmMarl;

  std::unique_ptr<llm::LlmClient> owned_client;
  llm::LlmClient* client = client_override;
  if (client == nullptr && llm_variant) {
    if (config.llm.mode == "live")
      owned_client = std::make_unique<llm::HttpLlmClient>(config.llm.endpoint);
    else
      owned_client = std::make_unique<llm::StubLlmClient>();
    client = owned_client.get();
  }

  RunSummary& summary = manifest.summary;

  // Representation spec: the LLM pipeline for LlmMarl, Identity otherwise.
  repspec::RepresentationSpec spec = repspec::identity_spec();
  std::unique_ptr<llm::SpecManager> specman;
  if (llm_variant) {
    const std::string prompt =
        llm::render_prompt(llm::representation_template(), schema, std::nullopt);
    spec = llm::request_representation(*client, prompt, &summary.llm_fallbacks);
    specman = std::make_unique<llm::SpecManager>(spec);
  }
  summary.spec_versions_used.push_back(spec.version);

  // Independent RNG streams per subsystem.
  const uint64_t sim_seed = derive_seed(config.seed, "scenario");
  Rng init_rng(derive_seed(config.seed, "agent.init"));
  Rng explore_rng(derive_seed(config.seed, "agent.explore"));

  sim::SimState state = make_sim(config.scenario.orbital, config.scenario.traffic,
                                 config.scenario.uav_sites(), sim_seed, 0);
  uint64_t topo_hash = hash_topology(0xcbf29ce484222325ULL, state.graph);

  graphstate::EncoderConfig enc = config.encoder;
  enc.recurrent = config.variant != Variant::AcyclicMarl;

  std::unique_ptr<rl::DqnAgent> agent;
  std::unique_ptr<rl::ReplayBuffer> replay;
  graphstate::MessageState msgs;
  if (!greedy) {
    rl::AgentConfig acfg = config.agent;
    acfg.input_dim = static_cast<size_t>(enc.state_dim());
    acfg.action_count = sim::kActionCount;
    nn::Params params = rl::DqnAgent::make_q_params(acfg, init_rng);
    nn::Params encoder_params = graphstate::make_encoder_params(enc, init_rng);
    params.tensors.insert(encoder_params.tensors.begin(), encoder_params.tensors.end());
    agent = std::make_unique<rl::DqnAgent>(acfg, std::move(params));
    replay = std::make_unique<rl::ReplayBuffer>(config.train.replay_capacity,
                                                derive_seed(config.seed, "replay"));
  }

  MetricsWriter writer(manifest.metrics_path);

  const int epoch_slots = config.scenario.orbital.topology_epoch_slots;
  long decision_epochs = 0;
  std::vector<double> episode_rewards;
  std::vector<long> episode_violations;
  std::optional<int> eval_due_episode;
  int feedback_iterations = 0;

  struct Pending {
    std::vector<double> obs;
    int action = 0;
  };
  std::map<orbit::NodeId, Pending> pending;
  std::map<orbit::NodeId, orbit::TopologyUpdate> latest_summaries;

  for (int ep = 0; ep < config.episodes; ++ep) {
    if (ep > 0)
      summary.flushed_packets +=
          sim::reset_episode(state, derive_seed(sim_seed, "services", static_cast<uint64_t>(ep)));
    if (!greedy) msgs.reset(state.graph.nodes, static_cast<size_t>(enc.hidden_dim));
    pending.clear();

    sim::SlotMetrics window{};
    sim::SlotMetrics episode_totals{};
    std::vector<double> epoch_rewards;
    std::vector<double> epoch_penalties;
    sim::ActionSet current_actions;
    graphstate::SlotObservations obs;

    for (int s = 0; s < config.train.slots_per_episode; ++s) {
      const bool decision = state.clock % epoch_slots == 0;
      if (decision) {
        sim::ensure_epoch_topology(state);
        topo_hash = hash_topology(topo_hash, state.graph);
        if (llm_variant) {
          // Exercise the semantic codec on every published update; decode
          // failures fall back to the raw structured update.
          latest_summaries.clear();
          for (const auto& u : state.last_updates) {
            summary.codec_messages += 1;
            const std::string text = llm::encode_topology_update(u);
            auto decoded = llm::decode_topology_summary(text);
            if (decoded && *decoded == u) {
              latest_summaries[u.node_id] = *decoded;
            } else {
              summary.codec_parse_failures += 1;
              latest_summaries[u.node_id] = u;
            }
          }
        }
      }

      if (!greedy) {
        obs = graphstate::observe_slot(state, spec, agent->params(), enc, msgs);
        summary.nonfinite_substitutions += obs.nonfinite_substitutions;
      }

      if (decision) {
        // Close the previous epoch's window into a team reward + transitions.
        if (s > 0) {
          const reward::RewardTerms terms = reward::terms_from_window(window, config.reward);
          const double extrinsic = reward::compute_reward(terms, config.reward);
          epoch_rewards.push_back(extrinsic);
          epoch_penalties.push_back(terms.penalty);
          if (!greedy) {
            for (auto& [node, pend] : pending) {
              double r = extrinsic;
              if (llm_variant) {
                r = reward::combine(extrinsic,
                                    reward::intrinsic_reward(spec, obs.bundles.at(node),
                                                             &summary.nonfinite_substitutions),
                                    config.reward);
              }
              replay->insert(rl::Transition{pend.obs, pend.action, r,
                                            obs.state_vectors.at(node).data, false});
            }
          }
          window = sim::SlotMetrics{};
        }

        if (!greedy && replay->size() >= config.train.warmup_transitions) {
          for (int k = 0; k < config.train.train_steps_per_epoch; ++k)
            agent->train_step(replay->sample(config.agent.batch_size));
        }

        // Choose this epoch's actions.
        current_actions = sim::ActionSet{};
        if (greedy) {
          current_actions = greedy_policy(state);
        } else {
          const double eps = rl::epsilon_at(config.agent, decision_epochs);
          pending.clear();
          for (orbit::NodeId node : state.graph.nodes) {
            if (node.kind != orbit::NodeKind::Satellite) continue;
            const std::vector<double>& z = obs.state_vectors.at(node).data;
            const auto q = agent->q_values(z);
            int a;
            if (llm_variant) {
              const auto nbrs = state.graph.active_satellite_neighbors(node);
              auto it = latest_summaries.find(node);
              const auto mask = llm::guide_actions(
                  q, nbrs, it == latest_summaries.end() ? nullptr : &it->second);
              a = rl::DqnAgent::select_action(q, eps, explore_rng, &mask);
            } else {
              a = rl::DqnAgent::select_action(q, eps, explore_rng);
            }
            pending[node] = Pending{z, a};
            current_actions.per_satellite[node] = sim::decode_action(a);
          }
        }
        ++decision_epochs;
      }

      const sim::SlotMetrics slot = sim::step(state, current_actions);
      accumulate(window, slot);
      accumulate(episode_totals, slot);

      MetricsRecord rec;
      rec.episode = ep;
      rec.slot = s;
      const reward::RewardTerms slot_terms = reward::terms_from_window(slot, config.reward);
      rec.reward = reward::compute_reward(slot_terms, config.reward);
      rec.throughput = slot_terms.throughput;
      rec.latency = slot_terms.latency;
      rec.penalty = slot_terms.penalty;
      rec.violations = slot.violations;
      rec.drops = slot.dropped;
      rec.migrations = slot.migrations_completed;
      rec.spec_version = spec.version;
      rec.variant = manifest.variant;
      rec.seed = config.seed;
      writer.write(rec);
    }

    // Close the final window of the episode; terminal transitions bootstrap
    // nothing, so the stale next observation is never used.
    {
      const reward::RewardTerms terms = reward::terms_from_window(window, config.reward);
      const double extrinsic = reward::compute_reward(terms, config.reward);
      epoch_rewards.push_back(extrinsic);
      epoch_penalties.push_back(terms.penalty);
      if (!greedy) {
        for (auto& [node, pend] : pending) {
          double r = extrinsic;
          if (llm_variant) {
            r = reward::combine(extrinsic,
                                reward::intrinsic_reward(spec, obs.bundles.at(node),
                                                         &summary.nonfinite_substitutions),
                                config.reward);
          }
          replay->insert(
              rl::Transition{pend.obs, pend.action, r, obs.state_vectors.at(node).data, true});
        }
        pending.clear();
      }
    }

    const double episode_reward = mean_of(epoch_rewards);
    episode_rewards.push_back(episode_reward);
    episode_violations.push_back(episode_totals.violations);
    summary.total_generated += episode_totals.generated;
    summary.total_delivered += episode_totals.delivered;
    summary.total_dropped += episode_totals.dropped;
    summary.total_violations += episode_totals.violations;
    summary.total_migrations += episode_totals.migrations_completed;

    MetricsRecord rec;
    rec.episode = ep;
    rec.slot = -1;
    rec.episode_aggregate = true;
    rec.reward = episode_reward;
    rec.throughput = episode_totals.generated == 0
                         ? 1.0
                         : static_cast<double>(episode_totals.delivered) /
                               static_cast<double>(episode_totals.generated);
    rec.latency = episode_totals.delivered == 0
                      ? 0.0
                      : std::clamp(episode_totals.latency_sum_slots /
                                       static_cast<double>(episode_totals.delivered) /
                                       config.reward.latency_norm_slots,
                                   0.0, 1.0);
    rec.penalty = mean_of(epoch_penalties);
    rec.violations = episode_totals.violations;
    rec.drops = episode_totals.dropped;
    rec.migrations = episode_totals.migrations_completed;
    rec.spec_version = spec.version;
    rec.variant = manifest.variant;
    rec.seed = config.seed;
    writer.write(rec);

    // Feedback cadence: propose a refined spec, then judge it after the
    // evaluation window and keep the best performer.
    if (llm_variant && config.train.feedback_every_episodes > 0 && ep + 1 < config.episodes &&
        (ep + 1) % config.train.feedback_every_episodes == 0) {
      const size_t w = static_cast<size_t>(config.train.evaluation_window_episodes);
      // Record the incumbent's window before proposing.
      specman->evaluate(tail_mean(episode_rewards, w));
      double vio_rate = 0.0;
      {
        const size_t n = std::min(w, episode_violations.size());
        long v = 0;
        for (size_t i = episode_violations.size() - n; i < episode_violations.size(); ++i)
          v += episode_violations[i];
        vio_rate = n == 0 ? 0.0
                          : static_cast<double>(v) /
                                (static_cast<double>(n) * config.train.slots_per_episode);
      }
      ++feedback_iterations;
      const llm::FeedbackReport report = llm::make_feedback_report(
          feedback_iterations, episode_rewards, w, vio_rate, spec.version);
      spec = specman->feedback_iteration(*client, schema, report);
      if (std::find(summary.spec_versions_used.begin(), summary.spec_versions_used.end(),
                    spec.version) == summary.spec_versions_used.end())
        summary.spec_versions_used.push_back(spec.version);
      eval_due_episode = ep + 1 + config.train.evaluation_window_episodes;
    }
    if (eval_due_episode && ep + 1 == *eval_due_episode) {
      specman->evaluate(
          tail_mean(episode_rewards, static_cast<size_t>(config.train.evaluation_window_episodes)));
      spec = specman->current();  // may revert to the best spec so far
      eval_due_episode.reset();
    }
  }

  writer.flush();

  summary.episode_rewards = episode_rewards;
  summary.mean_reward = mean_of(episode_rewards);
  summary.final_window_mean_reward =
      tail_mean(episode_rewards, static_cast<size_t>(config.train.final_window_episodes));
  summary.topology_trajectory_hash = hex64(topo_hash);

  if (!greedy) {
    manifest.checkpoint_path =
        (fs::path(config.output_dir) / ("checkpoint-" + tag + ".bin")).string();
    agent->save_checkpoint(manifest.checkpoint_path, manifest.config_hash);
  }

  manifest.ended_at = iso_timestamp();
  save_manifest(manifest, (fs::path(config.output_dir) / ("manifest-" + tag + ".json")).string());
  return manifest;
}

CompareSummary compare_variants(const std::vector<RunManifest>& manifests) {
  if (manifests.size() < 2)
    throw ScenarioMismatch("compare_variants: need at least 2 manifests");
  const std::string& scenario = manifests.front().scenario_hash;
  for (const auto& m : manifests) {
    if (m.scenario_hash != scenario)
      throw ScenarioMismatch("compare_variants: scenario hashes differ (" + m.variant + ")");
  }

  std::map<std::string, std::vector<double>> by_variant;
  for (const auto& m : manifests)
    by_variant[m.variant].push_back(m.summary.final_window_mean_reward);

  CompareSummary out;
  for (const auto& [variant, vals] : by_variant) {
    CompareRow row;
    row.variant = variant;
    row.runs = static_cast<int>(vals.size());
    row.mean = mean_of(vals);
    double var = 0.0;
    for (double v : vals) var += (v - row.mean) * (v - row.mean);
    row.stddev = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1)) : 0.0;
    out.rows.push_back(row);
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const CompareRow& a, const CompareRow& b) { return a.mean > b.mean; });

  for (size_t i = 0; i < out.rows.size(); ++i) {
    for (size_t j = i + 1; j < out.rows.size(); ++j) {
      const double base = out.rows[j].mean;
      const double gap = base == 0.0 ? 0.0 : (out.rows[i].mean - base) / std::fabs(base) * 100.0;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s vs %s: %+.2f%%", out.rows[i].variant.c_str(),
                    out.rows[j].variant.c_str(), gap);
      out.gap_lines.push_back(buf);
    }
  }
  if (out.rows.size() == 1) out.gap_lines.push_back(out.rows[0].variant + " vs itself: +0.00%");

  for (size_t i = 0; i < out.rows.size(); ++i) {
    if (i > 0) out.ordering += " > ";
    out.ordering += out.rows[i].variant;
  }

  std::string text = "variant            runs  mean final-window reward   stddev\n";
  for (const auto& r : out.rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-18s %4d  %24.6f %8.6f\n", r.variant.c_str(), r.runs,
                  r.mean, r.stddev);
    text += buf;
  }
  text += "ordering: " + out.ordering + "\n";
  for (const auto& g : out.gap_lines) text += g + "\n";
  out.text = text;
  return out;
}

nlohmann::json CompareSummary::to_json() const {
  nlohmann::json j;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"variant", r.variant},
                         {"runs", r.runs},
                         {"mean_final_window_reward", r.mean},
                         {"stddev", r.stddev}});
  }
  j["rows"] = rows_json;
  j["gaps"] = gap_lines;
  j["ordering"] = ordering;
  return j;
}

std::vector<double> moving_average(const std::vector<double>& xs, size_t window) {
  if (window == 0) window = 1;
  if (xs.empty()) return {};
  if (xs.size() < window) {
    double s = 0.0;
    for (double x : xs) s += x;
    return {s / static_cast<double>(xs.size())};
  }
  std::vector<double> out(xs.size());
  double acc = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i >= window) acc -= xs[i - window];
    const size_t n = std::min(i + 1, window);
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

void export_plot_data(const std::vector<std::string>& metrics_paths,
                      const std::string& output_path, size_t window) {
  struct Key {
    std::string variant;
    uint64_t seed;
    bool operator<(const Key& o) const {
      return std::tie(variant, seed) < std::tie(o.variant, o.seed);
    }
  };
  std::map<Key, std::vector<std::pair<long, double>>> series;
  for (const auto& path : metrics_paths) {
    for (const MetricsRecord& r : read_metrics_file(path)) {
      if (!r.episode_aggregate) continue;
      series[Key{r.variant, r.seed}].emplace_back(r.episode, r.reward);
    }
  }

  std::ofstream out(output_path, std::ios::trunc);
  if (!out) throw OutputUnwritable("export_plot_data: cannot open " + output_path);
  out << "variant\tseed\tepisode\treward_smoothed\n";
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> rewards;
    rewards.reserve(pts.size());
    for (const auto& [episode, r] : pts) rewards.push_back(r);
    const std::vector<double> smooth = moving_average(rewards, window);
    if (smooth.size() == 1 && pts.size() > 1) {
      out << key.variant << '\t' << key.seed << '\t' << pts.back().first << '\t' << smooth[0]
          << '\n';
      continue;
    }
    for (size_t i = 0; i < smooth.size(); ++i) {
      out << key.variant << '\t' << key.seed << '\t' << pts[i].first << '\t' << smooth[i] << '\n';
    }
  }
}

}  // namespace satnet::bench
