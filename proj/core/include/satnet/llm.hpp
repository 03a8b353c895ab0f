#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "satnet/orbit.hpp"
#include "satnet/repspec.hpp"

namespace satnet::llm {

struct PromptTemplate {
  std::string task_description;
  std::string role_instruction;
  size_t token_budget = 4096;  // ~4 chars per token estimate
};

PromptTemplate representation_template();
PromptTemplate feedback_template();

// Optionally load the template body from a plain-text file with
// {{task_description}} / {{role_instruction}} placeholders.
PromptTemplate load_template_file(const std::string& path, size_t token_budget = 4096);

// Training statistics fed back to the model between iterations; computed from
// the metrics log, reproducible.
struct FeedbackReport {
  int iteration = 0;
  double mean_episode_reward = 0.0;
  double reward_slope = 0.0;  // least-squares slope over the window
  double violation_rate = 0.0;
  int spec_in_use = 0;
};

FeedbackReport make_feedback_report(int iteration, const std::vector<double>& episode_rewards,
                                    size_t window, double violation_rate, int spec_version);

// Deterministic prompt: task description, one state-details line per schema
// feature, role instruction, optional feedback section, output-format
// contract. Throws TokenBudgetExceeded.
std::string render_prompt(const PromptTemplate& tmpl, const nlohmann::json& schema,
                          const std::optional<FeedbackReport>& feedback);

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::optional<std::string> complete(const std::string& prompt) = 0;
  virtual repspec::SpecProvenance provenance() const = 0;
  virtual int max_retries() const { return 0; }
  virtual std::string name() const = 0;
};

// Offline stand-in: ships two documented specs weighted toward bandwidth and
// queue features — the initial one for plain representation prompts and a
// refinement whenever the prompt carries a feedback section.
class StubLlmClient : public LlmClient {
 public:
  std::optional<std::string> complete(const std::string& prompt) override;
  repspec::SpecProvenance provenance() const override { return repspec::SpecProvenance::Stub; }
  std::string name() const override { return "stub"; }

  static const char* initial_spec_json();
  static const char* refined_spec_json();
};

struct LlmEndpointConfig {
  std::string base_url = "http://127.0.0.1:8080";
  std::string model = "generic-chat-model";
  int timeout_ms = 10000;
  int max_retries = 2;
  double temperature = 0.0;
  std::string api_key_env = "SATNET_LLM_API_KEY";  // credentials only

  void validate() const;
};

// Chat-completion-style endpoint client. One HTTP POST per complete() call;
// retry policy lives in request_representation.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmEndpointConfig config);
  std::optional<std::string> complete(const std::string& prompt) override;
  repspec::SpecProvenance provenance() const override { return repspec::SpecProvenance::Live; }
  int max_retries() const override { return config_.max_retries; }
  std::string name() const override { return "live:" + config_.model; }

 private:
  LlmEndpointConfig config_;
};

// Requests a representation spec and validates it. Parse/validation failures
// and unreachable endpoints retry up to the client's budget, then fall back
// to the Identity spec — a bridge failure never aborts training.
repspec::RepresentationSpec request_representation(LlmClient& client, const std::string& prompt,
                                                   long* fallback_counter = nullptr);

// Semantic topology codec. Grammar:
//   "<node>: Links <id>(<bw>Mbps/<lat>ms), <id>(...), <id> disconnected."
// Active neighbors first (sorted), then disconnected ones; a node with no
// neighbors encodes as "<node>: Links .". Numbers use shortest round-trip
// formatting, so decode(encode(u)) == u for every valid update.
std::string encode_topology_update(const orbit::TopologyUpdate& update);

// Strict grammar parse; nullopt means ParseFailed and the caller falls back
// to transmitting the raw structured update.
std::optional<orbit::TopologyUpdate> decode_topology_summary(const std::string& text);

// Structured (JSON) form of an update, used to measure codec compression.
nlohmann::json update_to_json(const orbit::TopologyUpdate& update);

// Action mask for the composite action space: migration choices whose target
// the latest decoded summary reports disconnected — or that address no active
// neighbor at all — are masked out. Stay is always permitted, so the mask
// never empties.
std::vector<bool> guide_actions(const std::vector<double>& q,
                                const std::vector<orbit::NodeId>& active_neighbors,
                                const orbit::TopologyUpdate* latest_summary);

// Keep-the-best spec selection across feedback iterations.
class SpecManager {
 public:
  explicit SpecManager(repspec::RepresentationSpec initial);

  const repspec::RepresentationSpec& current() const { return current_; }

  // One feedback exchange: renders the feedback prompt, requests a refined
  // spec, installs it for evaluation. Falls back to the best spec so far on
  // any endpoint failure. Returns the spec now in use.
  const repspec::RepresentationSpec& feedback_iteration(LlmClient& client,
                                                        const nlohmann::json& schema,
                                                        const FeedbackReport& report);

  // Called after the evaluation window: records the candidate's performance
  // and reverts to the best-performing spec when the candidate underperforms.
  void evaluate(double mean_episode_reward);

  double best_recorded_reward() const { return best_reward_; }
  bool has_recorded() const { return has_best_; }

 private:
  repspec::RepresentationSpec current_;
  repspec::RepresentationSpec best_;
  double best_reward_ = 0.0;
  bool has_best_ = false;
  bool evaluating_candidate_ = false;
};

}  // namespace satnet::llm
