#include "satnet/llm.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "satnet/errors.hpp"

namespace satnet::llm {

namespace {

// Shortest representation that parses back to the same double.
std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fmt_stat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr const char* kFeedbackHeader = "## Feedback";

}  // namespace

PromptTemplate representation_template() {
  PromptTemplate t;
  t.task_description =
      "The reinforcement-learning environment is a satellite-UAV network. The objective is to "
      "optimize service migration and request routing between UAVs and satellites, balancing "
      "high network performance against low user cost.";
  t.role_instruction =
      "From the per-node state details above, produce a task-relevant state representation for "
      "the connected network graph: a list of scalar feature expressions evaluated at every "
      "node, plus one intrinsic-reward expression that rewards locally useful behavior.";
  return t;
}

PromptTemplate feedback_template() {
  PromptTemplate t = representation_template();
  t.role_instruction =
      "Refine your previous state representation using the training feedback below. Keep "
      "expressions that earned reward; adjust or replace the rest. Produce the full revised "
      "representation, not a delta.";
  return t;
}

PromptTemplate load_template_file(const std::string& path, size_t token_budget) {
  std::ifstream f(path);
  if (!f) throw OutputUnwritable("load_template_file: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string body = ss.str();

  auto section = [&](const std::string& key) -> std::string {
    const std::string open = "{{" + key + "}}";
    const size_t a = body.find(open);
    if (a == std::string::npos) return "";
    const size_t start = a + open.size();
    const size_t b = body.find("{{end}}", start);
    return body.substr(start, b == std::string::npos ? std::string::npos : b - start);
  };

  PromptTemplate t;
  t.token_budget = token_budget;
  t.task_description = section("task_description");
  t.role_instruction = section("role_instruction");
  if (t.task_description.empty() || t.role_instruction.empty())
    throw ConfigInvalid("load_template_file: missing template sections in " + path);
  return t;
}

FeedbackReport make_feedback_report(int iteration, const std::vector<double>& episode_rewards,
                                    size_t window, double violation_rate, int spec_version) {
  FeedbackReport r;
  r.iteration = iteration;
  r.violation_rate = violation_rate;
  r.spec_in_use = spec_version;
  const size_t n = std::min(window, episode_rewards.size());
  if (n == 0) return r;
  const size_t start = episode_rewards.size() - n;
  double sum = 0.0;
  for (size_t i = start; i < episode_rewards.size(); ++i) sum += episode_rewards[i];
  r.mean_episode_reward = sum / static_cast<double>(n);

  // Least-squares slope over the window, x = 0..n-1.
  if (n >= 2) {
    const double xbar = (static_cast<double>(n) - 1.0) / 2.0;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double dx = static_cast<double>(i) - xbar;
      num += dx * (episode_rewards[start + i] - r.mean_episode_reward);
      den += dx * dx;
    }
    r.reward_slope = den > 0.0 ? num / den : 0.0;
  }
  return r;
}

std::string render_prompt(const PromptTemplate& tmpl, const nlohmann::json& schema,
                          const std::optional<FeedbackReport>& feedback) {
  std::string out;
  out += "## Task Description\n" + tmpl.task_description + "\n\n";
  out += "## State Details\n";
  out += "Each node reports the following features every time slot:\n";
  for (const auto& e : schema) {
    out += "- " + e.at("name").get<std::string>() + ": " +
           e.at("description").get<std::string>() + ", range [" +
           fmt_stat(e.at("lo").get<double>()) + ", " + fmt_stat(e.at("hi").get<double>()) +
           "]\n";
  }
  out += "\n## Role Instruction\n" + tmpl.role_instruction + "\n";
  if (feedback) {
    out += std::string("\n") + kFeedbackHeader + "\n";
    out += "Iteration " + std::to_string(feedback->iteration) + ": mean episode reward " +
           fmt_stat(feedback->mean_episode_reward) + " over the evaluation window; reward slope " +
           fmt_stat(feedback->reward_slope) + " per episode; violation rate " +
           fmt_stat(feedback->violation_rate) + "; representation version in use: " +
           std::to_string(feedback->spec_in_use) + ".\n";
  }
  out +=
      "\n## Output Format\n"
      "Respond with a single JSON document: {\"version\": <int>, \"features\": [\"<expr>\", "
      "...], \"intrinsic\": \"<expr>\"}. Expressions may reference the feature names listed in "
      "the state details, numeric constants, the operators + - * /, two-argument min/max, and "
      "the neighbor aggregates mean(name), min(name), max(name) (also over neighbor_bandwidth "
      "and neighbor_latency). At most 32 features; keep expressions shallow.\n";

  if (out.size() / 4 > tmpl.token_budget)
    throw TokenBudgetExceeded("render_prompt: estimated tokens " +
                              std::to_string(out.size() / 4) + " exceed budget " +
                              std::to_string(tmpl.token_budget));
  return out;
}

const char* StubLlmClient::initial_spec_json() {
  return R"json({
    "version": 1,
    "features": [
      "queue_occupancy",
      "neighbor_bandwidth_mean",
      "neighbor_bandwidth_min",
      "neighbor_latency_mean",
      "degree",
      "hosted_services",
      "in_migration",
      "throughput_local",
      "drops_local",
      "mean(queue_occupancy)",
      "max(queue_occupancy)",
      "min(neighbor_bandwidth)",
      "queue_occupancy * neighbor_bandwidth_min",
      "hosted_services * mean(queue_occupancy)"
    ],
    "intrinsic": "throughput_local - drops_local - 0.5 * queue_occupancy"
  })json";
}

const char* StubLlmClient::refined_spec_json() {
  return R"json({
    "version": 2,
    "features": [
      "queue_occupancy",
      "neighbor_bandwidth_mean",
      "neighbor_bandwidth_min",
      "neighbor_latency_mean",
      "degree",
      "hosted_services",
      "in_migration",
      "throughput_local",
      "drops_local",
      "mean(queue_occupancy)",
      "max(queue_occupancy)",
      "min(neighbor_bandwidth)",
      "queue_occupancy * neighbor_bandwidth_min",
      "hosted_services * mean(queue_occupancy)",
      "mean(throughput_local)",
      "mean(drops_local)",
      "hosted_services * neighbor_bandwidth_min",
      "max(drops_local)"
    ],
    "intrinsic": "throughput_local - drops_local - 0.25 * queue_occupancy - 0.25 * max(queue_occupancy)"
  })json";
}

std::optional<std::string> StubLlmClient::complete(const std::string& prompt) {
  if (prompt.find(kFeedbackHeader) != std::string::npos) return refined_spec_json();
  return initial_spec_json();
}

void LlmEndpointConfig::validate() const {
  if (timeout_ms <= 0) throw ConfigInvalid("llm timeout_ms must be > 0");
  if (max_retries < 0) throw ConfigInvalid("llm max_retries must be >= 0");
  if (base_url.empty()) throw ConfigInvalid("llm base_url must be set");
}

HttpLlmClient::HttpLlmClient(LlmEndpointConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::optional<std::string> HttpLlmClient::complete(const std::string& prompt) {
  httplib::Client cli(config_.base_url);
  cli.set_connection_timeout(0, config_.timeout_ms * 1000);
  cli.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = config_.temperature;

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = cli.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

repspec::RepresentationSpec request_representation(LlmClient& client, const std::string& prompt,
                                                   long* fallback_counter) {
  const int attempts = 1 + client.max_retries();
  for (int i = 0; i < attempts; ++i) {
    auto text = client.complete(prompt);
    if (!text) continue;  // unreachable endpoint; retry then fall back
    std::string err;
    auto spec = repspec::try_parse_spec(*text, client.provenance(), &err);
    if (spec) return *spec;
  }
  if (fallback_counter) ++*fallback_counter;
  return repspec::identity_spec();
}

std::string encode_topology_update(const orbit::TopologyUpdate& update) {
  std::vector<std::string> entries;
  for (const auto& n : update.neighbors) {
    if (n.status == orbit::LinkStatus::Active) {
      entries.push_back(orbit::node_name(n.id) + "(" + fmt_double(n.bandwidth_mbps) + "Mbps/" +
                        fmt_double(n.latency_ms.value_or(0.0)) + "ms)");
    }
  }
  for (const auto& n : update.neighbors) {
    if (n.status == orbit::LinkStatus::Inactive)
      entries.push_back(orbit::node_name(n.id) + " disconnected");
  }
  std::string out = orbit::node_name(update.node_id) + ": Links ";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += ", ";
    out += entries[i];
  }
  out += ".";
  return out;
}

namespace {

std::optional<double> parse_double_exact(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

std::optional<orbit::TopologyUpdate> decode_topology_summary(const std::string& text) {
  const std::string sep = ": Links ";
  const size_t at = text.find(sep);
  if (at == std::string::npos) return std::nullopt;
  if (text.empty() || text.back() != '.') return std::nullopt;

  auto node = orbit::parse_node_name(text.substr(0, at));
  if (!node) return std::nullopt;

  orbit::TopologyUpdate update;
  update.node_id = *node;

  std::string body = text.substr(at + sep.size());
  body.pop_back();  // trailing period
  if (body.empty()) {
    return update;  // degenerate "A: Links ." form
  }

  size_t pos = 0;
  while (pos <= body.size()) {
    size_t next = body.find(", ", pos);
    const std::string entry =
        body.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (entry.empty()) return std::nullopt;

    orbit::NeighborEntry ne;
    const std::string disc = " disconnected";
    if (entry.size() > disc.size() &&
        entry.compare(entry.size() - disc.size(), disc.size(), disc) == 0) {
      auto id = orbit::parse_node_name(entry.substr(0, entry.size() - disc.size()));
      if (!id) return std::nullopt;
      ne.id = *id;
      ne.status = orbit::LinkStatus::Inactive;
      ne.bandwidth_mbps = 0.0;
    } else {
      const size_t open = entry.find('(');
      const size_t slash = entry.find("Mbps/");
      const size_t close = entry.rfind("ms)");
      if (open == std::string::npos || slash == std::string::npos ||
          close == std::string::npos || !(open < slash && slash < close) ||
          close + 3 != entry.size())
        return std::nullopt;
      auto id = orbit::parse_node_name(entry.substr(0, open));
      auto bw = parse_double_exact(entry.substr(open + 1, slash - open - 1));
      auto lat = parse_double_exact(entry.substr(slash + 5, close - slash - 5));
      if (!id || !bw || !lat) return std::nullopt;
      ne.id = *id;
      ne.status = orbit::LinkStatus::Active;
      ne.bandwidth_mbps = *bw;
      ne.latency_ms = *lat;
    }
    update.neighbors.push_back(ne);
    if (next == std::string::npos) break;
    pos = next + 2;
  }

  std::sort(update.neighbors.begin(), update.neighbors.end(),
            [](const orbit::NeighborEntry& a, const orbit::NeighborEntry& b) {
              return a.id < b.id;
            });
  return update;
}

nlohmann::json update_to_json(const orbit::TopologyUpdate& update) {
  nlohmann::json doc;
  doc["nodeid"] = orbit::node_name(update.node_id);
  nlohmann::json nbrs = nlohmann::json::array();
  for (const auto& n : update.neighbors) {
    nlohmann::json e;
    e["id"] = orbit::node_name(n.id);
    e["status"] = n.status == orbit::LinkStatus::Active ? "active" : "inactive";
    e["bandwidth"] = fmt_double(n.bandwidth_mbps) + "Mbps";
    if (n.latency_ms) e["latency"] = fmt_double(*n.latency_ms) + "ms";
    else e["latency"] = "N/A";
    nbrs.push_back(e);
  }
  doc["neighbors"] = nbrs;
  return doc;
}

std::vector<bool> guide_actions(const std::vector<double>& q,
                                const std::vector<orbit::NodeId>& active_neighbors,
                                const orbit::TopologyUpdate* latest_summary) {
  std::vector<bool> mask(q.size(), true);
  const int modes = 3;
  for (size_t a = 0; a < q.size(); ++a) {
    const int choice = static_cast<int>(a) / modes;
    if (choice == 0) continue;  // Stay is always permitted
    if (choice > static_cast<int>(active_neighbors.size())) {
      mask[a] = false;  // no such neighbor: a disconnected target
      continue;
    }
    if (latest_summary) {
      const orbit::NodeId target = active_neighbors[static_cast<size_t>(choice - 1)];
      for (const auto& n : latest_summary->neighbors) {
        if (n.id == target && n.status == orbit::LinkStatus::Inactive) {
          mask[a] = false;
          break;
        }
      }
    }
  }
  return mask;
}

SpecManager::SpecManager(repspec::RepresentationSpec initial) : current_(std::move(initial)) {
  best_ = current_;
}

const repspec::RepresentationSpec& SpecManager::feedback_iteration(
    LlmClient& client, const nlohmann::json& schema, const FeedbackReport& report) {
  const std::string prompt = render_prompt(feedback_template(), schema, report);
  long fallbacks = 0;
  repspec::RepresentationSpec candidate = request_representation(client, prompt, &fallbacks);
  if (fallbacks > 0) {
    // Endpoint failure: stay with the best spec so far.
    current_ = best_;
    evaluating_candidate_ = false;
    return current_;
  }
  current_ = std::move(candidate);
  evaluating_candidate_ = true;
  return current_;
}

void SpecManager::evaluate(double mean_episode_reward) {
  if (!has_best_) {
    // First recorded window belongs to the spec currently in use.
    best_ = current_;
    best_reward_ = mean_episode_reward;
    has_best_ = true;
    evaluating_candidate_ = false;
    return;
  }
  if (evaluating_candidate_) {
    if (mean_episode_reward >= best_reward_) {
      best_ = current_;
      best_reward_ = mean_episode_reward;
    } else {
      current_ = best_;  // candidate underperformed; revert
    }
    evaluating_candidate_ = false;
  } else {
    best_reward_ = std::max(best_reward_, mean_episode_reward);
    if (mean_episode_reward >= best_reward_) best_ = current_;
  }
}

}  // namespace satnet::llm
