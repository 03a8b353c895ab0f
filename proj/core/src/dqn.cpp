#include "satnet/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "satnet/checkpoint.hpp"
#include "satnet/errors.hpp"

namespace satnet::rl {

void ReplayBuffer::insert(Transition t) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(size_t batch) {
  const size_t n = ring_.size();
  if (n == 0) return {};
  batch = std::min(batch, n);
  // Partial Fisher-Yates over an index vector: uniform without replacement.
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (size_t i = 0; i < batch; ++i) {
    const size_t j = i + static_cast<size_t>(rng_.uniform_int(0, static_cast<int64_t>(n - i - 1)));
    std::swap(idx[i], idx[j]);
    out.push_back(&ring_[idx[i]]);
  }
  return out;
}

void AgentConfig::validate() const {
  if (gamma <= 0.0 || gamma >= 1.0) throw ConfigInvalid("gamma must be in (0,1)");
  if (eps_start < eps_end || eps_end < 0.0 || eps_start > 1.0)
    throw ConfigInvalid("epsilon schedule invalid");
  if (batch_size == 0) throw ConfigInvalid("batch_size must be > 0");
  if (action_count < 1) throw ConfigInvalid("action_count must be >= 1");
  if (lr <= 0.0) throw ConfigInvalid("lr must be > 0");
}

double epsilon_at(const AgentConfig& config, long decision_step) {
  if (decision_step >= config.eps_decay_steps) return config.eps_end;
  const double frac = static_cast<double>(decision_step) /
                      static_cast<double>(std::max<long>(1, config.eps_decay_steps));
  return config.eps_start - (config.eps_start - config.eps_end) * frac;
}

DqnAgent::DqnAgent(AgentConfig config, nn::Params params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  if (params_.at("proj.w").rows() != config_.embed_dim ||
      params_.at("proj.w").cols() != config_.input_dim)
    throw ShapeMismatch("DqnAgent: proj.w shape does not match config");
  if (params_.at("head.w").rows() != static_cast<size_t>(config_.action_count) ||
      params_.at("head.w").cols() != config_.embed_dim)
    throw ShapeMismatch("DqnAgent: head.w shape does not match config");
  target_ = params_;
}

nn::Params DqnAgent::make_q_params(const AgentConfig& config, Rng& rng) {
  nn::Params p;
  p.tensors["proj.w"] = nn::Tensor::randn(
      {config.embed_dim, config.input_dim}, rng,
      1.0 / std::sqrt(static_cast<double>(config.input_dim)));
  p.tensors["proj.b"] = nn::Tensor::zeros({config.embed_dim});
  p.tensors["head.w"] = nn::Tensor::randn(
      {static_cast<size_t>(config.action_count), config.embed_dim}, rng,
      1.0 / std::sqrt(static_cast<double>(config.embed_dim)));
  p.tensors["head.b"] = nn::Tensor::zeros({static_cast<size_t>(config.action_count)});
  return p;
}

std::vector<double> DqnAgent::q_eval(const nn::Params& p, const std::vector<double>& state) const {
  const nn::Tensor x = nn::Tensor::vec(state);
  const nn::Tensor e = nn::tanh_v(nn::linear_forward(p.at("proj.w"), x, p.at("proj.b")));
  const nn::Tensor q = nn::linear_forward(p.at("head.w"), e, p.at("head.b"));
  return q.data;
}

std::vector<double> DqnAgent::q_values(const std::vector<double>& state) const {
  return q_eval(params_, state);
}

std::vector<double> DqnAgent::q_values_target(const std::vector<double>& state) const {
  return q_eval(target_, state);
}

int DqnAgent::select_action(const std::vector<double>& q, double epsilon, Rng& rng,
                            const std::vector<bool>* mask) {
  std::vector<int> permitted;
  permitted.reserve(q.size());
  for (size_t i = 0; i < q.size(); ++i) {
    if (!mask || (i < mask->size() && (*mask)[i])) permitted.push_back(static_cast<int>(i));
  }
  if (permitted.empty()) permitted.push_back(0);

  if (rng.uniform01() < epsilon) {
    return permitted[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int64_t>(permitted.size()) - 1))];
  }
  int best = permitted[0];
  for (int i : permitted)
    if (q[static_cast<size_t>(i)] > q[static_cast<size_t>(best)]) best = i;
  return best;
}

double DqnAgent::train_step(const std::vector<Transition>& batch) {
  std::vector<const Transition*> ptrs;
  ptrs.reserve(batch.size());
  for (const Transition& t : batch) ptrs.push_back(&t);
  return train_step(ptrs);
}

double DqnAgent::train_step(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw EmptyBatch("train_step: empty batch");

  // TD targets from the target network.
  std::vector<double> targets(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    double y = t.reward;
    if (!t.done) {
      const auto qn = q_values_target(t.next_obs);
      y += config_.gamma * *std::max_element(qn.begin(), qn.end());
    }
    targets[i] = y;
  }

  nn::Tape tape;
  const auto w_proj = tape.param("proj.w", params_.at("proj.w"));
  const auto b_proj = tape.param("proj.b", params_.at("proj.b"));
  const auto w_head = tape.param("head.w", params_.at("head.w"));
  const auto b_head = tape.param("head.b", params_.at("head.b"));

  std::vector<nn::Tape::Ref> sq_errors;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    const auto x = tape.constant(nn::Tensor::vec(t.obs));
    const auto e = tape.tanh_op(tape.linear(w_proj, x, b_proj));
    const auto q = tape.linear(w_head, e, b_head);
    const auto qa = tape.pick(q, static_cast<size_t>(t.action));
    const auto diff = tape.sub(qa, tape.constant(nn::Tensor::vec({targets[i]})));
    sq_errors.push_back(tape.mul(diff, diff));
  }
  const auto loss =
      tape.scale(tape.sum_agg(sq_errors), 1.0 / static_cast<double>(batch.size()));
  const double loss_value = tape.value(loss).data[0];

  nn::GradRecord grads = tape.backward(loss);
  nn::OptimizerConfig opt_cfg;
  opt_cfg.lr = config_.lr;
  nn::optimizer_step(params_, grads, opt_cfg, opt_);

  learner_steps_ += 1;
  if (config_.target_sync_every > 0 && learner_steps_ % config_.target_sync_every == 0)
    sync_target();
  return loss_value;
}

void DqnAgent::sync_target() { target_ = params_; }

void DqnAgent::save_checkpoint(const std::string& path, const std::string& config_hash) const {
  std::map<std::string, nn::Tensor> tensors;
  for (const auto& [name, t] : params_.tensors) tensors["online." + name] = t;
  for (const auto& [name, t] : target_.tensors) tensors["target." + name] = t;
  for (const auto& [name, t] : opt_.m) tensors["adam.m." + name] = t;
  for (const auto& [name, t] : opt_.v) tensors["adam.v." + name] = t;
  tensors["meta.counters"] =
      nn::Tensor::vec({static_cast<double>(learner_steps_), static_cast<double>(opt_.t)});
  nn::CheckpointManifest m;
  m.config_hash = config_hash;
  nn::save_checkpoint(path, tensors, m);
}

void DqnAgent::load_checkpoint(const std::string& path) {
  auto tensors = nn::load_checkpoint(path);
  params_.tensors.clear();
  target_.tensors.clear();
  opt_.m.clear();
  opt_.v.clear();
  for (auto& [name, t] : tensors) {
    if (name.rfind("online.", 0) == 0) params_.tensors[name.substr(7)] = std::move(t);
    else if (name.rfind("target.", 0) == 0) target_.tensors[name.substr(7)] = std::move(t);
    else if (name.rfind("adam.m.", 0) == 0) opt_.m[name.substr(7)] = std::move(t);
    else if (name.rfind("adam.v.", 0) == 0) opt_.v[name.substr(7)] = std::move(t);
    else if (name == "meta.counters") {
      learner_steps_ = static_cast<long>(t.data.at(0));
      opt_.t = static_cast<long>(t.data.at(1));
    }
  }
}

}  // namespace satnet::rl
