#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satnet/neuralcore.hpp"
#include "satnet/rng.hpp"

namespace satnet::rl {

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

// Fixed-capacity ring; sampling is uniform without replacement per batch.
class ReplayBuffer {
 public:
  ReplayBuffer(size_t capacity, uint64_t seed) : capacity_(capacity), rng_(seed) {}

  void insert(Transition t);
  std::vector<const Transition*> sample(size_t batch);
  size_t size() const { return ring_.size(); }
  size_t capacity() const { return capacity_; }

 private:
  size_t capacity_;
  std::vector<Transition> ring_;
  size_t next_ = 0;
  Rng rng_;
};

struct AgentConfig {
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_end = 0.05;
  long eps_decay_steps = 4000;  // decision epochs
  size_t batch_size = 64;
  long target_sync_every = 500;  // learner steps
  int action_count = 21;         // 7 migration choices x 3 routing modes
  size_t input_dim = 128;
  size_t embed_dim = 256;        // Q head input dimension
  double lr = 1e-3;

  void validate() const;
};

double epsilon_at(const AgentConfig& config, long decision_step);

// Shared-parameter DQN. The parameter set carries the observation encoder
// tensors alongside the Q network; only proj.* and head.* receive gradient
// updates — the encoder acts as a fixed seeded feature map (see README).
class DqnAgent {
 public:
  DqnAgent(AgentConfig config, nn::Params params);

  // proj.{w,b} embed the state vector, head.{w,b} map to action values.
  static nn::Params make_q_params(const AgentConfig& config, Rng& rng);

  std::vector<double> q_values(const std::vector<double>& state) const;
  std::vector<double> q_values_target(const std::vector<double>& state) const;

  // Epsilon-greedy with lowest-index argmax tiebreak. A mask restricts both
  // the greedy argmax and the exploration draw to permitted actions.
  static int select_action(const std::vector<double>& q, double epsilon, Rng& rng,
                           const std::vector<bool>* mask = nullptr);

  // One TD step: y = r + gamma * max_a' Q_target(s') * (1 - done); MSE loss on
  // Q(s,a); one optimizer step. Returns the loss. Throws EmptyBatch.
  double train_step(const std::vector<const Transition*>& batch);
  double train_step(const std::vector<Transition>& batch);

  void sync_target();  // deep copy; later updates leave the target untouched

  const nn::Params& params() const { return params_; }
  nn::Params& mutable_params() { return params_; }
  const nn::Params& target_params() const { return target_; }
  long learner_steps() const { return learner_steps_; }
  const AgentConfig& config() const { return config_; }

  // Checkpoints hold both parameter sets, optimizer moments, and counters;
  // save/load round-trips bit-exactly.
  void save_checkpoint(const std::string& path, const std::string& config_hash) const;
  void load_checkpoint(const std::string& path);

 private:
  std::vector<double> q_eval(const nn::Params& p, const std::vector<double>& state) const;

  AgentConfig config_;
  nn::Params params_;
  nn::Params target_;
  nn::OptimizerState opt_;
  long learner_steps_ = 0;
};

}  // namespace satnet::rl
