#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "satnet/netsim.hpp"
#include "satnet/neuralcore.hpp"
#include "satnet/repspec.hpp"

namespace satnet::graphstate {

using orbit::NodeId;
using orbit::TopologyGraph;

inline constexpr int kRawFeatureCount = repspec::kRawFeatureCount;
inline constexpr double kDegreeScale = 6.0;
inline constexpr double kBandwidthScaleMbps = 80.0;
inline constexpr double kLatencyScaleMs = 50.0;

struct NodeObservation {
  NodeId node_id;
  std::array<double, kRawFeatureCount> raw_features{};
};

// Recurrent per-node hidden vectors, persisted across slots within an episode.
struct MessageState {
  std::map<NodeId, nn::Tensor> hidden;

  void reset(const std::vector<NodeId>& nodes, size_t hidden_dim);
};

struct ObservationBundle {
  NodeObservation local;
  nn::Tensor aggregated;              // message-passed summary
  const nn::Tensor* hidden_ref = nullptr;
  repspec::FeatureContext context;    // named features for the DSL
};

// Vocabulary schema consumed by prompt rendering: name/description/bounds per
// feature, in raw-vector order.
nlohmann::json feature_schema_json();

// Deterministic raw features for one node, all clamped to [0,1]. Throws
// UnknownNode.
NodeObservation local_observation(const sim::SimState& state, NodeId node);

std::map<NodeId, NodeObservation> observe_all(const sim::SimState& state);

repspec::FeatureContext feature_context(const sim::SimState& state, NodeId node,
                                        const std::map<NodeId, NodeObservation>& all);

// Optional learned transform applied after each aggregation round:
// x' = tanh(W x + b), tensors at "<prefix>.w"/"<prefix>.b", one prefix per
// round. Null transforms mean identity (used by locality tests).
struct MessageTransforms {
  const nn::Params* params = nullptr;
  std::vector<std::string> layer_prefixes;
  bool activation = true;  // false: plain linear layers
};

// Recurrent update applied once per slot after the final round to each node:
// h' = gru(h, [x0 | xR]). `recurrent=false` swaps in the history-free
// pass-through cell (same tensors).
struct RecurrentUpdate {
  const nn::Params* params = nullptr;
  std::string prefix = "gru";
  bool recurrent = true;
};

// Cyclic message passing: per round every node aggregates the self-inclusive
// sum of its active neighborhood and applies the round's transform. Returns
// the per-node aggregate after the final round; updates msgs in place when a
// recurrent update is supplied. Throws DimensionMismatch on shape disagreement.
std::map<NodeId, nn::Tensor> message_pass(const TopologyGraph& graph,
                                          const std::map<NodeId, nn::Tensor>& features,
                                          MessageState& msgs, int rounds,
                                          const MessageTransforms* transforms = nullptr,
                                          const RecurrentUpdate* recurrent = nullptr);

// Evaluates the spec's feature expressions over the bundle; non-finite results
// are replaced by 0 and counted. Output dimension equals the spec length.
nn::Tensor apply_representation(const repspec::RepresentationSpec& spec,
                                const ObservationBundle& bundle,
                                long* nonfinite_counter = nullptr);

// Observation encoder wiring used by the experiment pipeline. The DSL state
// vector is zero-padded to dsl_dim so spec revisions never change parameter
// shapes; the Q input is [dsl | aggregate | hidden].
struct EncoderConfig {
  int dsl_dim = repspec::kMaxSpecFeatures;  // 32
  int message_dim = 32;
  int message_rounds = 2;
  int hidden_dim = 64;
  int embed_dim = 256;
  bool recurrent = true;

  int state_dim() const { return dsl_dim + message_dim + hidden_dim; }
};

// Encoder tensors: msg<i>.{w,b} per round, gru.* for the recurrent cell.
nn::Params make_encoder_params(const EncoderConfig& config, Rng& rng);

struct SlotObservations {
  std::map<NodeId, ObservationBundle> bundles;
  std::map<NodeId, nn::Tensor> state_vectors;  // per-node Q input
  long nonfinite_substitutions = 0;
};

// Full per-slot pipeline: raw observation, DSL application, message passing,
// recurrent hidden update.
SlotObservations observe_slot(const sim::SimState& state,
                              const repspec::RepresentationSpec& spec,
                              const nn::Params& encoder, const EncoderConfig& config,
                              MessageState& msgs);

}  // namespace satnet::graphstate
