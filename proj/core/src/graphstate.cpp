#include "satnet/graphstate.hpp"

#include <algorithm>
#include <cmath>

#include "satnet/errors.hpp"

namespace satnet::graphstate {

void MessageState::reset(const std::vector<NodeId>& nodes, size_t hidden_dim) {
  hidden.clear();
  for (NodeId n : nodes) hidden[n] = nn::Tensor::zeros({hidden_dim});
}

nlohmann::json feature_schema_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : repspec::feature_vocabulary()) {
    nlohmann::json e;
    e["name"] = d.name;
    e["description"] = d.description;
    e["lo"] = d.lo;
    e["hi"] = d.hi;
    arr.push_back(e);
  }
  return arr;
}

NodeObservation local_observation(const sim::SimState& state, NodeId node) {
  if (!state.graph.has_node(node))
    throw UnknownNode("local_observation: " + orbit::node_name(node));

  NodeObservation obs;
  obs.node_id = node;
  auto& f = obs.raw_features;

  double bw_sum = 0.0, bw_min = 0.0, lat_sum = 0.0;
  int degree = 0;
  bool first = true;
  for (const orbit::Link& l : state.graph.links) {
    if (l.status != orbit::LinkStatus::Active || !l.touches(node)) continue;
    ++degree;
    bw_sum += l.bandwidth_mbps;
    lat_sum += l.latency_ms;
    bw_min = first ? l.bandwidth_mbps : std::min(bw_min, l.bandwidth_mbps);
    first = false;
  }

  int hosted = 0;
  bool migrating = false;
  for (const sim::Service& s : state.services) {
    if (s.host == node) {
      ++hosted;
      if (s.migration) migrating = true;
    }
  }

  const double generated = static_cast<double>(std::max<long>(1, state.window_generated_total()));

  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  f[0] = clamp01(degree / kDegreeScale);
  f[1] = clamp01(state.queue_occupancy(node));
  f[2] = clamp01(static_cast<double>(hosted) / std::max(1, state.traffic.num_services));
  f[3] = degree == 0 ? 0.0 : clamp01(bw_sum / degree / kBandwidthScaleMbps);
  f[4] = degree == 0 ? 0.0 : clamp01(bw_min / kBandwidthScaleMbps);
  f[5] = degree == 0 ? 0.0 : clamp01(lat_sum / degree / kLatencyScaleMs);
  f[6] = migrating ? 1.0 : 0.0;
  f[7] = clamp01(static_cast<double>(state.window_delivered_at_node(node)) / generated);
  f[8] = clamp01(static_cast<double>(state.window_dropped_at_node(node)) / generated);
  return obs;
}

std::map<NodeId, NodeObservation> observe_all(const sim::SimState& state) {
  std::map<NodeId, NodeObservation> out;
  for (NodeId n : state.graph.nodes) out[n] = local_observation(state, n);
  return out;
}

repspec::FeatureContext feature_context(const sim::SimState& state, NodeId node,
                                        const std::map<NodeId, NodeObservation>& all) {
  repspec::FeatureContext ctx;
  ctx.local = all.at(node).raw_features;
  for (NodeId nb : state.graph.active_neighbors(node)) {
    ctx.neighbors.push_back(all.at(nb).raw_features);
  }
  for (const orbit::Link& l : state.graph.links) {
    if (l.status != orbit::LinkStatus::Active || !l.touches(node)) continue;
    ctx.neighbor_bandwidth.push_back(
        std::clamp(l.bandwidth_mbps / kBandwidthScaleMbps, 0.0, 1.0));
    ctx.neighbor_latency.push_back(std::clamp(l.latency_ms / kLatencyScaleMs, 0.0, 1.0));
  }
  return ctx;
}

std::map<NodeId, nn::Tensor> message_pass(const TopologyGraph& graph,
                                          const std::map<NodeId, nn::Tensor>& features,
                                          MessageState& msgs, int rounds,
                                          const MessageTransforms* transforms,
                                          const RecurrentUpdate* recurrent) {
  if (rounds < 1) throw DimensionMismatch("message_pass: rounds must be >= 1");
  if (transforms && static_cast<int>(transforms->layer_prefixes.size()) != rounds)
    throw DimensionMismatch("message_pass: one transform per round required");

  size_t dim = 0;
  for (const auto& [n, t] : features) {
    if (!t.is_vector()) throw DimensionMismatch("message_pass: features must be vectors");
    if (dim == 0) dim = t.size();
    if (t.size() != dim) throw DimensionMismatch("message_pass: inconsistent feature dims");
  }
  for (NodeId n : graph.nodes) {
    if (!features.count(n))
      throw DimensionMismatch("message_pass: missing features for " + orbit::node_name(n));
  }

  // Adjacency over active links (indices into the sorted node list).
  std::map<NodeId, std::vector<NodeId>> nbrs;
  for (const orbit::Link& l : graph.links) {
    if (l.status != orbit::LinkStatus::Active) continue;
    nbrs[l.a].push_back(l.b);
    nbrs[l.b].push_back(l.a);
  }

  std::map<NodeId, nn::Tensor> x = features;
  for (int r = 0; r < rounds; ++r) {
    std::map<NodeId, nn::Tensor> next;
    for (NodeId n : graph.nodes) {
      nn::Tensor agg = x.at(n);  // self-inclusive sum
      for (NodeId u : nbrs[n]) {
        const nn::Tensor& xu = x.at(u);
        for (size_t i = 0; i < agg.size(); ++i) agg.data[i] += xu.data[i];
      }
      if (transforms) {
        const std::string& p = transforms->layer_prefixes[static_cast<size_t>(r)];
        agg = nn::linear_forward(transforms->params->at(p + ".w"), agg,
                                 transforms->params->at(p + ".b"));
        if (transforms->activation) agg = nn::tanh_v(agg);
      }
      next[n] = std::move(agg);
    }
    x = std::move(next);
  }

  if (recurrent) {
    for (NodeId n : graph.nodes) {
      auto it = msgs.hidden.find(n);
      if (it == msgs.hidden.end())
        throw DimensionMismatch("message_pass: no hidden state for " + orbit::node_name(n));
      const nn::Tensor input = nn::concat_v(features.at(n), x.at(n));
      it->second = recurrent->recurrent
                       ? nn::gru_forward(*recurrent->params, recurrent->prefix, it->second, input)
                       : nn::passthrough_forward(*recurrent->params, recurrent->prefix, input);
    }
  }
  return x;
}

nn::Tensor apply_representation(const repspec::RepresentationSpec& spec,
                                const ObservationBundle& bundle, long* nonfinite_counter) {
  nn::Tensor out = nn::Tensor::zeros({spec.features.size()});
  for (size_t i = 0; i < spec.features.size(); ++i) {
    double v = repspec::eval_expr(spec.features[i], bundle.context);
    if (!std::isfinite(v)) {
      v = 0.0;
      if (nonfinite_counter) ++*nonfinite_counter;
    }
    out.data[i] = v;
  }
  return out;
}

nn::Params make_encoder_params(const EncoderConfig& config, Rng& rng) {
  nn::Params p;
  const size_t dsl = static_cast<size_t>(config.dsl_dim);
  const size_t mdim = static_cast<size_t>(config.message_dim);
  for (int r = 0; r < config.message_rounds; ++r) {
    const std::string prefix = "msg" + std::to_string(r + 1);
    const size_t in = r == 0 ? dsl : mdim;
    p.tensors[prefix + ".w"] =
        nn::Tensor::randn({mdim, in}, rng, 1.0 / std::sqrt(static_cast<double>(in)));
    p.tensors[prefix + ".b"] = nn::Tensor::zeros({mdim});
  }
  nn::Params gru = nn::make_gru_params("gru", dsl + mdim, static_cast<size_t>(config.hidden_dim),
                                       rng);
  p.tensors.insert(gru.tensors.begin(), gru.tensors.end());
  return p;
}

SlotObservations observe_slot(const sim::SimState& state,
                              const repspec::RepresentationSpec& spec,
                              const nn::Params& encoder, const EncoderConfig& config,
                              MessageState& msgs) {
  SlotObservations out;
  const auto raw = observe_all(state);

  // DSL state vectors, zero-padded to the encoder width.
  std::map<NodeId, nn::Tensor> dsl_vectors;
  for (NodeId n : state.graph.nodes) {
    ObservationBundle b;
    b.local = raw.at(n);
    b.context = feature_context(state, n, raw);
    nn::Tensor s = apply_representation(spec, b, &out.nonfinite_substitutions);
    nn::Tensor padded = nn::Tensor::zeros({static_cast<size_t>(config.dsl_dim)});
    std::copy(s.data.begin(), s.data.end(), padded.data.begin());
    dsl_vectors[n] = std::move(padded);
    out.bundles[n] = std::move(b);
  }

  MessageTransforms transforms;
  transforms.params = &encoder;
  for (int r = 0; r < config.message_rounds; ++r)
    transforms.layer_prefixes.push_back("msg" + std::to_string(r + 1));
  RecurrentUpdate rec{&encoder, "gru", config.recurrent};

  auto aggregated = message_pass(state.graph, dsl_vectors, msgs, config.message_rounds,
                                 &transforms, &rec);

  for (NodeId n : state.graph.nodes) {
    ObservationBundle& b = out.bundles[n];
    b.aggregated = aggregated.at(n);
    b.hidden_ref = &msgs.hidden.at(n);
    out.state_vectors[n] =
        nn::concat_v(nn::concat_v(dsl_vectors.at(n), b.aggregated), msgs.hidden.at(n));
  }
  return out;
}

}  // namespace satnet::graphstate
