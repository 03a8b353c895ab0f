#pragma once

#include "satnet/graphstate.hpp"
#include "satnet/netsim.hpp"
#include "satnet/repspec.hpp"

namespace satnet::reward {

struct RewardConfig {
  double alpha1 = 1.0;
  double alpha2 = 0.5;
  double beta_penalty = 0.9;      // per-violation decay
  double intrinsic_weight = 0.1;
  double latency_norm_slots = 50.0;  // defaults to deadline_slots

  void validate() const;  // throws ConfigInvalid
};

struct RewardTerms {
  double throughput = 0.0;  // delivered/generated in the window, 1 if generated == 0
  double latency = 0.0;     // mean delivered latency / latency_norm_slots, in [0,1]
  double penalty = 1.0;     // in (0,1]
  long violations = 0;
};

inline constexpr double kPenaltyFloor = 0.01;

// beta^violations, floored at 0.01.
double compute_penalty(long violations, const RewardConfig& config);

// Terms for a metrics window (one decision epoch or one slot).
RewardTerms terms_from_window(const sim::SlotMetrics& window, const RewardConfig& config);

// Exactly (alpha1 * throughput - alpha2 * latency) * penalty.
double compute_reward(const RewardTerms& terms, const RewardConfig& config);

// Evaluates the spec's intrinsic expression over the bundle's features,
// clamped to [-1, 1]; non-finite values become 0 (counted when a counter is
// supplied).
double intrinsic_reward(const repspec::RepresentationSpec& spec,
                        const graphstate::ObservationBundle& bundle,
                        long* nonfinite_counter = nullptr);

// extrinsic + intrinsic_weight * intrinsic.
double combine(double extrinsic, double intrinsic, const RewardConfig& config);

}  // namespace satnet::reward
