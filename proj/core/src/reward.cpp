#include "satnet/reward.hpp"

#include <algorithm>
#include <cmath>

#include "satnet/errors.hpp"

namespace satnet::reward {

void RewardConfig::validate() const {
  if (alpha1 < 0.0 || alpha2 < 0.0) throw ConfigInvalid("alpha weights must be >= 0");
  if (beta_penalty <= 0.0 || beta_penalty > 1.0)
    throw ConfigInvalid("beta_penalty must be in (0,1]");
  if (intrinsic_weight < 0.0) throw ConfigInvalid("intrinsic_weight must be >= 0");
  if (latency_norm_slots <= 0.0) throw ConfigInvalid("latency_norm_slots must be > 0");
}

double compute_penalty(long violations, const RewardConfig& config) {
  return std::max(kPenaltyFloor,
                  std::pow(config.beta_penalty, static_cast<double>(violations)));
}

RewardTerms terms_from_window(const sim::SlotMetrics& window, const RewardConfig& config) {
  RewardTerms t;
  t.throughput = window.generated == 0
                     ? 1.0
                     : static_cast<double>(window.delivered) /
                           static_cast<double>(window.generated);
  t.throughput = std::clamp(t.throughput, 0.0, 1.0);
  if (window.delivered > 0) {
    const double mean_latency =
        window.latency_sum_slots / static_cast<double>(window.delivered);
    t.latency = std::clamp(mean_latency / config.latency_norm_slots, 0.0, 1.0);
  }
  t.violations = window.violations;
  t.penalty = compute_penalty(window.violations, config);
  return t;
}

double compute_reward(const RewardTerms& terms, const RewardConfig& config) {
  return (config.alpha1 * terms.throughput - config.alpha2 * terms.latency) * terms.penalty;
}

double intrinsic_reward(const repspec::RepresentationSpec& spec,
                        const graphstate::ObservationBundle& bundle,
                        long* nonfinite_counter) {
  double v = repspec::eval_expr(spec.intrinsic, bundle.context);
  if (!std::isfinite(v)) {
    if (nonfinite_counter) ++*nonfinite_counter;
    return 0.0;
  }
  return std::clamp(v, -1.0, 1.0);
}

double combine(double extrinsic, double intrinsic, const RewardConfig& config) {
  return extrinsic + config.intrinsic_weight * intrinsic;
}

}  // namespace satnet::reward
