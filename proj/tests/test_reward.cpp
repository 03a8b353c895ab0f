#include <cmath>

#include "doctest.h"
#include "satnet/errors.hpp"
#include "satnet/reward.hpp"

using namespace satnet;
using namespace satnet::reward;

namespace {

RewardTerms terms(double t, double l, double p, long v = 0) {
  RewardTerms out;
  out.throughput = t;
  out.latency = l;
  out.penalty = p;
  out.violations = v;
  return out;
}

}  // namespace

TEST_CASE("penalty decays geometrically with a floor") {
  RewardConfig c;
  CHECK(compute_penalty(0, c) == 1.0);
  CHECK(compute_penalty(1, c) == doctest::Approx(0.9));
  CHECK(compute_penalty(2, c) == doctest::Approx(0.81));
  CHECK(compute_penalty(1000, c) == kPenaltyFloor);
}

TEST_CASE("penalty never increases with more violations") {
  RewardConfig c;
  c.beta_penalty = 0.93;
  double prev = 2.0;
  for (long v = 0; v < 500; v += 7) {
    const double p = compute_penalty(v, c);
    CHECK(p <= prev);
    CHECK(p >= kPenaltyFloor);
    prev = p;
  }
}

TEST_CASE("reward reproduces the weighted quality-cost product") {
  RewardConfig c;  // alpha1=1.0, alpha2=0.5
  CHECK(compute_reward(terms(0.8, 0.4, 1.0), c) == doctest::Approx(0.6));
  CHECK(compute_reward(terms(0.0, 0.0, 0.37), c) == 0.0);
  CHECK(compute_reward(terms(0.8, 0.4, 0.5), c) ==
        doctest::Approx(0.5 * compute_reward(terms(0.8, 0.4, 1.0), c)));
}

TEST_CASE("reward is linear in throughput and latency with the expected slopes") {
  RewardConfig c;
  c.alpha1 = 1.3;
  c.alpha2 = 0.7;
  const double p = 0.83;
  const double base = compute_reward(terms(0.25, 0.5, p), c);
  CHECK(compute_reward(terms(0.5, 0.5, p), c) - base == doctest::Approx(c.alpha1 * p * 0.25));
  CHECK(compute_reward(terms(0.25, 0.75, p), c) - base ==
        doctest::Approx(-c.alpha2 * p * 0.25));
}

TEST_CASE("extrinsic reward is bounded by the larger weight") {
  RewardConfig c;
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double r = compute_reward(
        terms(rng.uniform01(), rng.uniform01(), rng.uniform(0.01, 1.0)), c);
    CHECK(std::fabs(r) <= std::max(c.alpha1, c.alpha2) + 1e-12);
  }
}

TEST_CASE("window terms handle empty windows") {
  RewardConfig c;
  sim::SlotMetrics w;
  const RewardTerms t = terms_from_window(w, c);
  CHECK(t.throughput == 1.0);  // nothing requested, nothing failed
  CHECK(t.latency == 0.0);     // nothing delivered
  CHECK(t.penalty == 1.0);
}

TEST_CASE("window terms normalize throughput and latency") {
  RewardConfig c;
  c.latency_norm_slots = 50.0;
  sim::SlotMetrics w;
  w.generated = 10;
  w.delivered = 8;
  w.latency_sum_slots = 8 * 5.0;
  w.violations = 2;
  const RewardTerms t = terms_from_window(w, c);
  CHECK(t.throughput == doctest::Approx(0.8));
  CHECK(t.latency == doctest::Approx(0.1));
  CHECK(t.penalty == doctest::Approx(0.81));
  CHECK(t.violations == 2);
}

TEST_CASE("constant intrinsic expression evaluates to itself") {
  graphstate::ObservationBundle b;
  nlohmann::json doc = {{"version", 1}, {"features", {"degree"}}, {"intrinsic", "0.5"}};
  const auto spec = repspec::parse_spec(doc, repspec::SpecProvenance::Stub);
  CHECK(intrinsic_reward(spec, b) == doctest::Approx(0.5));
}

TEST_CASE("intrinsic expression evaluates the named features") {
  graphstate::ObservationBundle b;
  b.context.local[7] = 0.7;  // throughput_local
  b.context.local[8] = 0.2;  // drops_local
  nlohmann::json doc = {{"version", 1},
                        {"features", {"degree"}},
                        {"intrinsic", "throughput_local - drops_local"}};
  const auto spec = repspec::parse_spec(doc, repspec::SpecProvenance::Stub);
  CHECK(intrinsic_reward(spec, b) == doctest::Approx(0.5));
}

TEST_CASE("intrinsic values clamp to [-1, 1] and zero out non-finite results") {
  graphstate::ObservationBundle b;
  nlohmann::json big = {{"version", 1}, {"features", {"degree"}}, {"intrinsic", "3.7"}};
  CHECK(intrinsic_reward(repspec::parse_spec(big, repspec::SpecProvenance::Stub), b) == 1.0);

  nlohmann::json neg = {{"version", 1}, {"features", {"degree"}}, {"intrinsic", "0 - 9"}};
  CHECK(intrinsic_reward(repspec::parse_spec(neg, repspec::SpecProvenance::Stub), b) == -1.0);

  long counter = 0;
  nlohmann::json div = {{"version", 1}, {"features", {"degree"}}, {"intrinsic", "1 / degree"}};
  CHECK(intrinsic_reward(repspec::parse_spec(div, repspec::SpecProvenance::Stub), b, &counter) ==
        0.0);
  CHECK(counter == 1);
}

TEST_CASE("combine weights the intrinsic term linearly") {
  RewardConfig c;
  c.intrinsic_weight = 0.0;
  CHECK(combine(0.6, 0.9, c) == 0.6);
  c.intrinsic_weight = 0.1;
  CHECK(combine(0.6, 0.5, c) == doctest::Approx(0.65));
  // Linearity in the weight: two-point check.
  RewardConfig c2 = c;
  c2.intrinsic_weight = 0.2;
  CHECK(combine(0.6, 0.5, c2) - 0.6 == doctest::Approx(2.0 * (combine(0.6, 0.5, c) - 0.6)));
}

TEST_CASE("reward config validation") {
  RewardConfig c;
  c.beta_penalty = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = RewardConfig{};
  c.alpha1 = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = RewardConfig{};
  CHECK_NOTHROW(c.validate());
}
