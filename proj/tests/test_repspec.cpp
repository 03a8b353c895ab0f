#include <cmath>

#include "doctest.h"
#include "satnet/errors.hpp"
#include "satnet/repspec.hpp"

using namespace satnet;
using namespace satnet::repspec;

namespace {

FeatureContext context_with_local(std::array<double, kRawFeatureCount> local) {
  FeatureContext ctx;
  ctx.local = local;
  return ctx;
}

}  // namespace

TEST_CASE("vocabulary has nine named features") {
  CHECK(feature_vocabulary().size() == kRawFeatureCount);
  CHECK(feature_index("degree") == 0);
  CHECK(feature_index("drops_local") == 8);
  CHECK(feature_index("nope") == -1);
}

TEST_CASE("arithmetic expressions evaluate with precedence") {
  FeatureContext ctx = context_with_local({0, 0.5, 0, 0, 0, 0, 0, 0.7, 0.2});
  auto e = parse_expr("throughput_local - drops_local - 0.5 * queue_occupancy");
  REQUIRE(e.has_value());
  CHECK(eval_expr(*e, ctx) == doctest::Approx(0.7 - 0.2 - 0.25));

  auto e2 = parse_expr("(1 + 2) * 2 - 3 / 2");
  REQUIRE(e2.has_value());
  CHECK(eval_expr(*e2, ctx) == doctest::Approx(4.5));

  auto e3 = parse_expr("-queue_occupancy + 1");
  REQUIRE(e3.has_value());
  CHECK(eval_expr(*e3, ctx) == doctest::Approx(0.5));
}

TEST_CASE("binary min and max") {
  FeatureContext ctx = context_with_local({0.2, 0.8, 0, 0, 0, 0, 0, 0, 0});
  CHECK(eval_expr(*parse_expr("min(degree, queue_occupancy)"), ctx) == doctest::Approx(0.2));
  CHECK(eval_expr(*parse_expr("max(degree, queue_occupancy)"), ctx) == doctest::Approx(0.8));
}

TEST_CASE("neighbor aggregates over link attributes") {
  FeatureContext ctx;
  ctx.neighbor_bandwidth = {0.3, 0.5};
  ctx.neighbor_latency = {0.1, 0.9};
  CHECK(eval_expr(*parse_expr("mean(neighbor_bandwidth) * 2"), ctx) == doctest::Approx(0.8));
  CHECK(eval_expr(*parse_expr("min(neighbor_bandwidth)"), ctx) == doctest::Approx(0.3));
  CHECK(eval_expr(*parse_expr("max(neighbor_latency)"), ctx) == doctest::Approx(0.9));
}

TEST_CASE("neighbor aggregates over node features") {
  FeatureContext ctx;
  std::array<double, kRawFeatureCount> n1{};
  std::array<double, kRawFeatureCount> n2{};
  n1[1] = 0.4;
  n2[1] = 0.8;
  ctx.neighbors = {n1, n2};
  CHECK(eval_expr(*parse_expr("mean(queue_occupancy)"), ctx) == doctest::Approx(0.6));
  CHECK(eval_expr(*parse_expr("max(queue_occupancy)"), ctx) == doctest::Approx(0.8));
}

TEST_CASE("aggregates over an empty neighborhood evaluate to zero") {
  FeatureContext ctx;
  CHECK(eval_expr(*parse_expr("mean(queue_occupancy)"), ctx) == 0.0);
  CHECK(eval_expr(*parse_expr("max(neighbor_bandwidth)"), ctx) == 0.0);
}

TEST_CASE("division by zero surfaces as non-finite") {
  FeatureContext ctx = context_with_local({0, 0, 0, 0, 0, 0, 0, 0, 0});
  const double v = eval_expr(*parse_expr("1 / degree"), ctx);
  CHECK_FALSE(std::isfinite(v));
}

TEST_CASE("unknown names fail to parse") {
  std::string err;
  CHECK_FALSE(parse_expr("bogus_feature + 1", &err).has_value());
  CHECK(err.find("unknown feature") != std::string::npos);
  CHECK_FALSE(parse_expr("mean(bogus)", &err).has_value());
}

TEST_CASE("malformed expressions fail to parse") {
  CHECK_FALSE(parse_expr("", nullptr).has_value());
  CHECK_FALSE(parse_expr("1 +", nullptr).has_value());
  CHECK_FALSE(parse_expr("(1 + 2", nullptr).has_value());
  CHECK_FALSE(parse_expr("degree degree", nullptr).has_value());
  CHECK_FALSE(parse_expr("mean(degree, queue_occupancy)", nullptr).has_value());
}

TEST_CASE("identity spec selects every raw feature with zero intrinsic") {
  const RepresentationSpec s = identity_spec();
  CHECK(s.provenance == SpecProvenance::Identity);
  REQUIRE(s.features.size() == kRawFeatureCount);
  FeatureContext ctx = context_with_local({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  for (size_t i = 0; i < s.features.size(); ++i)
    CHECK(eval_expr(s.features[i], ctx) == doctest::Approx(ctx.local[i]));
  CHECK(eval_expr(s.intrinsic, ctx) == 0.0);
}

TEST_CASE("spec validation enforces the invariants") {
  nlohmann::json good = {{"version", 3},
                         {"features", {"degree", "queue_occupancy * 2"}},
                         {"intrinsic", "throughput_local"}};
  const RepresentationSpec s = parse_spec(good, SpecProvenance::Live);
  CHECK(s.version == 3);
  CHECK(s.feature_count() == 2);

  CHECK_THROWS_AS(parse_spec({{"features", nlohmann::json::array()}}, SpecProvenance::Live),
                  SpecInvalid);
  CHECK_THROWS_AS(parse_spec({{"features", {"unknown_name"}}}, SpecProvenance::Live),
                  SpecInvalid);
  nlohmann::json too_many;
  too_many["features"] = nlohmann::json::array();
  for (int i = 0; i < 33; ++i) too_many["features"].push_back("degree");
  CHECK_THROWS_AS(parse_spec(too_many, SpecProvenance::Live), SpecInvalid);

  // Height 9 expression: eight nested negations over a leaf.
  nlohmann::json deep = {{"features", {"--------degree"}}};
  CHECK_THROWS_AS(parse_spec(deep, SpecProvenance::Live), SpecInvalid);
}

TEST_CASE("try_parse_spec recovers a JSON document embedded in prose") {
  const std::string text =
      "Here is the representation you asked for:\n"
      "{\"version\": 4, \"features\": [\"degree\"], \"intrinsic\": \"0.5\"}\nHope it helps!";
  auto s = try_parse_spec(text, SpecProvenance::Live);
  REQUIRE(s.has_value());
  CHECK(s->version == 4);

  std::string err;
  CHECK_FALSE(try_parse_spec("no json here", SpecProvenance::Live, &err).has_value());
}

TEST_CASE("expression height is measured on the parsed tree") {
  CHECK(parse_expr("degree")->height() == 1);
  CHECK(parse_expr("degree + 1")->height() == 2);
  CHECK(parse_expr("(degree + 1) * 2")->height() == 3);
}
