#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace satnet::repspec {

// Feature vocabulary shared by the observation builder, the representation
// DSL, and prompt rendering. Order fixes the raw feature vector layout.
struct FeatureDef {
  std::string name;
  std::string description;
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr int kRawFeatureCount = 9;

const std::vector<FeatureDef>& feature_vocabulary();
int feature_index(const std::string& name);  // -1 if unknown

// Names valid only inside neighbor aggregate calls: per-link attributes.
// mean(neighbor_bandwidth) aggregates normalized bandwidths of active
// incident links; any vocabulary feature name aggregates the neighbors'
// values of that feature.
bool is_link_aggregate_name(const std::string& name);

// Expression AST for the constrained DSL: + - * /, unary minus, binary
// min/max, neighbor aggregates mean/min/max(name), constants, parentheses.
struct Expr {
  enum class Kind {
    Constant, Feature, Add, Sub, Mul, Div, Neg, Min2, Max2, AggMean, AggMin, AggMax
  };
  struct Node {
    Kind kind = Kind::Constant;
    double constant = 0.0;
    int feature = -1;        // Feature: vocabulary index
    std::string agg_name;    // Agg*: aggregated name
    int lhs = -1, rhs = -1;  // child node indices
  };
  std::vector<Node> nodes;
  int root = -1;
  std::string source;

  int height() const;
};

// Parses one expression; returns error text on failure.
std::optional<Expr> parse_expr(const std::string& text, std::string* error = nullptr);

struct FeatureContext {
  std::array<double, kRawFeatureCount> local{};
  std::vector<std::array<double, kRawFeatureCount>> neighbors;
  std::vector<double> neighbor_bandwidth;  // normalized, active links
  std::vector<double> neighbor_latency;    // normalized, active links
};

// May return non-finite values (division by zero); callers substitute per
// their contracts. Aggregates over an empty neighbor set evaluate to 0.
double eval_expr(const Expr& e, const FeatureContext& ctx);

enum class SpecProvenance { Stub, Live, Identity };

std::string provenance_name(SpecProvenance p);

// Validated DSL program produced by the LLM bridge: feature expressions plus
// one intrinsic-reward expression. Invariants: 1..32 features, vocabulary
// names only, expression height <= 8.
struct RepresentationSpec {
  int version = 0;
  std::vector<Expr> features;
  Expr intrinsic;
  SpecProvenance provenance = SpecProvenance::Identity;

  size_t feature_count() const { return features.size(); }
};

inline constexpr int kMaxSpecFeatures = 32;
inline constexpr int kMaxExprHeight = 8;

// All raw features in vocabulary order, intrinsic identically 0.
RepresentationSpec identity_spec();

// Strict parse of {"version":N,"features":[...],"intrinsic":"..."}; throws
// SpecInvalid on any violation.
RepresentationSpec parse_spec(const nlohmann::json& doc, SpecProvenance provenance);

// Soft variant for model responses: nullopt + error text instead of throwing.
std::optional<RepresentationSpec> try_parse_spec(const std::string& text,
                                                 SpecProvenance provenance,
                                                 std::string* error = nullptr);

nlohmann::json spec_to_json(const RepresentationSpec& spec);

}  // namespace satnet::repspec
