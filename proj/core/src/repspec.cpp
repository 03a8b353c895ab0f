#include "satnet/repspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "satnet/errors.hpp"

namespace satnet::repspec {

const std::vector<FeatureDef>& feature_vocabulary() {
  static const std::vector<FeatureDef> defs = {
      {"degree", "active link count, scale [0,6]", 0.0, 1.0},
      {"queue_occupancy", "backlog queued at the node relative to its per-slot link capacity",
       0.0, 1.0},
      {"hosted_services", "services hosted here relative to the scenario service count", 0.0,
       1.0},
      {"neighbor_bandwidth_mean", "mean active incident-link bandwidth, scale [0,80] Mbps", 0.0,
       1.0},
      {"neighbor_bandwidth_min", "min active incident-link bandwidth, scale [0,80] Mbps", 0.0,
       1.0},
      {"neighbor_latency_mean", "mean active incident-link latency, scale [0,50] ms", 0.0, 1.0},
      {"in_migration", "1 while a hosted service is migrating, else 0", 0.0, 1.0},
      {"throughput_local", "packets delivered at this node over the recent window, relative to "
                           "packets generated network-wide in the window",
       0.0, 1.0},
      {"drops_local", "packets dropped at this node over the recent window, relative to packets "
                      "generated network-wide in the window",
       0.0, 1.0},
  };
  return defs;
}

int feature_index(const std::string& name) {
  const auto& v = feature_vocabulary();
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i].name == name) return static_cast<int>(i);
  return -1;
}

bool is_link_aggregate_name(const std::string& name) {
  return name == "neighbor_bandwidth" || name == "neighbor_latency";
}

int Expr::height() const {
  if (root < 0) return 0;
  // Children always precede parents, so one forward pass suffices.
  std::vector<int> h(nodes.size(), 1);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    int child = 0;
    if (n.lhs >= 0) child = std::max(child, h[static_cast<size_t>(n.lhs)]);
    if (n.rhs >= 0) child = std::max(child, h[static_cast<size_t>(n.rhs)]);
    h[i] = child + 1;
  }
  return h[static_cast<size_t>(root)];
}

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  Expr out;
  std::string error;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  int push(Expr::Node n) {
    out.nodes.push_back(std::move(n));
    return static_cast<int>(out.nodes.size() - 1);
  }

  int fail(const std::string& msg) {
    if (error.empty()) error = msg;
    return -1;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  int expr(int depth) {
    int lhs = term(depth);
    if (lhs < 0) return -1;
    while (true) {
      char c = peek();
      if (c != '+' && c != '-') break;
      ++pos;
      int rhs = term(depth);
      if (rhs < 0) return -1;
      Expr::Node n;
      n.kind = c == '+' ? Expr::Kind::Add : Expr::Kind::Sub;
      n.lhs = lhs;
      n.rhs = rhs;
      lhs = push(n);
    }
    return lhs;
  }

  int term(int depth) {
    int lhs = factor(depth);
    if (lhs < 0) return -1;
    while (true) {
      char c = peek();
      if (c != '*' && c != '/') break;
      ++pos;
      int rhs = factor(depth);
      if (rhs < 0) return -1;
      Expr::Node n;
      n.kind = c == '*' ? Expr::Kind::Mul : Expr::Kind::Div;
      n.lhs = lhs;
      n.rhs = rhs;
      lhs = push(n);
    }
    return lhs;
  }

  int factor(int depth) {
    if (depth > 64) return fail("expression too deeply nested");
    char c = peek();
    if (c == '-') {
      ++pos;
      int inner = factor(depth + 1);
      if (inner < 0) return -1;
      Expr::Node n;
      n.kind = Expr::Kind::Neg;
      n.lhs = inner;
      return push(n);
    }
    if (c == '(') {
      ++pos;
      int inner = expr(depth + 1);
      if (inner < 0) return -1;
      if (!consume(')')) return fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      skip_ws();
      size_t end = pos;
      while (end < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.' ||
              text[end] == 'e' || text[end] == 'E' ||
              ((text[end] == '+' || text[end] == '-') && end > pos &&
               (text[end - 1] == 'e' || text[end - 1] == 'E'))))
        ++end;
      try {
        Expr::Node n;
        n.kind = Expr::Kind::Constant;
        n.constant = std::stod(text.substr(pos, end - pos));
        pos = end;
        return push(n);
      } catch (const std::exception&) {
        return fail("bad numeric literal");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = ident();
      if (name == "min" || name == "max" || name == "mean") {
        if (!consume('(')) return fail(name + " requires arguments");
        return aggregate_or_binary(name, depth + 1);
      }
      int idx = feature_index(name);
      if (idx < 0) return fail("unknown feature: " + name);
      Expr::Node n;
      n.kind = Expr::Kind::Feature;
      n.feature = idx;
      return push(n);
    }
    return fail("unexpected character in expression");
  }

  // After "fn(" — either fn(name) as a neighbor aggregate, or for min/max a
  // two-argument elementwise form fn(expr, expr).
  int aggregate_or_binary(const std::string& fn, int depth) {
    skip_ws();
    // Try the aggregate form first: a bare name followed by ')'.
    size_t save = pos;
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      std::string name = ident();
      skip_ws();
      if (pos < text.size() && text[pos] == ')') {
        if (is_link_aggregate_name(name) || feature_index(name) >= 0) {
          ++pos;
          Expr::Node n;
          n.kind = fn == "mean" ? Expr::Kind::AggMean
                                : (fn == "min" ? Expr::Kind::AggMin : Expr::Kind::AggMax);
          n.agg_name = name;
          return push(n);
        }
        return fail("unknown aggregate name: " + name);
      }
      pos = save;
    }
    if (fn == "mean") return fail("mean() takes a single feature name");
    int a = expr(depth);
    if (a < 0) return -1;
    if (!consume(',')) return fail(fn + "(a, b) expects two arguments");
    int b = expr(depth);
    if (b < 0) return -1;
    if (!consume(')')) return fail("expected ')'");
    Expr::Node n;
    n.kind = fn == "min" ? Expr::Kind::Min2 : Expr::Kind::Max2;
    n.lhs = a;
    n.rhs = b;
    return push(n);
  }
};

double agg_values(Expr::Kind kind, const std::vector<double>& vals) {
  if (vals.empty()) return 0.0;
  if (kind == Expr::Kind::AggMean) {
    double s = 0.0;
    for (double v : vals) s += v;
    return s / static_cast<double>(vals.size());
  }
  double best = vals[0];
  for (double v : vals)
    best = kind == Expr::Kind::AggMin ? std::min(best, v) : std::max(best, v);
  return best;
}

}  // namespace

std::optional<Expr> parse_expr(const std::string& text, std::string* error) {
  Parser p(text);
  int root = p.expr(0);
  if (root >= 0 && !p.eof()) {
    root = -1;
    if (p.error.empty()) p.error = "trailing characters after expression";
  }
  if (root < 0) {
    if (error) *error = p.error;
    return std::nullopt;
  }
  p.out.root = root;
  p.out.source = text;
  return p.out;
}

double eval_expr(const Expr& e, const FeatureContext& ctx) {
  std::vector<double> val(e.nodes.size(), 0.0);
  for (size_t i = 0; i < e.nodes.size(); ++i) {
    const Expr::Node& n = e.nodes[i];
    switch (n.kind) {
      case Expr::Kind::Constant: val[i] = n.constant; break;
      case Expr::Kind::Feature: val[i] = ctx.local[static_cast<size_t>(n.feature)]; break;
      case Expr::Kind::Add: val[i] = val[n.lhs] + val[n.rhs]; break;
      case Expr::Kind::Sub: val[i] = val[n.lhs] - val[n.rhs]; break;
      case Expr::Kind::Mul: val[i] = val[n.lhs] * val[n.rhs]; break;
      case Expr::Kind::Div: val[i] = val[n.lhs] / val[n.rhs]; break;
      case Expr::Kind::Neg: val[i] = -val[n.lhs]; break;
      case Expr::Kind::Min2: val[i] = std::min(val[n.lhs], val[n.rhs]); break;
      case Expr::Kind::Max2: val[i] = std::max(val[n.lhs], val[n.rhs]); break;
      case Expr::Kind::AggMean:
      case Expr::Kind::AggMin:
      case Expr::Kind::AggMax: {
        if (n.agg_name == "neighbor_bandwidth") {
          val[i] = agg_values(n.kind, ctx.neighbor_bandwidth);
        } else if (n.agg_name == "neighbor_latency") {
          val[i] = agg_values(n.kind, ctx.neighbor_latency);
        } else {
          const int fi = feature_index(n.agg_name);
          std::vector<double> vals;
          vals.reserve(ctx.neighbors.size());
          for (const auto& nb : ctx.neighbors) vals.push_back(nb[static_cast<size_t>(fi)]);
          val[i] = agg_values(n.kind, vals);
        }
        break;
      }
    }
  }
  return val[static_cast<size_t>(e.root)];
}

std::string provenance_name(SpecProvenance p) {
  switch (p) {
    case SpecProvenance::Stub: return "stub";
    case SpecProvenance::Live: return "live";
    case SpecProvenance::Identity: return "identity";
  }
  return "identity";
}

RepresentationSpec identity_spec() {
  RepresentationSpec s;
  s.version = 0;
  s.provenance = SpecProvenance::Identity;
  for (const FeatureDef& d : feature_vocabulary()) {
    s.features.push_back(*parse_expr(d.name));
  }
  s.intrinsic = *parse_expr("0");
  return s;
}

RepresentationSpec parse_spec(const nlohmann::json& doc, SpecProvenance provenance) {
  if (!doc.is_object()) throw SpecInvalid("spec must be a JSON object");
  RepresentationSpec s;
  s.provenance = provenance;
  s.version = doc.value("version", 0);
  if (!doc.contains("features") || !doc["features"].is_array())
    throw SpecInvalid("spec.features must be an array");
  const auto& feats = doc["features"];
  if (feats.empty() || feats.size() > static_cast<size_t>(kMaxSpecFeatures))
    throw SpecInvalid("spec.features count must be in [1," + std::to_string(kMaxSpecFeatures) +
                      "]");
  for (const auto& f : feats) {
    if (!f.is_string()) throw SpecInvalid("spec.features entries must be strings");
    std::string err;
    auto e = parse_expr(f.get<std::string>(), &err);
    if (!e) throw SpecInvalid("feature expression '" + f.get<std::string>() + "': " + err);
    if (e->height() > kMaxExprHeight)
      throw SpecInvalid("feature expression exceeds depth " + std::to_string(kMaxExprHeight));
    s.features.push_back(std::move(*e));
  }
  std::string intrinsic_src = doc.value("intrinsic", std::string("0"));
  std::string err;
  auto e = parse_expr(intrinsic_src, &err);
  if (!e) throw SpecInvalid("intrinsic expression '" + intrinsic_src + "': " + err);
  if (e->height() > kMaxExprHeight)
    throw SpecInvalid("intrinsic expression exceeds depth " + std::to_string(kMaxExprHeight));
  s.intrinsic = std::move(*e);
  return s;
}

std::optional<RepresentationSpec> try_parse_spec(const std::string& text,
                                                 SpecProvenance provenance, std::string* error) {
  // Accept either a bare JSON document or one embedded in surrounding prose.
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    const size_t open = text.find('{');
    const size_t close = text.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open)
      doc = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
  }
  if (doc.is_discarded()) {
    if (error) *error = "response is not valid JSON";
    return std::nullopt;
  }
  try {
    return parse_spec(doc, provenance);
  } catch (const SpecInvalid& e) {
    if (error) *error = e.what();
    return std::nullopt;
  }
}

nlohmann::json spec_to_json(const RepresentationSpec& spec) {
  nlohmann::json doc;
  doc["version"] = spec.version;
  nlohmann::json feats = nlohmann::json::array();
  for (const Expr& e : spec.features) feats.push_back(e.source);
  doc["features"] = feats;
  doc["intrinsic"] = spec.intrinsic.source;
  doc["provenance"] = provenance_name(spec.provenance);
  return doc;
}

}  // namespace satnet::repspec
