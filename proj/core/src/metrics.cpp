#include "satnet/metrics.hpp"

#include "satnet/errors.hpp"

namespace satnet::bench {

nlohmann::json MetricsRecord::to_json() const {
  nlohmann::json j;
  j["episode"] = episode;
  j["slot"] = slot;
  j["episode_aggregate"] = episode_aggregate;
  j["reward"] = reward;
  j["throughput"] = throughput;
  j["latency"] = latency;
  j["penalty"] = penalty;
  j["violations"] = violations;
  j["drops"] = drops;
  j["migrations"] = migrations;
  j["spec_version"] = spec_version;
  j["variant"] = variant;
  j["seed"] = seed;
  return j;
}

MetricsRecord MetricsRecord::from_json(const nlohmann::json& j) {
  try {
    MetricsRecord r;
    r.episode = j.at("episode").get<long>();
    r.slot = j.at("slot").get<long>();
    r.episode_aggregate = j.at("episode_aggregate").get<bool>();
    r.reward = j.at("reward").get<double>();
    r.throughput = j.at("throughput").get<double>();
    r.latency = j.at("latency").get<double>();
    r.penalty = j.at("penalty").get<double>();
    r.violations = j.at("violations").get<long>();
    r.drops = j.at("drops").get<long>();
    r.migrations = j.at("migrations").get<long>();
    r.spec_version = j.at("spec_version").get<int>();
    r.variant = j.at("variant").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw LogCorrupt(std::string("metrics record missing fields: ") + e.what());
  }
}

MetricsWriter::MetricsWriter(const std::string& path) : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw OutputUnwritable("MetricsWriter: cannot open " + path);
}

void MetricsWriter::write(const MetricsRecord& record) {
  out_ << record.to_json().dump() << '\n';
  if (!out_) throw OutputUnwritable("MetricsWriter: write failed for " + path_);
}

void MetricsWriter::flush() { out_.flush(); }

std::vector<MetricsRecord> read_metrics_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LogCorrupt("cannot open metrics log: " + path);
  std::vector<MetricsRecord> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw LogCorrupt(path + ":" + std::to_string(lineno) + ": not valid JSON");
    out.push_back(MetricsRecord::from_json(j));
  }
  return out;
}

}  // namespace satnet::bench
