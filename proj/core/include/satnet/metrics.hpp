#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace satnet::bench {

// One line-delimited JSON record per slot plus one aggregate per episode.
struct MetricsRecord {
  long episode = 0;
  long slot = 0;  // -1 on episode aggregates
  bool episode_aggregate = false;
  double reward = 0.0;  // extrinsic (paper formula) reward for the window
  double throughput = 0.0;
  double latency = 0.0;
  double penalty = 1.0;
  long violations = 0;
  long drops = 0;
  long migrations = 0;
  int spec_version = 0;
  std::string variant;
  uint64_t seed = 0;

  nlohmann::json to_json() const;
  static MetricsRecord from_json(const nlohmann::json& j);  // throws LogCorrupt
};

class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);  // throws OutputUnwritable
  void write(const MetricsRecord& record);
  void flush();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::vector<MetricsRecord> read_metrics_file(const std::string& path);  // throws LogCorrupt

}  // namespace satnet::bench
