#include "satnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "satnet/errors.hpp"

namespace satnet::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts unsupported");

void save_checkpoint(const std::string& path, const std::map<std::string, Tensor>& tensors,
                     const CheckpointManifest& manifest) {
  nlohmann::json m;
  m["format_version"] = manifest.format_version;
  m["config_hash"] = manifest.config_hash;
  nlohmann::json index = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    nlohmann::json e;
    e["name"] = name;
    e["shape"] = t.shape;
    e["offset"] = offset;
    e["count"] = t.size();
    index.push_back(e);
    offset += t.size();
  }
  m["tensors"] = index;
  const std::string mjson = m.dump();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputUnwritable("save_checkpoint: cannot open " + path);
  f.write("NCKP", 4);
  const uint32_t len = static_cast<uint32_t>(mjson.size());
  f.write(reinterpret_cast<const char*>(&len), sizeof(len));
  f.write(mjson.data(), static_cast<std::streamsize>(mjson.size()));
  for (const auto& [name, t] : tensors) {
    f.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!f) throw OutputUnwritable("save_checkpoint: write failed for " + path);
}

std::map<std::string, Tensor> load_checkpoint(const std::string& path,
                                              CheckpointManifest* manifest) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw OutputUnwritable("load_checkpoint: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "NCKP", 4) != 0)
    throw LogCorrupt("load_checkpoint: bad magic in " + path);
  uint32_t len = 0;
  f.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string mjson(len, '\0');
  f.read(mjson.data(), len);
  if (!f) throw LogCorrupt("load_checkpoint: truncated manifest in " + path);

  nlohmann::json m = nlohmann::json::parse(mjson, nullptr, false);
  if (m.is_discarded()) throw LogCorrupt("load_checkpoint: manifest not valid JSON");
  if (manifest) {
    manifest->format_version = m.value("format_version", 0);
    manifest->config_hash = m.value("config_hash", "");
  }

  std::map<std::string, Tensor> out;
  for (const auto& e : m.at("tensors")) {
    Tensor t;
    t.shape = e.at("shape").get<std::vector<size_t>>();
    const size_t count = e.at("count").get<size_t>();
    t.data.resize(count);
    f.read(reinterpret_cast<char*>(t.data.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
    if (!f) throw LogCorrupt("load_checkpoint: truncated tensor data in " + path);
    out[e.at("name").get<std::string>()] = std::move(t);
  }
  return out;
}

}  // namespace satnet::nn
