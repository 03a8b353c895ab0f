#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "satnet/neuralcore.hpp"

namespace satnet::nn {

// Checkpoint file: magic "NCKP", little-endian u32 manifest length, JSON
// manifest (format version, config hash, tensor index with shapes/offsets),
// then raw little-endian IEEE-754 64-bit values. Round trips byte-exactly.
struct CheckpointManifest {
  int format_version = 1;
  std::string config_hash;
};

void save_checkpoint(const std::string& path, const std::map<std::string, Tensor>& tensors,
                     const CheckpointManifest& manifest);

std::map<std::string, Tensor> load_checkpoint(const std::string& path,
                                              CheckpointManifest* manifest = nullptr);

}  // namespace satnet::nn
