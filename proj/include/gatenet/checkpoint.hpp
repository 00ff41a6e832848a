#pragma once

#include <filesystem>
#include <string>

#include "gatenet/model.hpp"

namespace gatenet {

/// Serialized model weights plus the JSON config that produced them.
/// Encoder-only checkpoints carry 4 weight blocks; full ones carry 10.
struct Checkpoint {
  EncoderState encoder;
  FcnState fcn;
  bool has_fcn = false;
  std::string config_json;

  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gatenet
