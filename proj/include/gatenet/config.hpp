#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gatenet/model.hpp"

namespace gatenet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenignGenConfig {
  int count = 0;
  int min_cells = 0;
  int max_cells = 0;
  bool allow_ff = false;
  uint64_t seed = 0;

  bool operator==(const BenignGenConfig&) const = default;
};

struct TriggerGenConfig {
  std::vector<int> comb_sizes;
  std::vector<int> seq_sizes;  ///< flipflop counts; sequence length = 2^size
  int per_size = 1;
  uint64_t seed = 0;

  bool operator==(const TriggerGenConfig&) const = default;
};

struct EmbeddingConfig {
  std::string strategy;  ///< "random" or "shallow"
  int k = 2;
  int per_benign = 1;  ///< triggers embedded per benign circuit
  uint64_t seed = 0;

  bool operator==(const EmbeddingConfig&) const = default;
};

struct SamplingConfig {
  int benign_per_circuit = 0;
  uint64_t seed = 0;

  bool operator==(const SamplingConfig&) const = default;
};

struct SplitConfig {
  std::string mode;  ///< "random-shuffle" or "extrapolation"
  double train_frac = 0.6;
  uint64_t seed = 0;
  std::vector<std::string> train_circuits;
  std::vector<std::string> test_circuits;
  std::vector<int> train_sizes;
  std::vector<int> test_sizes;

  bool operator==(const SplitConfig&) const = default;
};

struct BaselineRunConfig {
  std::vector<std::string> schemes;
  int64_t cycles = 10000;
  int trees = 100;
  uint64_t seed = 0;

  bool operator==(const BaselineRunConfig&) const = default;
};

/// Whole-pipeline configuration. Parsing is strict: every field is required
/// and unknown fields are errors, so a config file pins an experiment down
/// completely.
struct PipelineConfig {
  std::string workspace;
  BenignGenConfig benign;
  TriggerGenConfig triggers;
  EmbeddingConfig embedding;
  SamplingConfig sampling;
  SplitConfig split;
  TrainConfig train;
  BaselineRunConfig baseline;

  bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig parse_config(const std::string& text);
/// Canonical fixed-field-order serialization; parse(serialize(c)) == c.
std::string serialize_config(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

/// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);

/// Rederives every stage seed from one master seed (per-stage domain
/// separation), leaving all other fields untouched.
void apply_seed_override(PipelineConfig& cfg, uint64_t master_seed);

}  // namespace gatenet
