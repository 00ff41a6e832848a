#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gatenet/embedding.hpp"
#include "gatenet/inf.hpp"

namespace gatenet {

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ManifestEntry {
  std::string file;  ///< JSONL path, relative to the workspace root
  int line = 0;      ///< 0-based line within the file
  int label = 0;
  std::string circuit;  ///< embedded-circuit name
  NodeId root = 0;
  std::string benign;        ///< source benign circuit name
  std::string trigger_kind;  ///< kind of the trigger embedded in `circuit`
  int trigger_size = 0;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::string split_tag;  ///< "", "train" or "test"
  std::string config_hash;

  int64_t benign_count() const;
  int64_t trigger_count() const;
};

/// INFs for one embedded circuit: the trigger INF first (label 1), then
/// `benign_sample` INFs rooted at nodes sampled uniformly without replacement
/// from everything except the trigger output (label 0).
std::vector<InfGraph> dataset_infs_for(const EmbeddedCircuit& ec,
                                       int benign_sample, uint64_t seed);

struct BuiltDataset {
  DatasetManifest manifest;
  std::vector<std::vector<InfGraph>> infs;  ///< parallel to the embedded list
};

/// In-memory dataset assembly. Entry file refs are "infs/<circuit>.jsonl";
/// per-circuit sub-seeds are keyed by circuit name so the result does not
/// depend on list order.
BuiltDataset build_dataset(const std::vector<EmbeddedCircuit>& embedded,
                           int benign_sample_per_circuit, uint64_t seed);

std::pair<DatasetManifest, DatasetManifest> split_random_shuffle(
    const DatasetManifest& manifest, double train_frac, uint64_t seed);

std::pair<DatasetManifest, DatasetManifest> split_extrapolation(
    const DatasetManifest& manifest, const std::set<std::string>& train_circuits,
    const std::set<std::string>& test_circuits, const std::set<int>& train_sizes,
    const std::set<int>& test_sizes);

std::string serialize_manifest(const DatasetManifest& m);
DatasetManifest parse_manifest(const std::string& text);
DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& m, const std::string& path);

/// Loads the referenced INF graphs, one per entry, resolving file refs
/// against `base_dir`. Each file is read once.
std::vector<InfGraph> load_manifest_infs(const DatasetManifest& m,
                                         const std::string& base_dir);

}  // namespace gatenet
