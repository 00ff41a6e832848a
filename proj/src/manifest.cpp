#include "gatenet/manifest.hpp"

#include <algorithm>
#include <map>

#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"
#include "json.hpp"

namespace gatenet {

int64_t DatasetManifest::benign_count() const {
  return (int64_t)std::count_if(entries.begin(), entries.end(),
                                [](const auto& e) { return e.label == 0; });
}

int64_t DatasetManifest::trigger_count() const {
  return (int64_t)entries.size() - benign_count();
}

std::vector<InfGraph> dataset_infs_for(const EmbeddedCircuit& ec,
                                       int benign_sample, uint64_t seed) {
  const int32_t n = ec.circuit.node_count();
  if (benign_sample > n - 1)
    throw ManifestError("benign sample count " + std::to_string(benign_sample) +
                        " exceeds available nodes (" + std::to_string(n - 1) +
                        ") in " + ec.circuit.name);
  std::vector<InfGraph> out;
  out.push_back(extract_inf(ec.circuit, ec.trigger_output_node));
  out.back().label = 1;

  std::vector<NodeId> pool;
  pool.reserve(n - 1);
  for (NodeId v = 0; v < n; ++v)
    if (v != ec.trigger_output_node) pool.push_back(v);
  Rng rng(seed);
  for (int i = 0; i < benign_sample; ++i) {
    size_t j = (size_t)i + rng.uniform(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(extract_inf(ec.circuit, pool[i]));
    out.back().label = 0;
  }
  return out;
}

BuiltDataset build_dataset(const std::vector<EmbeddedCircuit>& embedded,
                           int benign_sample_per_circuit, uint64_t seed) {
  BuiltDataset built;
  for (const EmbeddedCircuit& ec : embedded) {
    auto infs = dataset_infs_for(ec, benign_sample_per_circuit,
                                 mix_seed(seed, fnv1a64(ec.circuit.name)));
    const std::string file = "infs/" + ec.circuit.name + ".jsonl";
    for (size_t i = 0; i < infs.size(); ++i) {
      ManifestEntry e;
      e.file = file;
      e.line = (int)i;
      e.label = infs[i].label;
      e.circuit = ec.circuit.name;
      e.root = infs[i].root;
      e.benign = ec.benign_name;
      e.trigger_kind = ec.trigger_kind == TriggerKind::Combinatorial
                           ? "combinatorial"
                           : "sequential";
      e.trigger_size = ec.trigger_size;
      built.manifest.entries.push_back(std::move(e));
    }
    built.infs.push_back(std::move(infs));
  }
  return built;
}

namespace {

bool entry_before(const ManifestEntry& a, const ManifestEntry& b) {
  return a.file != b.file ? a.file < b.file : a.line < b.line;
}

DatasetManifest take(const DatasetManifest& src, std::vector<size_t> idx,
                     const char* tag) {
  DatasetManifest out;
  out.split_tag = tag;
  out.config_hash = src.config_hash;
  for (size_t i : idx) out.entries.push_back(src.entries[i]);
  std::sort(out.entries.begin(), out.entries.end(), entry_before);
  return out;
}

}  // namespace

std::pair<DatasetManifest, DatasetManifest> split_random_shuffle(
    const DatasetManifest& manifest, double train_frac, uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw ManifestError("train_frac must lie strictly between 0 and 1");
  std::vector<size_t> train_idx, test_idx;
  for (int label = 0; label <= 1; ++label) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < manifest.entries.size(); ++i)
      if (manifest.entries[i].label == label) idx.push_back(i);
    if (idx.empty()) continue;
    Rng rng(mix_seed(seed, (uint64_t)label));
    rng.shuffle(idx);
    const size_t n_train = (size_t)(train_frac * (double)idx.size() + 0.5);
    if (n_train == 0 || n_train == idx.size())
      throw ManifestError(
          "split leaves label " + std::to_string(label) +
          " empty on one side (class size " + std::to_string(idx.size()) +
          ", train_frac " + std::to_string(train_frac) + ")");
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
    test_idx.insert(test_idx.end(), idx.begin() + n_train, idx.end());
  }
  return {take(manifest, std::move(train_idx), "train"),
          take(manifest, std::move(test_idx), "test")};
}

std::pair<DatasetManifest, DatasetManifest> split_extrapolation(
    const DatasetManifest& manifest, const std::set<std::string>& train_circuits,
    const std::set<std::string>& test_circuits, const std::set<int>& train_sizes,
    const std::set<int>& test_sizes) {
  for (const std::string& c : train_circuits)
    if (test_circuits.count(c))
      throw ManifestError("circuit '" + c + "' in both train and test sets");
  for (int s : train_sizes)
    if (test_sizes.count(s))
      throw ManifestError("trigger size " + std::to_string(s) +
                          " in both train and test sets");
  std::vector<size_t> train_idx, test_idx;
  for (size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& e = manifest.entries[i];
    if (train_circuits.count(e.benign) && train_sizes.count(e.trigger_size))
      train_idx.push_back(i);
    else if (test_circuits.count(e.benign) && test_sizes.count(e.trigger_size))
      test_idx.push_back(i);
  }
  return {take(manifest, std::move(train_idx), "train"),
          take(manifest, std::move(test_idx), "test")};
}

std::string serialize_manifest(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["split_tag"] = m.split_tag;
  j["config_hash"] = m.config_hash;
  j["counts"] = {{"benign", m.benign_count()},
                 {"trigger", m.trigger_count()}};
  auto arr = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : m.entries) {
    nlohmann::ordered_json je;
    je["file"] = e.file;
    je["line"] = e.line;
    je["label"] = e.label;
    je["circuit"] = e.circuit;
    je["root"] = e.root;
    je["benign"] = e.benign;
    je["trigger_kind"] = e.trigger_kind;
    je["trigger_size"] = e.trigger_size;
    arr.push_back(std::move(je));
  }
  j["entries"] = std::move(arr);
  return j.dump(2) + "\n";
}

DatasetManifest parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("bad manifest: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.split_tag = j.at("split_tag").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.file = je.at("file").get<std::string>();
      e.line = je.at("line").get<int>();
      e.label = je.at("label").get<int>();
      e.circuit = je.at("circuit").get<std::string>();
      e.root = je.at("root").get<NodeId>();
      e.benign = je.at("benign").get<std::string>();
      e.trigger_kind = je.at("trigger_kind").get<std::string>();
      e.trigger_size = je.at("trigger_size").get<int>();
      m.entries.push_back(std::move(e));
    }
    const int64_t b = j.at("counts").at("benign").get<int64_t>();
    const int64_t t = j.at("counts").at("trigger").get<int64_t>();
    if (b != m.benign_count() || t != m.trigger_count())
      throw ManifestError("manifest counts do not match its entries");
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

DatasetManifest read_manifest(const std::string& path) {
  return parse_manifest(read_file(path));
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
  write_file_atomic(path, serialize_manifest(m));
}

std::vector<InfGraph> load_manifest_infs(const DatasetManifest& m,
                                         const std::string& base_dir) {
  std::map<std::string, std::vector<InfGraph>> cache;
  std::vector<InfGraph> out;
  out.reserve(m.entries.size());
  for (const ManifestEntry& e : m.entries) {
    auto it = cache.find(e.file);
    if (it == cache.end())
      it = cache.emplace(e.file, read_inf_file(base_dir + "/" + e.file)).first;
    const auto& lines = it->second;
    if (e.line < 0 || (size_t)e.line >= lines.size())
      throw ManifestError("manifest entry points past end of " + e.file);
    const InfGraph& inf = lines[e.line];
    if (inf.label != e.label || inf.root != e.root)
      throw ManifestError("manifest entry disagrees with " + e.file +
                          " line " + std::to_string(e.line));
    out.push_back(inf);
  }
  return out;
}

}  // namespace gatenet
