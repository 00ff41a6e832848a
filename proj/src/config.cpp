#include "gatenet/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "gatenet/rng.hpp"
#include "json.hpp"

namespace gatenet {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

/// Pulls one required field and tracks which keys were consumed so the block
/// can reject unknown fields with a name.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(path_ + ": expected a JSON object");
  }

  const json& at(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end())
      throw ConfigError(path_ + ": missing required field '" + key + "'");
    seen_.push_back(key);
    return *it;
  }

  const json& child(const std::string& key) { return at(key); }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ConfigError(path_ + ": unknown field '" + it.key() + "'");
    }
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

template <class T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type");
  }
}

uint64_t get_seed(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !v.is_number_integer())
    throw ConfigError(where + ": seed must be a non-negative integer");
  if (v.is_number_integer() && v.get<int64_t>() < 0)
    throw ConfigError(where + ": seed must be a non-negative integer");
  return v.get<uint64_t>();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  PipelineConfig cfg;
  Block root(j, "config");
  cfg.workspace = get_as<std::string>(root.at("workspace"), "config.workspace");
  require(!cfg.workspace.empty(), "config.workspace: must not be empty");

  {
    Block gen(root.child("generation"), "generation");
    {
      Block b(gen.child("benign"), "generation.benign");
      cfg.benign.count = get_as<int>(b.at("count"), b.sub("count"));
      cfg.benign.min_cells = get_as<int>(b.at("min_cells"), b.sub("min_cells"));
      cfg.benign.max_cells = get_as<int>(b.at("max_cells"), b.sub("max_cells"));
      cfg.benign.allow_ff = get_as<bool>(b.at("allow_ff"), b.sub("allow_ff"));
      cfg.benign.seed = get_seed(b.at("seed"), b.sub("seed"));
      b.finish();
      require(cfg.benign.count >= 1, "generation.benign.count: must be >= 1");
      require(cfg.benign.min_cells >= 1,
              "generation.benign.min_cells: must be >= 1");
      require(cfg.benign.max_cells >= cfg.benign.min_cells,
              "generation.benign.max_cells: must be >= min_cells");
    }
    {
      Block t(gen.child("triggers"), "generation.triggers");
      cfg.triggers.comb_sizes =
          get_as<std::vector<int>>(t.at("comb_sizes"), t.sub("comb_sizes"));
      cfg.triggers.seq_sizes =
          get_as<std::vector<int>>(t.at("seq_sizes"), t.sub("seq_sizes"));
      cfg.triggers.per_size = get_as<int>(t.at("per_size"), t.sub("per_size"));
      cfg.triggers.seed = get_seed(t.at("seed"), t.sub("seed"));
      t.finish();
      for (int s : cfg.triggers.comb_sizes)
        require(s >= 2, "generation.triggers.comb_sizes: sizes must be >= 2");
      for (int s : cfg.triggers.seq_sizes)
        require(s >= 1 && s <= 20,
                "generation.triggers.seq_sizes: sizes must be in [1, 20]");
      require(cfg.triggers.per_size >= 1,
              "generation.triggers.per_size: must be >= 1");
      require(!cfg.triggers.comb_sizes.empty() ||
                  !cfg.triggers.seq_sizes.empty(),
              "generation.triggers: at least one size required");
    }
    {
      Block e(gen.child("embedding"), "generation.embedding");
      cfg.embedding.strategy =
          get_as<std::string>(e.at("strategy"), e.sub("strategy"));
      cfg.embedding.k = get_as<int>(e.at("k"), e.sub("k"));
      cfg.embedding.per_benign =
          get_as<int>(e.at("per_benign"), e.sub("per_benign"));
      cfg.embedding.seed = get_seed(e.at("seed"), e.sub("seed"));
      e.finish();
      require(cfg.embedding.strategy == "random" ||
                  cfg.embedding.strategy == "shallow",
              "generation.embedding.strategy: must be 'random' or 'shallow'");
      require(cfg.embedding.k >= 1, "generation.embedding.k: must be >= 1");
      require(cfg.embedding.per_benign >= 1,
              "generation.embedding.per_benign: must be >= 1");
    }
    gen.finish();
  }

  {
    Block s(root.child("sampling"), "sampling");
    cfg.sampling.benign_per_circuit = get_as<int>(
        s.at("benign_per_circuit"), s.sub("benign_per_circuit"));
    cfg.sampling.seed = get_seed(s.at("seed"), s.sub("seed"));
    s.finish();
    require(cfg.sampling.benign_per_circuit >= 1,
            "sampling.benign_per_circuit: must be >= 1");
  }

  {
    Block s(root.child("split"), "split");
    cfg.split.mode = get_as<std::string>(s.at("mode"), s.sub("mode"));
    cfg.split.train_frac =
        get_as<double>(s.at("train_frac"), s.sub("train_frac"));
    cfg.split.seed = get_seed(s.at("seed"), s.sub("seed"));
    cfg.split.train_circuits = get_as<std::vector<std::string>>(
        s.at("train_circuits"), s.sub("train_circuits"));
    cfg.split.test_circuits = get_as<std::vector<std::string>>(
        s.at("test_circuits"), s.sub("test_circuits"));
    cfg.split.train_sizes =
        get_as<std::vector<int>>(s.at("train_sizes"), s.sub("train_sizes"));
    cfg.split.test_sizes =
        get_as<std::vector<int>>(s.at("test_sizes"), s.sub("test_sizes"));
    s.finish();
    require(cfg.split.mode == "random-shuffle" ||
                cfg.split.mode == "extrapolation",
            "split.mode: must be 'random-shuffle' or 'extrapolation'");
    require(cfg.split.train_frac > 0.0 && cfg.split.train_frac < 1.0,
            "split.train_frac: must be in (0, 1)");
    if (cfg.split.mode == "extrapolation") {
      require(!cfg.split.train_circuits.empty() &&
                  !cfg.split.test_circuits.empty(),
              "split: extrapolation mode needs train and test circuit lists");
      require(!cfg.split.train_sizes.empty() && !cfg.split.test_sizes.empty(),
              "split: extrapolation mode needs train and test size lists");
    }
  }

  {
    Block t(root.child("train"), "train");
    cfg.train.tau = get_as<double>(t.at("tau"), t.sub("tau"));
    cfg.train.batch_size = get_as<int>(t.at("batch_size"), t.sub("batch_size"));
    cfg.train.epochs_pretrain =
        get_as<int>(t.at("epochs_pretrain"), t.sub("epochs_pretrain"));
    cfg.train.epochs_classify =
        get_as<int>(t.at("epochs_classify"), t.sub("epochs_classify"));
    cfg.train.learning_rate =
        get_as<double>(t.at("learning_rate"), t.sub("learning_rate"));
    cfg.train.seed = get_seed(t.at("seed"), t.sub("seed"));
    cfg.train.stratify = get_as<bool>(t.at("stratify"), t.sub("stratify"));
    cfg.train.q = get_as<int>(t.at("q"), t.sub("q"));
    cfg.train.q_proj = get_as<int>(t.at("q_proj"), t.sub("q_proj"));
    cfg.train.snapshot_epochs = get_as<std::vector<int>>(
        t.at("snapshot_epochs"), t.sub("snapshot_epochs"));
    t.finish();
    require(cfg.train.tau > 0.0, "train.tau: must be > 0");
    require(cfg.train.batch_size >= 2, "train.batch_size: must be >= 2");
    require(cfg.train.epochs_pretrain >= 1,
            "train.epochs_pretrain: must be >= 1");
    require(cfg.train.epochs_classify >= 1,
            "train.epochs_classify: must be >= 1");
    require(cfg.train.learning_rate > 0.0,
            "train.learning_rate: must be > 0");
    require(cfg.train.q >= 1 && cfg.train.q_proj >= 1,
            "train.q/q_proj: must be >= 1");
    for (int e : cfg.train.snapshot_epochs)
      require(e >= 0 && e <= cfg.train.epochs_pretrain,
              "train.snapshot_epochs: must lie in [0, epochs_pretrain]");
    require(std::is_sorted(cfg.train.snapshot_epochs.begin(),
                           cfg.train.snapshot_epochs.end()) &&
                std::adjacent_find(cfg.train.snapshot_epochs.begin(),
                                   cfg.train.snapshot_epochs.end()) ==
                    cfg.train.snapshot_epochs.end(),
            "train.snapshot_epochs: must be strictly increasing");
  }

  {
    Block b(root.child("baseline"), "baseline");
    cfg.baseline.schemes =
        get_as<std::vector<std::string>>(b.at("schemes"), b.sub("schemes"));
    cfg.baseline.cycles = get_as<int64_t>(b.at("cycles"), b.sub("cycles"));
    cfg.baseline.trees = get_as<int>(b.at("trees"), b.sub("trees"));
    cfg.baseline.seed = get_seed(b.at("seed"), b.sub("seed"));
    b.finish();
    for (const std::string& s : cfg.baseline.schemes)
      require(s == "kurihara9" || s == "hoque10",
              "baseline.schemes: must be 'kurihara9' or 'hoque10'");
    require(cfg.baseline.cycles >= 1, "baseline.cycles: must be >= 1");
    require(cfg.baseline.trees >= 1, "baseline.trees: must be >= 1");
  }

  root.finish();
  return cfg;
}

std::string serialize_config(const PipelineConfig& cfg) {
  ordered_json j;
  j["workspace"] = cfg.workspace;
  j["generation"]["benign"] = {{"count", cfg.benign.count},
                               {"min_cells", cfg.benign.min_cells},
                               {"max_cells", cfg.benign.max_cells},
                               {"allow_ff", cfg.benign.allow_ff},
                               {"seed", cfg.benign.seed}};
  j["generation"]["triggers"] = {{"comb_sizes", cfg.triggers.comb_sizes},
                                 {"seq_sizes", cfg.triggers.seq_sizes},
                                 {"per_size", cfg.triggers.per_size},
                                 {"seed", cfg.triggers.seed}};
  j["generation"]["embedding"] = {{"strategy", cfg.embedding.strategy},
                                  {"k", cfg.embedding.k},
                                  {"per_benign", cfg.embedding.per_benign},
                                  {"seed", cfg.embedding.seed}};
  j["sampling"] = {{"benign_per_circuit", cfg.sampling.benign_per_circuit},
                   {"seed", cfg.sampling.seed}};
  j["split"] = {{"mode", cfg.split.mode},
                {"train_frac", cfg.split.train_frac},
                {"seed", cfg.split.seed},
                {"train_circuits", cfg.split.train_circuits},
                {"test_circuits", cfg.split.test_circuits},
                {"train_sizes", cfg.split.train_sizes},
                {"test_sizes", cfg.split.test_sizes}};
  j["train"] = {{"tau", cfg.train.tau},
                {"batch_size", cfg.train.batch_size},
                {"epochs_pretrain", cfg.train.epochs_pretrain},
                {"epochs_classify", cfg.train.epochs_classify},
                {"learning_rate", cfg.train.learning_rate},
                {"seed", cfg.train.seed},
                {"stratify", cfg.train.stratify},
                {"q", cfg.train.q},
                {"q_proj", cfg.train.q_proj},
                {"snapshot_epochs", cfg.train.snapshot_epochs}};
  j["baseline"] = {{"schemes", cfg.baseline.schemes},
                   {"cycles", cfg.baseline.cycles},
                   {"trees", cfg.baseline.trees},
                   {"seed", cfg.baseline.seed}};
  return j.dump(2) + "\n";
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string config_hash(const PipelineConfig& cfg) {
  uint64_t h = fnv1a64(serialize_config(cfg));
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

void apply_seed_override(PipelineConfig& cfg, uint64_t master_seed) {
  auto stage = [&](const char* name) {
    return mix_seed(master_seed, fnv1a64(name));
  };
  cfg.benign.seed = stage("benign");
  cfg.triggers.seed = stage("triggers");
  cfg.embedding.seed = stage("embedding");
  cfg.sampling.seed = stage("sampling");
  cfg.split.seed = stage("split");
  cfg.train.seed = stage("train");
  cfg.baseline.seed = stage("baseline");
}

}  // namespace gatenet
