#include "gatenet/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "gatenet/baseline_features.hpp"
#include "gatenet/benign_gen.hpp"
#include "gatenet/checkpoint.hpp"
#include "gatenet/embedding.hpp"
#include "gatenet/ensemble.hpp"
#include "gatenet/histogram.hpp"
#include "gatenet/manifest.hpp"
#include "gatenet/metrics.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/pca.hpp"
#include "gatenet/report.hpp"
#include "gatenet/rng.hpp"
#include "gatenet/trigger.hpp"
#include "json.hpp"

namespace gatenet {
namespace {

namespace fs = std::filesystem;

/// Deletes files a failed stage created, leaving pre-existing artifacts
/// alone. commit() disarms it.
class StageGuard {
 public:
  ~StageGuard() {
    if (committed_) return;
    for (const fs::path& p : created_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  fs::path track(const fs::path& p) {
    if (!fs::exists(p)) created_.push_back(p);
    return p;
  }

  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> created_;
  bool committed_ = false;
};

void parallel_for(int jobs, size_t n, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  jobs = std::max(1, std::min(jobs, (int)std::min<size_t>(n, 256)));
  if (jobs == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve((size_t)jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

fs::path ws_root(const PipelineOptions& opt) {
  return fs::path(opt.cfg.workspace);
}

std::string benign_name(int i) {
  char buf[32];
  snprintf(buf, sizeof buf, "benign_%02d", i);
  return buf;
}

std::vector<std::string> trigger_names(const PipelineConfig& cfg) {
  std::vector<std::string> names;
  for (int size : cfg.triggers.comb_sizes)
    for (int j = 0; j < cfg.triggers.per_size; ++j)
      names.push_back("trig_comb_s" + std::to_string(size) + "_" +
                      std::to_string(j));
  for (int size : cfg.triggers.seq_sizes)
    for (int j = 0; j < cfg.triggers.per_size; ++j)
      names.push_back("trig_seq_s" + std::to_string(size) + "_" +
                      std::to_string(j));
  return names;
}

struct EmbedPlanItem {
  std::string benign;
  std::string trigger;
  std::string stem;  ///< also the embedded circuit name
};

std::vector<EmbedPlanItem> embed_plan(const PipelineConfig& cfg) {
  std::vector<std::string> trigs = trigger_names(cfg);
  if (cfg.embedding.per_benign > (int)trigs.size())
    throw PipelineError(
        "embedding.per_benign exceeds the number of generated triggers (" +
        std::to_string(trigs.size()) + "); stems would collide");
  std::vector<EmbedPlanItem> plan;
  for (int i = 0; i < cfg.benign.count; ++i) {
    std::string bn = benign_name(i);
    for (int j = 0; j < cfg.embedding.per_benign; ++j) {
      const std::string& tn =
          trigs[(size_t)(i * cfg.embedding.per_benign + j) % trigs.size()];
      plan.push_back({bn, tn, "emb_" + bn + "_" + tn});
    }
  }
  return plan;
}

std::vector<EmbeddedCircuit> load_all_embedded(const PipelineOptions& opt) {
  auto plan = embed_plan(opt.cfg);
  std::vector<EmbeddedCircuit> out(plan.size());
  fs::path dir = ws_root(opt) / "embedded";
  parallel_for(opt.jobs, plan.size(), [&](size_t i) {
    out[i] = load_embedded((dir / (plan[i].stem + ".circuit.json")).string(),
                           (dir / (plan[i].stem + ".embed.json")).string());
  });
  return out;
}

DatasetManifest read_split(const PipelineOptions& opt, const char* tag) {
  DatasetManifest m = read_manifest(
      (ws_root(opt) / "splits" / (std::string(tag) + ".json")).string());
  if (!opt.force && m.config_hash != config_hash(opt.cfg))
    throw PipelineError(std::string("splits/") + tag +
                        ".json was produced by a different config; rerun "
                        "earlier stages or pass --force");
  return m;
}

Checkpoint load_stage_checkpoint(const PipelineOptions& opt,
                                 const std::string& rel) {
  Checkpoint ck = load_checkpoint(ws_root(opt) / rel);
  if (!opt.force &&
      config_hash(parse_config(ck.config_json)) != config_hash(opt.cfg))
    throw PipelineError(rel +
                        " was produced by a different config; rerun earlier "
                        "stages or pass --force");
  return ck;
}

std::string scheme_model_name(const std::string& scheme) {
  return scheme == "kurihara9" ? "kurihara" : "hoque";
}

void write_loss_csv(const fs::path& path, const std::vector<double>& losses) {
  std::string out = "epoch,loss\n";
  char buf[64];
  for (size_t i = 0; i < losses.size(); ++i) {
    snprintf(buf, sizeof buf, "%zu,%.9f\n", i + 1, losses[i]);
    out += buf;
  }
  write_file_atomic(path, out);
}

}  // namespace

void ensure_workspace(const PipelineOptions& opt) {
  fs::path ws = ws_root(opt);
  for (const char* d : {"circuits", "triggers", "embedded", "infs", "splits",
                        "models", "reports", "features"})
    fs::create_directories(ws / d);

  std::string hash = config_hash(opt.cfg);
  fs::path prov = ws / "provenance.json";
  if (fs::exists(prov) && !opt.force) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(prov));
    } catch (const std::exception&) {
      throw PipelineError(prov.string() +
                          " is unreadable; pass --force to restamp");
    }
    std::string old = j.value("config_hash", "");
    if (old != hash)
      throw PipelineError("workspace " + ws.string() +
                          " was produced by config " + old +
                          " but this run uses " + hash +
                          "; use a fresh workspace or pass --force");
  }
  nlohmann::ordered_json j;
  j["config_hash"] = hash;
  j["config"] = nlohmann::ordered_json::parse(serialize_config(opt.cfg));
  write_file_atomic(prov, j.dump(2) + "\n");
}

void run_gen_benign(const PipelineOptions& opt) {
  ensure_workspace(opt);
  const auto& bc = opt.cfg.benign;
  StageGuard guard;
  fs::path dir = ws_root(opt) / "circuits";
  std::vector<Circuit> circuits((size_t)bc.count);
  parallel_for(opt.jobs, (size_t)bc.count, [&](size_t i) {
    uint64_t sub = mix_seed(bc.seed, (uint64_t)i);
    Rng rng(sub);
    int cells = (int)rng.uniform_int(bc.min_cells, bc.max_cells);
    circuits[i] = gen_random_benign(cells, mix_seed(sub, 1), bc.allow_ff);
    circuits[i].name = benign_name((int)i);
  });
  for (const Circuit& c : circuits)
    write_netlist(c, guard.track(dir / (c.name + ".circuit.json")));
  guard.commit();
}

void run_gen_triggers(const PipelineOptions& opt) {
  ensure_workspace(opt);
  const auto& tc = opt.cfg.triggers;
  StageGuard guard;
  fs::path dir = ws_root(opt) / "triggers";

  auto emit = [&](Trigger t, const std::string& name) {
    t.circuit.name = name;
    save_trigger(t, guard.track(dir / (name + ".circuit.json")),
                 guard.track(dir / (name + ".trigger.json")));
  };
  for (int size : tc.comb_sizes) {
    for (int j = 0; j < tc.per_size; ++j) {
      std::string name =
          "trig_comb_s" + std::to_string(size) + "_" + std::to_string(j);
      emit(gen_comb_trigger(size, mix_seed(tc.seed, fnv1a64(name))), name);
    }
  }
  for (int size : tc.seq_sizes) {
    for (int j = 0; j < tc.per_size; ++j) {
      std::string name =
          "trig_seq_s" + std::to_string(size) + "_" + std::to_string(j);
      Rng rng(mix_seed(tc.seed, fnv1a64(name)));
      std::string seq;
      for (int b = 0; b < (1 << size); ++b) seq += rng.bit() ? '1' : '0';
      emit(gen_seq_trigger(seq), name);
    }
  }
  guard.commit();
}

void run_embed(const PipelineOptions& opt) {
  ensure_workspace(opt);
  const auto& ec = opt.cfg.embedding;
  StageGuard guard;
  fs::path ws = ws_root(opt);

  std::map<std::string, Circuit> benigns;
  for (int i = 0; i < opt.cfg.benign.count; ++i) {
    std::string bn = benign_name(i);
    benigns[bn] = read_netlist(ws / "circuits" / (bn + ".circuit.json"));
  }
  std::map<std::string, Trigger> triggers;
  for (const std::string& tn : trigger_names(opt.cfg)) {
    triggers[tn] =
        load_trigger(ws / "triggers" / (tn + ".circuit.json"),
                     ws / "triggers" / (tn + ".trigger.json"));
  }

  EmbedStrategy strategy = ec.strategy == "random"
                               ? EmbedStrategy::random()
                               : EmbedStrategy::shallow(ec.k);
  auto plan = embed_plan(opt.cfg);
  std::vector<EmbeddedCircuit> embedded(plan.size());
  parallel_for(opt.jobs, plan.size(), [&](size_t i) {
    embedded[i] = embed_trigger(benigns.at(plan[i].benign),
                                triggers.at(plan[i].trigger), strategy,
                                mix_seed(ec.seed, fnv1a64(plan[i].stem)),
                                plan[i].stem);
  });
  for (size_t i = 0; i < plan.size(); ++i) {
    guard.track(ws / "embedded" / (plan[i].stem + ".circuit.json"));
    guard.track(ws / "embedded" / (plan[i].stem + ".embed.json"));
    save_embedded(embedded[i], (ws / "embedded" / plan[i].stem).string());
  }
  guard.commit();
}

void run_extract_inf(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  std::vector<EmbeddedCircuit> embedded = load_all_embedded(opt);
  BuiltDataset built = build_dataset(
      embedded, opt.cfg.sampling.benign_per_circuit, opt.cfg.sampling.seed);
  built.manifest.config_hash = config_hash(opt.cfg);

  for (size_t i = 0; i < embedded.size(); ++i) {
    fs::path file =
        guard.track(ws / "infs" / (embedded[i].circuit.name + ".jsonl"));
    write_inf_file(built.infs[i], file.string());
  }
  write_manifest(built.manifest,
                 guard.track(ws / "infs" / "manifest.json").string());
  guard.commit();
}

void run_split(const PipelineOptions& opt) {
  ensure_workspace(opt);
  const auto& sc = opt.cfg.split;
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest m = read_manifest((ws / "infs" / "manifest.json").string());
  if (!opt.force && m.config_hash != config_hash(opt.cfg))
    throw PipelineError(
        "infs/manifest.json was produced by a different config; rerun "
        "extract-inf or pass --force");

  std::pair<DatasetManifest, DatasetManifest> parts;
  if (sc.mode == "random-shuffle") {
    parts = split_random_shuffle(m, sc.train_frac, sc.seed);
  } else {
    parts = split_extrapolation(
        m, {sc.train_circuits.begin(), sc.train_circuits.end()},
        {sc.test_circuits.begin(), sc.test_circuits.end()},
        {sc.train_sizes.begin(), sc.train_sizes.end()},
        {sc.test_sizes.begin(), sc.test_sizes.end()});
  }
  write_manifest(parts.first,
                 guard.track(ws / "splits" / "train.json").string());
  write_manifest(parts.second,
                 guard.track(ws / "splits" / "test.json").string());
  guard.commit();
}

void run_pretrain(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest train = read_split(opt, "train");
  std::vector<InfGraph> infs = load_manifest_infs(train, ws.string());
  PretrainResult res = pretrain_contrastive(infs, opt.cfg.train);

  std::string cfg_json = serialize_config(opt.cfg);
  save_checkpoint(guard.track(ws / "models" / "encoder.ckpt"),
                  {res.encoder, {}, false, cfg_json});
  for (const auto& [epoch, state] : res.snapshots) {
    save_checkpoint(
        guard.track(ws / "models" /
                    ("encoder_epoch" + std::to_string(epoch) + ".ckpt")),
        {state, {}, false, cfg_json});
  }
  write_loss_csv(guard.track(ws / "reports" / "pretrain_loss.csv"),
                 res.loss_log);
  guard.commit();
}

void run_train(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  Checkpoint enc_ck = load_stage_checkpoint(opt, "models/encoder.ckpt");
  DatasetManifest train = read_split(opt, "train");
  std::vector<InfGraph> infs = load_manifest_infs(train, ws.string());
  ClassifierResult res = train_classifier(enc_ck.encoder, infs, opt.cfg.train);

  save_checkpoint(guard.track(ws / "models" / "gatenet.ckpt"),
                  {enc_ck.encoder, res.fcn, true, serialize_config(opt.cfg)});
  guard.commit();
}

void run_train_nocont(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest train = read_split(opt, "train");
  std::vector<InfGraph> infs = load_manifest_infs(train, ws.string());
  NoContResult res = train_nocont(infs, opt.cfg.train);

  save_checkpoint(guard.track(ws / "models" / "nocont.ckpt"),
                  {res.encoder, res.fcn, true, serialize_config(opt.cfg)});
  guard.commit();
}

void run_eval(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest test = read_split(opt, "test");
  std::vector<InfGraph> infs = load_manifest_infs(test, ws.string());
  std::vector<int> truth(infs.size());
  for (size_t i = 0; i < infs.size(); ++i) truth[i] = infs[i].label;

  std::vector<MetricsRow> rows;
  for (const char* which : {"gatenet", "nocont"}) {
    Checkpoint ck =
        load_stage_checkpoint(opt, std::string("models/") + which + ".ckpt");
    std::vector<int> pred(infs.size());
    parallel_for(opt.jobs, infs.size(), [&](size_t i) {
      pred[i] = predict(infs[i], ck.encoder, ck.fcn).second;
    });
    rows.push_back({opt.cfg.split.mode, which,
                    compute_metrics(pred, truth,
                                    opt.cfg.split.mode + "/" + which)});
  }
  write_metrics_csv(guard.track(ws / "reports" / "metrics_model.csv"), rows);
  guard.commit();
}

void run_baseline_extract(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  std::vector<EmbeddedCircuit> embedded = load_all_embedded(opt);
  for (const std::string& scheme : opt.cfg.baseline.schemes) {
    for (const EmbeddedCircuit& ec : embedded)
      guard.track(ws / "features" / (ec.circuit.name + "." + scheme + ".csv"));
    parallel_for(opt.jobs, embedded.size(), [&](size_t i) {
      const EmbeddedCircuit& ec = embedded[i];
      std::vector<NetFeatureVector> rows;
      if (scheme == "kurihara9") {
        rows = kurihara_features_all(ec.circuit);
      } else {
        SwitchingProfile sp = simulate_switching(
            ec.circuit, opt.cfg.baseline.cycles,
            mix_seed(opt.cfg.baseline.seed, fnv1a64(ec.circuit.name)));
        rows = hoque_features_all(ec.circuit, sp);
      }
      std::set<NodeId> trig(ec.trigger_node_ids.begin(),
                            ec.trigger_node_ids.end());
      std::vector<int> labels(rows.size());
      for (size_t r = 0; r < rows.size(); ++r)
        labels[r] = trig.count(rows[r].net_id) ? 1 : 0;
      write_feature_csv(
          ws / "features" / (ec.circuit.name + "." + scheme + ".csv"), rows,
          labels);
    });
  }
  guard.commit();
}

void run_baseline_train(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest train = read_split(opt, "train");
  std::set<std::string> circuits;
  for (const ManifestEntry& e : train.entries) circuits.insert(e.circuit);

  for (const std::string& scheme : opt.cfg.baseline.schemes) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (const std::string& name : circuits) {
      FeatureFile ff =
          read_feature_csv(ws / "features" / (name + "." + scheme + ".csv"));
      for (size_t r = 0; r < ff.rows.size(); ++r) {
        x.push_back(ff.rows[r].values);
        y.push_back(ff.labels[r]);
      }
    }
    EnsembleConfig ecfg{opt.cfg.baseline.trees,
                        mix_seed(opt.cfg.baseline.seed, fnv1a64(scheme))};
    EnsembleModel model = train_ensemble(x, y, ecfg, scheme);
    save_ensemble(
        guard.track(ws / "models" / ("baseline_" + scheme + ".json")), model);
  }
  guard.commit();
}

void run_baseline_eval(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest test = read_split(opt, "test");
  std::vector<InfGraph> infs = load_manifest_infs(test, ws.string());
  std::vector<int> truth(infs.size());
  for (size_t i = 0; i < infs.size(); ++i) truth[i] = infs[i].label;

  for (const std::string& scheme : opt.cfg.baseline.schemes) {
    EnsembleModel model =
        load_ensemble(ws / "models" / ("baseline_" + scheme + ".json"));
    std::map<std::string, FeatureFile> features;
    for (const ManifestEntry& e : test.entries)
      if (!features.count(e.circuit))
        features[e.circuit] = read_feature_csv(
            ws / "features" / (e.circuit + "." + scheme + ".csv"));

    std::vector<int> pred(infs.size());
    parallel_for(opt.jobs, infs.size(), [&](size_t i) {
      pred[i] = classify_inf_by_net_votes(
          model, infs[i], features.at(test.entries[i].circuit).rows);
    });
    std::string model_name = scheme_model_name(scheme);
    std::vector<MetricsRow> rows{
        {opt.cfg.split.mode, model_name,
         compute_metrics(pred, truth, opt.cfg.split.mode + "/" + model_name)}};
    write_metrics_csv(
        guard.track(ws / "reports" / ("metrics_baseline_" + scheme + ".csv")),
        rows);
  }
  guard.commit();
}

void run_analyze_pca(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest test = read_split(opt, "test");
  std::vector<InfGraph> infs = load_manifest_infs(test, ws.string());

  std::vector<PcaRow> rows;
  for (int epoch : opt.cfg.train.snapshot_epochs) {
    Checkpoint ck = load_stage_checkpoint(
        opt, "models/encoder_epoch" + std::to_string(epoch) + ".ckpt");
    Matrix z = encode_dataset(infs, ck.encoder, opt.jobs);
    Pca2d pca = pca_2d(z);
    for (size_t i = 0; i < infs.size(); ++i) {
      rows.push_back({test.entries[i].circuit + ":" +
                          std::to_string(test.entries[i].root),
                      infs[i].label, pca.projected.at((int)i, 0),
                      pca.projected.at((int)i, 1), epoch});
    }
  }
  write_pca_csv(guard.track(ws / "reports" / "pca.csv"), rows);
  guard.commit();
}

void run_analyze_inf_lengths(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  DatasetManifest m = read_manifest((ws / "infs" / "manifest.json").string());
  if (!opt.force && m.config_hash != config_hash(opt.cfg))
    throw PipelineError(
        "infs/manifest.json was produced by a different config; rerun "
        "extract-inf or pass --force");
  std::vector<InfGraph> infs = load_manifest_infs(m, ws.string());
  std::vector<double> lengths(infs.size());
  std::vector<int> labels(infs.size());
  for (size_t i = 0; i < infs.size(); ++i) {
    lengths[i] = (double)infs[i].node_count();
    labels[i] = infs[i].label;
  }
  LabelHistogram h = histogram_by_label(lengths, labels, 50);
  write_histogram_csv(guard.track(ws / "reports" / "inf_lengths.csv"), h);
  guard.commit();
}

void run_report(const PipelineOptions& opt) {
  ensure_workspace(opt);
  StageGuard guard;
  fs::path ws = ws_root(opt);

  std::vector<MetricsRow> rows =
      read_metrics_csv(ws / "reports" / "metrics_model.csv");
  for (const std::string& scheme : opt.cfg.baseline.schemes) {
    auto extra = read_metrics_csv(ws / "reports" /
                                  ("metrics_baseline_" + scheme + ".csv"));
    rows.insert(rows.end(), extra.begin(), extra.end());
  }
  write_metrics_csv(guard.track(ws / "reports" / "report.csv"), rows);
  write_file_atomic(guard.track(ws / "reports" / "report.txt"),
                    report_text(rows));
  guard.commit();
}

void run_all(const PipelineOptions& opt) {
  run_gen_benign(opt);
  run_gen_triggers(opt);
  run_embed(opt);
  run_extract_inf(opt);
  run_split(opt);
  run_pretrain(opt);
  run_train(opt);
  run_train_nocont(opt);
  run_eval(opt);
  run_baseline_extract(opt);
  run_baseline_train(opt);
  run_baseline_eval(opt);
  run_analyze_pca(opt);
  run_analyze_inf_lengths(opt);
  run_report(opt);
}

}  // namespace gatenet
