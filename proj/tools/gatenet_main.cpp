#include <cstdio>
#include <exception>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "gatenet/config.hpp"
#include "gatenet/embedding.hpp"
#include "gatenet/manifest.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/pipeline.hpp"
#include "gatenet/trigger.hpp"

namespace {

using gatenet::PipelineOptions;

int dispatch(const std::string& cmd, const PipelineOptions& opt) {
  using namespace gatenet;
  if (cmd == "gen-benign") run_gen_benign(opt);
  else if (cmd == "gen-triggers") run_gen_triggers(opt);
  else if (cmd == "embed") run_embed(opt);
  else if (cmd == "extract-inf") run_extract_inf(opt);
  else if (cmd == "split") run_split(opt);
  else if (cmd == "pretrain") run_pretrain(opt);
  else if (cmd == "train") run_train(opt);
  else if (cmd == "train-nocont") run_train_nocont(opt);
  else if (cmd == "eval") run_eval(opt);
  else if (cmd == "baseline extract") run_baseline_extract(opt);
  else if (cmd == "baseline train") run_baseline_train(opt);
  else if (cmd == "baseline eval") run_baseline_eval(opt);
  else if (cmd == "analyze pca") run_analyze_pca(opt);
  else if (cmd == "analyze inf-lengths") run_analyze_inf_lengths(opt);
  else if (cmd == "report") run_report(opt);
  else if (cmd == "all") run_all(opt);
  else return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-trojan trigger detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string workspace_override;
  uint64_t seed_override = 0;
  int jobs = 1;
  bool force = false;
  app.add_option("--config", config_path, "pipeline config JSON file")
      ->required();
  auto* seed_opt = app.add_option("--seed", seed_override,
                                  "master seed; rederives every stage seed");
  app.add_option("--workspace", workspace_override,
                 "override the workspace path from the config");
  app.add_option("--jobs", jobs, "worker threads for parallel stages")
      ->check(CLI::Range(1, 256));
  app.add_flag("--force", force,
               "proceed despite a config-hash mismatch in the workspace");

  std::string cmd;
  const std::pair<const char*, const char*> flat[] = {
      {"gen-benign", "generate benign host circuits"},
      {"gen-triggers", "synthesize trigger circuits"},
      {"embed", "insert triggers into benign hosts"},
      {"extract-inf", "extract inverse-node-fanin graphs"},
      {"split", "partition the dataset into train/test"},
      {"pretrain", "contrastive pretraining of the encoder"},
      {"train", "train the classifier head on the frozen encoder"},
      {"train-nocont", "train the no-pretraining ablation end to end"},
      {"eval", "score the trained models on the test split"},
      {"report", "assemble the combined metrics report"},
      {"all", "run every stage in order"},
  };
  for (auto [name, desc] : flat) {
    app.add_subcommand(name, desc)->callback([&cmd, name] { cmd = name; });
  }
  auto* baseline = app.add_subcommand("baseline", "per-net baseline detectors");
  baseline->require_subcommand(1);
  baseline->fallthrough();
  const std::pair<const char*, const char*> bsub[] = {
      {"extract", "compute per-net feature tables"},
      {"train", "fit the ensemble classifiers"},
      {"eval", "score the ensembles on the test split"},
  };
  for (auto [name, desc] : bsub) {
    baseline->add_subcommand(name, desc)->callback([&cmd, name] {
      cmd = std::string("baseline ") + name;
    });
  }
  auto* analyze = app.add_subcommand("analyze", "qualitative exports");
  analyze->require_subcommand(1);
  analyze->fallthrough();
  const std::pair<const char*, const char*> asub[] = {
      {"pca", "project test embeddings per snapshot epoch"},
      {"inf-lengths", "histogram graph sizes by label"},
  };
  for (auto [name, desc] : asub) {
    analyze->add_subcommand(name, desc)->callback([&cmd, name] {
      cmd = std::string("analyze ") + name;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    PipelineOptions opt;
    opt.cfg = gatenet::load_config(config_path);
    if (!workspace_override.empty()) opt.cfg.workspace = workspace_override;
    if (seed_opt->count() > 0)
      gatenet::apply_seed_override(opt.cfg, seed_override);
    opt.jobs = jobs;
    opt.force = force;
    return dispatch(cmd, opt);
  } catch (const gatenet::ConfigError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gatenet::PipelineError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gatenet::IoError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gatenet::ManifestError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gatenet::EmbedError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gatenet::TriggerError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gatenet::ValidationError& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
