#pragma once

#include <filesystem>
#include <stdexcept>

#include "gatenet/config.hpp"

namespace gatenet {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineOptions {
  PipelineConfig cfg;
  int jobs = 1;
  bool force = false;  ///< accept a workspace stamped with a different config
};

/// Creates the stage directories and stamps provenance.json with the config
/// hash. A workspace already stamped with a different hash is an error
/// unless force is set.
void ensure_workspace(const PipelineOptions& opt);

void run_gen_benign(const PipelineOptions& opt);
void run_gen_triggers(const PipelineOptions& opt);
void run_embed(const PipelineOptions& opt);
void run_extract_inf(const PipelineOptions& opt);
void run_split(const PipelineOptions& opt);
void run_pretrain(const PipelineOptions& opt);
void run_train(const PipelineOptions& opt);
void run_train_nocont(const PipelineOptions& opt);
void run_eval(const PipelineOptions& opt);
void run_baseline_extract(const PipelineOptions& opt);
void run_baseline_train(const PipelineOptions& opt);
void run_baseline_eval(const PipelineOptions& opt);
void run_analyze_pca(const PipelineOptions& opt);
void run_analyze_inf_lengths(const PipelineOptions& opt);
void run_report(const PipelineOptions& opt);
/// Every stage above, in pipeline order.
void run_all(const PipelineOptions& opt);

}  // namespace gatenet
