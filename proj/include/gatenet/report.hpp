#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gatenet/metrics.hpp"

namespace gatenet {

struct MetricsRow {
  std::string experiment;
  std::string model;
  EvalReport report;

  bool operator==(const MetricsRow&) const = default;
};

/// CSV with header experiment,model,precision,recall,f1,tp,fp,fn,tn.
/// Ratios print with 6 decimals; parsing restores them at that precision.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

/// Plain-text comparison table (Expt. Type | Model | Precision | Recall |
/// F1) plus a relative-F1 column against the gatenet row of the same
/// experiment: (F1_gatenet - F1_row) / F1_row.
std::string report_text(const std::vector<MetricsRow>& rows);

}  // namespace gatenet
