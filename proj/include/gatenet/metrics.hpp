#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gatenet {

/// Confusion counts plus derived scores for one detector on one dataset.
/// Positive class = trigger (label 1).
struct EvalReport {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::string tag;

  bool operator==(const EvalReport&) const = default;
};

/// Ratios with zero denominators evaluate to 0 rather than NaN, so a
/// degenerate detector still produces a comparable row.
EvalReport compute_metrics(const std::vector<int>& predicted,
                           const std::vector<int>& truth,
                           const std::string& tag = "");

}  // namespace gatenet
