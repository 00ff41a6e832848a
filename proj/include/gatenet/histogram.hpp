#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gatenet {

/// Two per-label histograms over a shared equal-width binning.
struct LabelHistogram {
  double lo = 0.0;
  double width = 1.0;
  int bins = 0;
  std::vector<int64_t> count0;
  std::vector<int64_t> count1;
  int64_t total0 = 0;
  int64_t total1 = 0;
};

/// Bins span [min, max] of all values jointly; a degenerate range (min ==
/// max) uses width 1. The top edge closes the last bin.
LabelHistogram histogram_by_label(const std::vector<double>& values,
                                  const std::vector<int>& labels,
                                  int bins = 50);

/// Sum over bins of min(p0, p1) where p is the per-label bin probability.
/// 1 means identical distributions, 0 disjoint. Both labels must be present.
double overlap_coefficient(const LabelHistogram& h);

/// CSV with header label,bin_low,bin_high,count; zero-count bins omitted.
void write_histogram_csv(const std::filesystem::path& path,
                         const LabelHistogram& h);

}  // namespace gatenet
