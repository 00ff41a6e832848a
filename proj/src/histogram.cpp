#include "gatenet/histogram.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "gatenet/netlist_io.hpp"

namespace gatenet {

LabelHistogram histogram_by_label(const std::vector<double>& values,
                                  const std::vector<int>& labels, int bins) {
  if (values.size() != labels.size())
    throw std::invalid_argument("histogram_by_label: length mismatch");
  if (values.empty())
    throw std::invalid_argument("histogram_by_label: no values");
  if (bins < 1) throw std::invalid_argument("histogram_by_label: bins < 1");

  LabelHistogram h;
  h.bins = bins;
  h.count0.assign((size_t)bins, 0);
  h.count1.assign((size_t)bins, 0);
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  h.lo = lo;
  h.width = hi > lo ? (hi - lo) / (double)bins : 1.0;

  for (size_t i = 0; i < values.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("histogram_by_label: labels must be 0/1");
    int b = (int)((values[i] - lo) / h.width);
    b = std::clamp(b, 0, bins - 1);
    if (labels[i] == 0) {
      h.count0[(size_t)b]++;
      h.total0++;
    } else {
      h.count1[(size_t)b]++;
      h.total1++;
    }
  }
  return h;
}

double overlap_coefficient(const LabelHistogram& h) {
  if (h.total0 == 0 || h.total1 == 0)
    throw std::invalid_argument("overlap_coefficient: both labels required");
  double overlap = 0;
  for (int b = 0; b < h.bins; ++b) {
    double p0 = (double)h.count0[(size_t)b] / (double)h.total0;
    double p1 = (double)h.count1[(size_t)b] / (double)h.total1;
    overlap += std::min(p0, p1);
  }
  return overlap;
}

void write_histogram_csv(const std::filesystem::path& path,
                         const LabelHistogram& h) {
  std::string out = "label,bin_low,bin_high,count\n";
  char buf[128];
  auto emit = [&](int label, const std::vector<int64_t>& counts) {
    for (int b = 0; b < h.bins; ++b) {
      if (counts[(size_t)b] == 0) continue;
      snprintf(buf, sizeof buf, "%d,%.9f,%.9f,%lld\n", label,
               h.lo + h.width * b, h.lo + h.width * (b + 1),
               (long long)counts[(size_t)b]);
      out += buf;
    }
  };
  emit(0, h.count0);
  emit(1, h.count1);
  write_file_atomic(path, out);
}

}  // namespace gatenet
