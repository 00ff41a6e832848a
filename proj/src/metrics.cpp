#include "gatenet/metrics.hpp"

#include <stdexcept>

namespace gatenet {

EvalReport compute_metrics(const std::vector<int>& predicted,
                           const std::vector<int>& truth,
                           const std::string& tag) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("compute_metrics: length mismatch");
  EvalReport r;
  r.tag = tag;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] != 0 && predicted[i] != 1)
      throw std::invalid_argument("compute_metrics: prediction not 0/1");
    if (truth[i] != 0 && truth[i] != 1)
      throw std::invalid_argument("compute_metrics: truth not 0/1");
    if (predicted[i] == 1) {
      (truth[i] == 1 ? r.tp : r.fp)++;
    } else {
      (truth[i] == 1 ? r.fn : r.tn)++;
    }
  }
  r.precision = (r.tp + r.fp) ? (double)r.tp / (double)(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) ? (double)r.tp / (double)(r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall > 0.0)
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

}  // namespace gatenet
