#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gatenet/circuit.hpp"

namespace gatenet {

/// One per-net feature row for a baseline detector.
struct NetFeatureVector {
  std::string scheme;  ///< "kurihara9" or "hoque10"
  NodeId net_id = 0;
  std::vector<double> values;

  bool operator==(const NetFeatureVector&) const = default;
};

inline constexpr int kKuriharaDim = 9;
inline constexpr int kHoqueDim = 10;

/// Per-net switching statistics from cycle simulation. signal_rate counts
/// transitions per cycle; toggle_rate is the same count normalized per
/// half-clock (factor 2); min_toggle_rate takes the minimum over the net's
/// full input-side cone including the net itself.
struct SwitchingProfile {
  std::vector<double> static_probability;
  std::vector<double> signal_rate;
  std::vector<double> toggle_rate;
  std::vector<double> min_toggle_rate;
  int64_t cycles = 0;
};

/// Drives primary inputs with independent uniform bits each cycle and
/// accumulates per-net statistics over `cycles` cycles. Flipflops reset to 0.
SwitchingProfile simulate_switching(const Circuit& c, int64_t cycles,
                                    uint64_t seed);

/// All distinct directed simple cycles of length <= max_len, each reported
/// once, rooted at its minimum node id.
std::vector<std::vector<NodeId>> simple_cycles_up_to(const Circuit& c,
                                                     int max_len);

/// Structural features: [fan-in nodes <=4 back, <=5 back, flipflops <=4 back,
/// flipflops <=3 fwd, <=4 fwd, cycles len<=4 touching the 4-level back cone,
/// cycles len<=5 touching the 5-level fwd cone, min levels to a primary
/// input, min levels to a flipflop either side]. Distances count edges;
/// missing targets encode as node_count()+1.
NetFeatureVector kurihara_features(const Circuit& c, NodeId net);
std::vector<NetFeatureVector> kurihara_features_all(const Circuit& c);

/// Structural + switching features: [fan-in, fan-out, driver type index,
/// min dist from primary input, min dist to primary output, static
/// probability, signal rate, toggle rate, min toggle rate, 1.0].
NetFeatureVector hoque_features(const Circuit& c, NodeId net,
                                const SwitchingProfile& sp);
std::vector<NetFeatureVector> hoque_features_all(const Circuit& c,
                                                 const SwitchingProfile& sp);

struct FeatureFile {
  std::vector<NetFeatureVector> rows;
  std::vector<int> labels;
};

/// CSV with header net_id,scheme,f1..fN,label; one file per circuit.
void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<NetFeatureVector>& rows,
                       const std::vector<int>& labels);
FeatureFile read_feature_csv(const std::filesystem::path& path);

}  // namespace gatenet
