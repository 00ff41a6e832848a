#pragma once

#include <cstdint>
#include <vector>

#include "gatenet/circuit.hpp"

namespace gatenet {

/// Precomputed evaluation order for cycle simulation. Flipflop outputs are
/// state variables available at cycle start, so the combinational order only
/// respects edges whose source is not a flipflop (validate() guarantees that
/// subgraph is acyclic).
struct SimSchedule {
  explicit SimSchedule(const Circuit& c);

  const Circuit* circuit;
  std::vector<std::vector<NodeId>> fanin;
  std::vector<NodeId> comb_order;  ///< non-INPUT, non-flipflop nodes
  std::vector<NodeId> dffs;
};

/// Cycle-accurate simulator over lane bundles: every bit of Word is one
/// independent stream (Word=uint8_t gives 8 lanes, uint64_t gives 64).
/// Flipflops output the previous cycle's data-pin value; reset state is 0.
template <class Word>
class CycleSim {
 public:
  explicit CycleSim(const SimSchedule& s)
      : s_(&s),
        values_((size_t)s.circuit->node_count(), 0),
        state_(s.dffs.size(), 0) {}

  void reset() {
    std::fill(state_.begin(), state_.end(), (Word)0);
    std::fill(values_.begin(), values_.end(), (Word)0);
  }

  /// input_bits[k] drives circuit->inputs[k] for this cycle.
  void step(const std::vector<Word>& input_bits) {
    const Circuit& c = *s_->circuit;
    for (size_t k = 0; k < s_->dffs.size(); ++k)
      values_[(size_t)s_->dffs[k]] = state_[k];
    for (size_t k = 0; k < c.inputs.size(); ++k)
      values_[(size_t)c.inputs[k]] = input_bits[k];
    for (NodeId v : s_->comb_order) {
      const auto& fi = s_->fanin[(size_t)v];
      switch (c.types[(size_t)v]) {
        case CellType::And:
          values_[(size_t)v] = values_[(size_t)fi[0]] & values_[(size_t)fi[1]];
          break;
        case CellType::Or:
          values_[(size_t)v] = values_[(size_t)fi[0]] | values_[(size_t)fi[1]];
          break;
        case CellType::Xor:
          values_[(size_t)v] = values_[(size_t)fi[0]] ^ values_[(size_t)fi[1]];
          break;
        case CellType::Not:
          values_[(size_t)v] = (Word)~values_[(size_t)fi[0]];
          break;
        case CellType::Output:
          values_[(size_t)v] = values_[(size_t)fi[0]];
          break;
        default:
          break;
      }
    }
    for (size_t k = 0; k < s_->dffs.size(); ++k)
      state_[k] = values_[(size_t)s_->fanin[(size_t)s_->dffs[k]][0]];
  }

  Word value(NodeId v) const { return values_[(size_t)v]; }
  const std::vector<Word>& values() const { return values_; }

 private:
  const SimSchedule* s_;
  std::vector<Word> values_;
  std::vector<Word> state_;
};

}  // namespace gatenet
