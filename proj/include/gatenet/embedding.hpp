#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gatenet/circuit.hpp"
#include "gatenet/trigger.hpp"

namespace gatenet {

class EmbedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmbedStrategy {
  enum class Kind { Random, Shallow };
  Kind kind = Kind::Random;
  int k = 2;

  static EmbedStrategy random() { return {Kind::Random, 0}; }
  static EmbedStrategy shallow(int k) { return {Kind::Shallow, k}; }
  std::string name() const {
    return kind == Kind::Random ? "random" : "shallow";
  }
};

// A benign circuit with one trigger spliced in. Node ids 0..benign_node_count-1
// are the untouched benign circuit; trigger nodes follow. Each trigger input
// leaf is retyped from INPUT to NOT and driven by one cross edge from a host
// net, so the combined graph still validates. The trigger output stays
// dangling.
struct EmbeddedCircuit {
  Circuit circuit;
  int32_t benign_node_count = 0;
  NodeId trigger_output_node = 0;
  std::vector<NodeId> trigger_node_ids;
  // (trigger input node id in the embedded circuit, host net id)
  std::vector<std::pair<NodeId, NodeId>> insertion_points;
  std::string strategy;
  int shallow_k = 0;
  std::string benign_name;
  std::string trigger_name;
  TriggerKind trigger_kind = TriggerKind::Combinatorial;
  int trigger_size = 0;
  uint64_t seed = 0;
};

// Node ids within `k` forward hops of any primary input (inputs themselves
// are at hop 0).
std::vector<NodeId> nodes_within_hops_of_inputs(const Circuit& c, int k);

EmbeddedCircuit embed_trigger(const Circuit& benign, const Trigger& t,
                              const EmbedStrategy& strategy, uint64_t seed,
                              const std::string& name = "");

std::string serialize_embedding_sidecar(const EmbeddedCircuit& ec);

// Writes <stem>.circuit.json and <stem>.embed.json.
void save_embedded(const EmbeddedCircuit& ec, const std::string& stem);
EmbeddedCircuit load_embedded(const std::string& circuit_path,
                              const std::string& sidecar_path);

}  // namespace gatenet
