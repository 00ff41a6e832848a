#pragma once

#include <string>
#include <vector>

#include "gatenet/circuit.hpp"

namespace gatenet {

// Inverse node fanin: the subgraph a classifier sees for one net. Nodes keep
// their ids from the source circuit; `edges` is the induced edge set.
struct InfGraph {
  std::vector<NodeId> nodes;   ///< ascending source-circuit ids
  std::vector<CellType> types;  ///< parallel to nodes
  std::vector<Edge> edges;      ///< induced, canonical sort, source ids
  int label = 0;
  std::string circuit;
  NodeId root = 0;

  int32_t node_count() const { return (int32_t)nodes.size(); }
  bool operator==(const InfGraph&) const = default;
};

/// Backward-reachable closure of `node`; cycles through flipflops terminate
/// via the visited set. Label and provenance are left for the caller.
InfGraph extract_inf(const Circuit& c, NodeId node);

/// Local index of a source-circuit id inside inf.nodes (binary search).
int32_t inf_local_index(const InfGraph& inf, NodeId id);

std::string serialize_inf_line(const InfGraph& inf);
InfGraph parse_inf_line(const std::string& line);

std::vector<InfGraph> read_inf_file(const std::string& path);
void write_inf_file(const std::vector<InfGraph>& infs,
                    const std::string& path);

}  // namespace gatenet
