#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gatenet/cell_type.hpp"

namespace gatenet {

using NodeId = int32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Gate-level netlist as a directed graph. Node ids are dense 0..n-1 and
/// order-significant. Edges are kept sorted by (src, dst); every constructor
/// in this library produces that canonical form and validate() enforces it.
struct Circuit {
  std::string name;
  std::vector<CellType> types;
  std::vector<Edge> edges;
  std::vector<NodeId> inputs;   ///< ascending ids of INPUT nodes
  std::vector<NodeId> outputs;  ///< ascending ids of OUTPUT nodes

  int node_count() const { return (int)types.size(); }
  bool operator==(const Circuit&) const = default;
};

/// Fanin/fanout lists derived from a circuit's edge list (ascending ids).
struct AdjacencyLists {
  std::vector<std::vector<NodeId>> fanin;
  std::vector<std::vector<NodeId>> fanout;
  explicit AdjacencyLists(const Circuit& c);
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks id density, canonical edge order, per-type in-degree arity,
/// OUTPUT sink-ness, the inputs/outputs lists, backward reachability of
/// every node from some primary input, and combinational acyclicity
/// (cycles may only pass through flipflop outputs). Throws ValidationError.
void validate(const Circuit& c);

/// Dense 0/1 adjacency; bits[i*dim+j] == 1 iff directed edge (i, j).
struct AdjacencyMatrix {
  int dim = 0;
  std::vector<uint8_t> bits;
  std::vector<CellType> cell_types;

  uint8_t at(int i, int j) const { return bits[(size_t)i * dim + j]; }
};

AdjacencyMatrix to_adjacency(const Circuit& c);

/// Rebuilds a circuit (node order preserved) and validates it.
Circuit from_adjacency(const AdjacencyMatrix& m,
                       std::string name = "from_adjacency");

}  // namespace gatenet
