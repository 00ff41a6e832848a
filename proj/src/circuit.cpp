#include "gatenet/circuit.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace gatenet {

std::optional<CellType> cell_type_from_name(std::string_view name) {
  for (int i = 0; i < kNumCellTypes; ++i) {
    CellType t = (CellType)i;
    if (cell_type_name(t) == name) return t;
  }
  return std::nullopt;
}

AdjacencyLists::AdjacencyLists(const Circuit& c)
    : fanin(c.node_count()), fanout(c.node_count()) {
  for (const Edge& e : c.edges) {
    fanout[e.src].push_back(e.dst);
    fanin[e.dst].push_back(e.src);
  }
  for (auto& v : fanin) std::sort(v.begin(), v.end());
}

void validate(const Circuit& c) {
  const int n = c.node_count();
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };

  for (size_t i = 1; i < c.edges.size(); ++i) {
    if (!(c.edges[i - 1] < c.edges[i]))
      fail("edge list is not sorted/unique at position " + std::to_string(i));
  }
  std::vector<int> indeg(n, 0), outdeg(n, 0);
  for (const Edge& e : c.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      fail("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
           ") references an undefined node");
    if (e.src == e.dst) fail("self-loop on node " + std::to_string(e.src));
    ++outdeg[e.src];
    ++indeg[e.dst];
  }
  for (int v = 0; v < n; ++v) {
    const CellType t = c.types[v];
    if (indeg[v] != cell_fanin_arity(t))
      fail("node " + std::to_string(v) + " (" +
           std::string(cell_type_name(t)) + ") has in-degree " +
           std::to_string(indeg[v]) + ", expected " +
           std::to_string(cell_fanin_arity(t)));
    if (t == CellType::Output && outdeg[v] != 0)
      fail("OUTPUT node " + std::to_string(v) + " has out-edges");
  }

  std::vector<NodeId> want_in, want_out;
  for (int v = 0; v < n; ++v) {
    if (c.types[v] == CellType::Input) want_in.push_back(v);
    if (c.types[v] == CellType::Output) want_out.push_back(v);
  }
  if (c.inputs != want_in)
    fail("inputs list does not match INPUT-typed nodes in ascending order");
  if (c.outputs != want_out)
    fail("outputs list does not match OUTPUT-typed nodes in ascending order");

  // Every node must be backward-reachable from a primary input, i.e.
  // forward-reachable when walking from the inputs.
  std::vector<char> seen(n, 0);
  std::deque<NodeId> q;
  std::vector<std::vector<NodeId>> fanout(n);
  for (const Edge& e : c.edges) fanout[e.src].push_back(e.dst);
  for (NodeId v : c.inputs) {
    seen[v] = 1;
    q.push_back(v);
  }
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop_front();
    for (NodeId w : fanout[v])
      if (!seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  for (int v = 0; v < n; ++v)
    if (!seen[v])
      fail("node " + std::to_string(v) +
           " is not backward-reachable from any primary input");

  // Combinational acyclicity: drop edges leaving flipflops, then Kahn.
  std::vector<int> cdeg(n, 0);
  for (const Edge& e : c.edges)
    if (!is_flipflop(c.types[e.src])) ++cdeg[e.dst];
  std::deque<NodeId> ready;
  for (int v = 0; v < n; ++v)
    if (cdeg[v] == 0) ready.push_back(v);
  int done = 0;
  while (!ready.empty()) {
    NodeId v = ready.front();
    ready.pop_front();
    ++done;
    if (is_flipflop(c.types[v])) continue;
    for (NodeId w : fanout[v])
      if (--cdeg[w] == 0) ready.push_back(w);
  }
  if (done != n) fail("combinational cycle (a cycle not passing a flipflop)");
}

AdjacencyMatrix to_adjacency(const Circuit& c) {
  AdjacencyMatrix m;
  m.dim = c.node_count();
  m.bits.assign((size_t)m.dim * m.dim, 0);
  m.cell_types = c.types;
  for (const Edge& e : c.edges) m.bits[(size_t)e.src * m.dim + e.dst] = 1;
  return m;
}

Circuit from_adjacency(const AdjacencyMatrix& m, std::string name) {
  Circuit c;
  c.name = std::move(name);
  c.types = m.cell_types;
  if ((int)m.cell_types.size() != m.dim)
    throw ValidationError("adjacency cell_types length does not match dim");
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j)
      if (m.at(i, j)) c.edges.push_back({i, j});
  for (int v = 0; v < m.dim; ++v) {
    if (c.types[v] == CellType::Input) c.inputs.push_back(v);
    if (c.types[v] == CellType::Output) c.outputs.push_back(v);
  }
  validate(c);
  return c;
}

}  // namespace gatenet
