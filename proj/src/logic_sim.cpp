#include "gatenet/logic_sim.hpp"

#include <algorithm>
#include <deque>

namespace gatenet {

SimSchedule::SimSchedule(const Circuit& c) : circuit(&c) {
  const int n = c.node_count();
  fanin.resize((size_t)n);
  std::vector<std::vector<NodeId>> fanout((size_t)n);
  std::vector<int> cdeg(n, 0);
  for (const Edge& e : c.edges) {
    fanin[(size_t)e.dst].push_back(e.src);
    if (!is_flipflop(c.types[(size_t)e.src])) {
      fanout[(size_t)e.src].push_back(e.dst);
      ++cdeg[e.dst];
    }
  }
  std::deque<NodeId> ready;
  for (int v = 0; v < n; ++v)
    if (cdeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    NodeId v = ready.front();
    ready.pop_front();
    const CellType t = c.types[(size_t)v];
    if (t != CellType::Input && !is_flipflop(t)) comb_order.push_back(v);
    if (is_flipflop(t)) {
      dffs.push_back(v);
      continue;
    }
    for (NodeId w : fanout[(size_t)v])
      if (--cdeg[w] == 0) ready.push_back(w);
  }
  std::sort(dffs.begin(), dffs.end());
}

}  // namespace gatenet
