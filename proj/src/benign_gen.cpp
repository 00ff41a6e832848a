#include "gatenet/benign_gen.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "gatenet/rng.hpp"

namespace gatenet {

namespace {

CellType draw_gate_type(Rng& rng, bool allow_ff) {
  const double r = rng.uniform_real();
  if (!allow_ff) {
    if (r < 0.40) return CellType::And;
    if (r < 0.80) return CellType::Or;
    return CellType::Not;
  }
  if (r < 0.34) return CellType::And;
  if (r < 0.68) return CellType::Or;
  if (r < 0.85) return CellType::Not;
  if (r < 0.94) return CellType::Dff;
  if (r < 0.98) return CellType::DffR;
  return CellType::DffSr;
}

bool all_reachable_from_inputs(const Circuit& c) {
  const int n = c.node_count();
  std::vector<std::vector<NodeId>> fanout(n);
  for (const Edge& e : c.edges) fanout[e.src].push_back(e.dst);
  std::vector<char> seen(n, 0);
  std::deque<NodeId> q;
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
    if (!seen[v]) return false;
  return true;
}

}  // namespace

Circuit gen_random_benign(int num_cells, uint64_t seed, bool allow_ff) {
  if (num_cells < 4)
    throw std::invalid_argument("gen_random_benign requires num_cells >= 4");
  Rng rng(seed);
  const int span = num_cells / 10;
  const int n_gates = num_cells + (int)rng.uniform_int(-span, span);
  const int n_inputs = std::max(3, n_gates / 15);
  const int n_outputs = std::max(2, n_gates / 20);

  Circuit c;
  c.name = "benign_n" + std::to_string(num_cells) + "_s" + std::to_string(seed);
  c.types.assign((size_t)n_inputs, CellType::Input);
  for (NodeId v = 0; v < n_inputs; ++v) c.inputs.push_back(v);

  // Nets with no fanout yet; preferred as sources to keep the wiring
  // tree-like. open_pos[v] is v's index in open, or -1.
  std::vector<NodeId> open;
  std::vector<int> open_pos;
  auto add_node = [&](CellType t) {
    NodeId v = (NodeId)c.types.size();
    c.types.push_back(t);
    open_pos.push_back((int)open.size());
    open.push_back(v);
    return v;
  };
  auto consume = [&](NodeId v) {
    if (open_pos[v] < 0) return;
    int p = open_pos[v];
    NodeId last = open.back();
    open[p] = last;
    open_pos[last] = p;
    open.pop_back();
    open_pos[v] = -1;
  };
  for (NodeId v = 0; v < n_inputs; ++v) {
    open_pos.push_back((int)open.size());
    open.push_back(v);
  }

  std::vector<NodeId> dffs;
  std::vector<std::vector<NodeId>> fanin;
  fanin.resize((size_t)n_inputs);
  auto pick_source = [&](NodeId exclude) {
    const NodeId n_existing = (NodeId)c.types.size();
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeId v;
      if (!open.empty() && rng.bernoulli(0.8))
        v = open[(size_t)rng.uniform(open.size())];
      else
        v = (NodeId)rng.uniform((uint64_t)n_existing);
      if (v != exclude) return v;
    }
    for (NodeId v = 0; v < n_existing; ++v)
      if (v != exclude) return v;
    return (NodeId)-1;
  };

  for (int g = 0; g < n_gates; ++g) {
    const CellType t = draw_gate_type(rng, allow_ff);
    const NodeId a = pick_source(-1);
    const NodeId b = cell_fanin_arity(t) == 2 ? pick_source(a) : (NodeId)-1;
    const NodeId v = add_node(t);
    c.edges.push_back({a, v});
    consume(a);
    fanin.push_back({a});
    if (b >= 0) {
      c.edges.push_back({b, v});
      consume(b);
      fanin.back().push_back(b);
    }
    if (is_flipflop(t)) dffs.push_back(v);
  }

  // Rewire some flipflop data inputs to later nets so sequential feedback
  // loops appear; a rewire is kept only if every node still reaches an input.
  if (allow_ff) {
    const NodeId first_gate = n_inputs;
    const NodeId end_gate = (NodeId)c.types.size();
    for (NodeId d : dffs) {
      if (d + 1 >= end_gate || !rng.bernoulli(0.5)) continue;
      const NodeId w = d + 1 + (NodeId)rng.uniform((uint64_t)(end_gate - d - 1));
      (void)first_gate;
      const NodeId old = fanin[d][0];
      auto it = std::find(c.edges.begin(), c.edges.end(), Edge{old, d});
      it->src = w;
      fanin[d][0] = w;
      if (!all_reachable_from_inputs(c)) {
        it->src = old;
        fanin[d][0] = old;
      }
    }
  }

  for (int o = 0; o < n_outputs; ++o) {
    NodeId drv;
    if (!open.empty())
      drv = open[(size_t)rng.uniform(open.size())];
    else
      drv = n_inputs + (NodeId)rng.uniform((uint64_t)n_gates);
    const NodeId v = (NodeId)c.types.size();
    c.types.push_back(CellType::Output);
    open_pos.push_back(-1);
    c.outputs.push_back(v);
    c.edges.push_back({drv, v});
    consume(drv);
  }

  std::sort(c.edges.begin(), c.edges.end());
  validate(c);
  return c;
}

}  // namespace gatenet
