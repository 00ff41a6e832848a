#include "gatenet/trigger.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "gatenet/logic_sim.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"
#include "json.hpp"

namespace gatenet {

namespace {

struct TreeNode {
  int kind;  // 0 = AND, 1 = NOT, 2 = INPUT leaf
  int child[2] = {-1, -1};
};

int draw_kind(Rng& rng, bool co) {
  const double r = rng.uniform_real();
  if (co) return r < 0.2 / 0.55 ? 1 : 2;
  if (r < 0.45) return 0;
  if (r < 0.65) return 1;
  return 2;
}

/// Grows one candidate tree depth-first, constrained so the finished tree
/// fires on exactly one input pattern:
///   unique    := INPUT | AND(unique, unique) | NOT(co-unique)
///   co-unique := INPUT | NOT(unique)
/// (an AND with two subtrees outputs 0 on several patterns, so it is never
/// co-unique). Returns false when the leaf budget or the node cap is
/// exceeded; the only other rejection left to the caller is the leaf count.
bool grow_tree(Rng& rng, int n_inputs, int node_cap,
               std::vector<TreeNode>& tree) {
  tree.clear();
  int leaves = 0;
  std::vector<int> pending;  // (node, slot, mode) as node*4 + slot*2 + mode
  auto spawn = [&](int parent, int slot, int co) {
    const int id = (int)tree.size();
    tree.push_back({draw_kind(rng, co != 0)});
    if (parent >= 0) tree[(size_t)parent].child[slot] = id;
    const int kind = tree[(size_t)id].kind;
    if (kind == 2)
      ++leaves;
    else if (kind == 1)
      pending.push_back(id * 4 + (co ? 0 : 1));
    else {
      pending.push_back(id * 4);
      pending.push_back(id * 4 + 2);
    }
    return id;
  };
  spawn(-1, 0, 0);
  while (!pending.empty()) {
    if (leaves > n_inputs || (int)tree.size() > node_cap) return false;
    const int item = pending.back();
    pending.pop_back();
    spawn(item / 4, (item / 2) % 2, item % 2);
  }
  return leaves == n_inputs;
}

/// A tree fires on exactly one input pattern iff it is "unique" under:
///   INPUT: unique and co-unique (exactly one pattern gives 0 as well)
///   NOT(x): unique iff x co-unique; co-unique iff x unique
///   AND(l,r): unique iff both children unique; never co-unique
/// (an AND is 0 on more than one pattern whenever it has >= 2 leaves).
bool compute_unique(const std::vector<TreeNode>& tree, int v, bool want_unique) {
  const TreeNode& n = tree[(size_t)v];
  switch (n.kind) {
    case 2:
      return true;
    case 1:
      return compute_unique(tree, n.child[0], !want_unique);
    default:
      return want_unique && compute_unique(tree, n.child[0], true) &&
             compute_unique(tree, n.child[1], true);
  }
}

void derive_pattern(const std::vector<TreeNode>& tree, int v, bool want,
                    std::map<int, char>& pattern) {
  const TreeNode& n = tree[(size_t)v];
  switch (n.kind) {
    case 2:
      pattern[v] = want ? '1' : '0';
      break;
    case 1:
      derive_pattern(tree, n.child[0], !want, pattern);
      break;
    default:
      derive_pattern(tree, n.child[0], true, pattern);
      derive_pattern(tree, n.child[1], true, pattern);
      break;
  }
}

Trigger tree_to_trigger(const std::vector<TreeNode>& tree, int n_inputs) {
  // Leaves take ids 0..n_inputs-1 in tree discovery order; gates follow in
  // post-order so the root lands on the last id.
  std::vector<NodeId> id_of(tree.size(), -1);
  NodeId next_leaf = 0;
  for (size_t v = 0; v < tree.size(); ++v)
    if (tree[v].kind == 2) id_of[v] = next_leaf++;
  NodeId next_gate = (NodeId)n_inputs;
  std::vector<int> order, stack{0};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int s = 0; s < 2; ++s)
      if (tree[(size_t)v].child[s] >= 0) stack.push_back(tree[(size_t)v].child[s]);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (tree[(size_t)*it].kind != 2) id_of[(size_t)*it] = next_gate++;

  Trigger t;
  t.kind = TriggerKind::Combinatorial;
  t.size = n_inputs;
  t.circuit.name = "comb_trigger";
  t.circuit.types.assign(tree.size(), CellType::Input);
  for (size_t v = 0; v < tree.size(); ++v) {
    const CellType ct = tree[v].kind == 0   ? CellType::And
                        : tree[v].kind == 1 ? CellType::Not
                                            : CellType::Input;
    t.circuit.types[(size_t)id_of[v]] = ct;
    for (int s = 0; s < 2; ++s)
      if (tree[v].child[s] >= 0)
        t.circuit.edges.push_back({id_of[(size_t)tree[v].child[s]], id_of[v]});
  }
  std::sort(t.circuit.edges.begin(), t.circuit.edges.end());
  for (NodeId v = 0; v < (NodeId)n_inputs; ++v) {
    t.circuit.inputs.push_back(v);
    t.trigger_inputs.push_back(v);
  }
  t.trigger_output = (NodeId)tree.size() - 1;

  std::map<int, char> pat;
  derive_pattern(tree, 0, true, pat);
  t.activation.assign((size_t)n_inputs, '?');
  for (const auto& [tree_leaf, bit] : pat)
    t.activation[(size_t)id_of[(size_t)tree_leaf]] = bit;
  validate(t.circuit);
  return t;
}

}  // namespace

Trigger gen_comb_trigger(int n_inputs, uint64_t seed, int max_attempts) {
  if (n_inputs < 2)
    throw TriggerError("combinatorial trigger needs at least 2 inputs");
  if (max_attempts < 1) throw TriggerError("max_attempts must be positive");
  const int node_cap = 10 * n_inputs + 60;
  std::vector<TreeNode> tree;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(mix_seed(seed, (uint64_t)attempt));
    if (!grow_tree(rng, n_inputs, node_cap, tree)) continue;
    if (tree[0].kind == 2) continue;
    if (!compute_unique(tree, 0, true)) continue;
    return tree_to_trigger(tree, n_inputs);
  }
  throw TriggerError("no acceptable trigger tree after " +
                     std::to_string(max_attempts) + " attempts (n_inputs=" +
                     std::to_string(n_inputs) + ")");
}

Trigger gen_seq_trigger(const std::string& sequence, uint64_t) {
  const int L = (int)sequence.size();
  if (L < 2) throw TriggerError("sequence must have length >= 2");
  for (char ch : sequence)
    if (ch != '0' && ch != '1')
      throw TriggerError("sequence must be a bitstring of 0/1");

  // KMP prefix automaton with detection reset: delta[k][b] is the next
  // matched-prefix length from state k on input bit b; a transition that
  // completes the sequence goes back to 0.
  std::vector<int> pi(L, 0);
  for (int k = 1; k < L; ++k) {
    int j = pi[k - 1];
    while (j > 0 && sequence[(size_t)k] != sequence[(size_t)j]) j = pi[j - 1];
    if (sequence[(size_t)k] == sequence[(size_t)j]) ++j;
    pi[(size_t)k] = j;
  }
  std::vector<std::array<int, 2>> delta((size_t)L);
  std::vector<std::array<bool, 2>> emits((size_t)L);
  for (int k = 0; k < L; ++k)
    for (int b = 0; b < 2; ++b) {
      const char cb = (char)('0' + b);
      if (cb == sequence[(size_t)k]) {
        emits[(size_t)k][(size_t)b] = (k == L - 1);
        delta[(size_t)k][(size_t)b] = (k == L - 1) ? 0 : k + 1;
      } else {
        emits[(size_t)k][(size_t)b] = false;
        int j = k > 0 ? pi[(size_t)k - 1] : 0;
        while (j > 0 && cb != sequence[(size_t)j]) j = pi[(size_t)j - 1];
        if (cb == sequence[(size_t)j]) ++j;
        delta[(size_t)k][(size_t)b] = j;
      }
    }

  int nbits = 1;
  while ((1 << nbits) < L) ++nbits;

  Trigger t;
  t.kind = TriggerKind::Sequential;
  t.sequence = sequence;
  t.size = nbits;
  Circuit& c = t.circuit;
  c.name = "seq_trigger_" + sequence;

  auto add = [&](CellType ty, std::vector<NodeId> fi) {
    const NodeId v = (NodeId)c.types.size();
    c.types.push_back(ty);
    for (NodeId s : fi) c.edges.push_back({s, v});
    return v;
  };
  const NodeId in = add(CellType::Input, {});
  std::vector<NodeId> dff((size_t)nbits);
  for (int j = 0; j < nbits; ++j) dff[(size_t)j] = add(CellType::Dff, {});
  const NodeId in_n = add(CellType::Not, {in});
  std::vector<NodeId> dff_n((size_t)nbits);
  for (int j = 0; j < nbits; ++j)
    dff_n[(size_t)j] = add(CellType::Not, {dff[(size_t)j]});

  auto chain = [&](CellType ty, const std::vector<NodeId>& terms) {
    NodeId acc = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) acc = add(ty, {acc, terms[i]});
    return acc;
  };

  std::vector<std::vector<NodeId>> bit_terms((size_t)nbits);
  NodeId detect = -1;
  for (int k = 0; k < L; ++k)
    for (int b = 0; b < 2; ++b) {
      std::vector<NodeId> lits{b ? in : in_n};
      for (int j = 0; j < nbits; ++j)
        lits.push_back((k >> j) & 1 ? dff[(size_t)j] : dff_n[(size_t)j]);
      const bool emit = emits[(size_t)k][(size_t)b];
      const int next = delta[(size_t)k][(size_t)b];
      if (next == 0 && !emit) continue;  // contributes to no function
      const NodeId product = chain(CellType::And, lits);
      if (emit) detect = product;
      for (int j = 0; j < nbits; ++j)
        if ((next >> j) & 1) bit_terms[(size_t)j].push_back(product);
    }
  for (int j = 0; j < nbits; ++j) {
    if (bit_terms[(size_t)j].empty())
      throw TriggerError("internal: state bit with empty next-state function");
    c.edges.push_back({chain(CellType::Or, bit_terms[(size_t)j]), dff[(size_t)j]});
  }
  t.trigger_output = detect;
  t.trigger_inputs = {in};
  c.inputs = {in};
  std::sort(c.edges.begin(), c.edges.end());
  validate(c);
  return t;
}

int trigger_size(const Trigger& t) {
  if (t.kind == TriggerKind::Combinatorial) return (int)t.trigger_inputs.size();
  int ffs = 0;
  for (CellType ty : t.circuit.types)
    if (is_flipflop(ty)) ++ffs;
  return ffs;
}

std::string serialize_trigger_sidecar(const Trigger& t) {
  nlohmann::ordered_json j;
  j["kind"] = t.kind == TriggerKind::Combinatorial ? "combinatorial"
                                                   : "sequential";
  j["trigger_inputs"] = t.trigger_inputs;
  j["trigger_output"] = t.trigger_output;
  j["size"] = t.size;
  if (t.kind == TriggerKind::Sequential)
    j["sequence"] = t.sequence;
  else
    j["sequence"] = nullptr;
  if (t.kind == TriggerKind::Combinatorial)
    j["activation"] = t.activation;
  else
    j["activation"] = nullptr;
  return j.dump(2) + "\n";
}

Trigger load_trigger(const std::filesystem::path& circuit_file,
                     const std::filesystem::path& sidecar_file) {
  Trigger t;
  t.circuit = read_netlist(circuit_file);
  nlohmann::json j = nlohmann::json::parse(read_file(sidecar_file));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "combinatorial")
    t.kind = TriggerKind::Combinatorial;
  else if (kind == "sequential")
    t.kind = TriggerKind::Sequential;
  else
    throw TriggerError("unknown trigger kind '" + kind + "'");
  t.trigger_inputs = j.at("trigger_inputs").get<std::vector<NodeId>>();
  t.trigger_output = j.at("trigger_output").get<NodeId>();
  t.size = j.at("size").get<int>();
  if (!j.at("sequence").is_null())
    t.sequence = j.at("sequence").get<std::string>();
  if (!j.at("activation").is_null())
    t.activation = j.at("activation").get<std::string>();
  const int n = t.circuit.node_count();
  if (t.trigger_output < 0 || t.trigger_output >= n)
    throw TriggerError("trigger_output out of range");
  for (NodeId v : t.trigger_inputs)
    if (v < 0 || v >= n) throw TriggerError("trigger input out of range");
  return t;
}

void save_trigger(const Trigger& t, const std::filesystem::path& circuit_file,
                  const std::filesystem::path& sidecar_file) {
  write_netlist(t.circuit, circuit_file);
  write_file_atomic(sidecar_file, serialize_trigger_sidecar(t));
}

std::vector<int> simulate_trigger_pulses(const Trigger& t,
                                         const std::vector<int>& stream) {
  SimSchedule sched(t.circuit);
  CycleSim<uint8_t> sim(sched);
  std::vector<int> pulses;
  std::vector<uint8_t> in(1);
  for (size_t i = 0; i < stream.size(); ++i) {
    in[0] = (uint8_t)(stream[i] & 1);
    sim.step(in);
    if (sim.value(t.trigger_output) & 1) pulses.push_back((int)i);
  }
  return pulses;
}

std::vector<int> nonoverlapping_match_ends(const std::string& seq,
                                           const std::vector<int>& stream) {
  std::vector<int> ends;
  const int L = (int)seq.size();
  int pos = 0;
  while (pos + L <= (int)stream.size()) {
    bool match = true;
    for (int i = 0; i < L && match; ++i)
      match = (stream[(size_t)(pos + i)] & 1) == seq[(size_t)i] - '0';
    if (match) {
      ends.push_back(pos + L - 1);
      pos += L;
    } else {
      ++pos;
    }
  }
  return ends;
}

}  // namespace gatenet
