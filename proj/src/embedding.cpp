#include "gatenet/embedding.hpp"

#include <algorithm>
#include <deque>

#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"
#include "json.hpp"

namespace gatenet {

std::vector<NodeId> nodes_within_hops_of_inputs(const Circuit& c, int k) {
  AdjacencyLists adj(c);
  const int32_t n = c.node_count();
  std::vector<int> dist(n, -1);
  std::deque<NodeId> q;
  for (NodeId v : c.inputs) {
    dist[v] = 0;
    q.push_back(v);
  }
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop_front();
    if (dist[v] == k) continue;
    for (NodeId w : adj.fanout[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v)
    if (dist[v] >= 0) out.push_back(v);
  return out;
}

EmbeddedCircuit embed_trigger(const Circuit& benign, const Trigger& t,
                              const EmbedStrategy& strategy, uint64_t seed,
                              const std::string& name) {
  std::vector<NodeId> candidates;
  if (strategy.kind == EmbedStrategy::Kind::Shallow)
    candidates = nodes_within_hops_of_inputs(benign, strategy.k);
  else
    for (NodeId v = 0; v < benign.node_count(); ++v) candidates.push_back(v);
  std::erase_if(candidates, [&](NodeId v) {
    return benign.types[v] == CellType::Output;
  });

  const size_t need = t.trigger_inputs.size();
  if (candidates.size() < need)
    throw EmbedError("insufficient candidate host nets: need " +
                     std::to_string(need) + ", have " +
                     std::to_string(candidates.size()) + " under strategy " +
                     strategy.name());

  Rng rng(seed);
  std::vector<NodeId> hosts;
  for (size_t i = 0; i < need; ++i) {
    size_t j = i + rng.uniform(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    hosts.push_back(candidates[i]);
  }

  const int32_t nb = benign.node_count();
  EmbeddedCircuit ec;
  ec.circuit.name = name.empty() ? benign.name + "+" + t.circuit.name : name;
  ec.circuit.types = benign.types;
  for (CellType ty : t.circuit.types)
    ec.circuit.types.push_back(ty == CellType::Input ? CellType::Not : ty);
  ec.circuit.edges = benign.edges;
  for (const Edge& e : t.circuit.edges)
    ec.circuit.edges.push_back({e.src + nb, e.dst + nb});
  for (size_t i = 0; i < need; ++i) {
    ec.insertion_points.emplace_back(t.trigger_inputs[i] + nb, hosts[i]);
    ec.circuit.edges.push_back({hosts[i], t.trigger_inputs[i] + nb});
  }
  std::sort(ec.circuit.edges.begin(), ec.circuit.edges.end());
  ec.circuit.inputs = benign.inputs;
  ec.circuit.outputs = benign.outputs;
  validate(ec.circuit);

  ec.benign_node_count = nb;
  ec.trigger_output_node = t.trigger_output + nb;
  for (NodeId v = 0; v < t.circuit.node_count(); ++v)
    ec.trigger_node_ids.push_back(v + nb);
  ec.strategy = strategy.name();
  ec.shallow_k = strategy.kind == EmbedStrategy::Kind::Shallow ? strategy.k : 0;
  ec.benign_name = benign.name;
  ec.trigger_name = t.circuit.name;
  ec.trigger_kind = t.kind;
  ec.trigger_size = t.size;
  ec.seed = seed;
  return ec;
}

std::string serialize_embedding_sidecar(const EmbeddedCircuit& ec) {
  nlohmann::ordered_json j;
  j["benign_node_count"] = ec.benign_node_count;
  j["trigger_output_node"] = ec.trigger_output_node;
  j["trigger_node_ids"] = ec.trigger_node_ids;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& [ti, host] : ec.insertion_points)
    pts.push_back({ti, host});
  j["insertion_points"] = pts;
  j["strategy"] = ec.strategy;
  j["shallow_k"] = ec.shallow_k;
  j["benign"] = ec.benign_name;
  j["trigger"] = ec.trigger_name;
  j["trigger_kind"] = ec.trigger_kind == TriggerKind::Combinatorial
                          ? "combinatorial"
                          : "sequential";
  j["trigger_size"] = ec.trigger_size;
  j["seed"] = ec.seed;
  return j.dump(2) + "\n";
}

void save_embedded(const EmbeddedCircuit& ec, const std::string& stem) {
  write_netlist(ec.circuit, stem + ".circuit.json");
  write_file_atomic(stem + ".embed.json", serialize_embedding_sidecar(ec));
}

EmbeddedCircuit load_embedded(const std::string& circuit_path,
                              const std::string& sidecar_path) {
  EmbeddedCircuit ec;
  ec.circuit = read_netlist(circuit_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(sidecar_path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(sidecar_path + ": " + e.what());
  }
  try {
    ec.benign_node_count = j.at("benign_node_count").get<int32_t>();
    ec.trigger_output_node = j.at("trigger_output_node").get<NodeId>();
    ec.trigger_node_ids =
        j.at("trigger_node_ids").get<std::vector<NodeId>>();
    for (const auto& p : j.at("insertion_points"))
      ec.insertion_points.emplace_back(p.at(0).get<NodeId>(),
                                       p.at(1).get<NodeId>());
    ec.strategy = j.at("strategy").get<std::string>();
    ec.shallow_k = j.at("shallow_k").get<int>();
    ec.benign_name = j.at("benign").get<std::string>();
    ec.trigger_name = j.at("trigger").get<std::string>();
    const std::string kind = j.at("trigger_kind").get<std::string>();
    if (kind == "combinatorial")
      ec.trigger_kind = TriggerKind::Combinatorial;
    else if (kind == "sequential")
      ec.trigger_kind = TriggerKind::Sequential;
    else
      throw IoError(sidecar_path + ": unknown trigger kind '" + kind + "'");
    ec.trigger_size = j.at("trigger_size").get<int>();
    ec.seed = j.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(sidecar_path + ": " + e.what());
  }
  const int32_t n = ec.circuit.node_count();
  if (ec.benign_node_count < 0 || ec.benign_node_count > n ||
      ec.trigger_output_node < 0 || ec.trigger_output_node >= n)
    throw IoError(sidecar_path + ": node ids out of range");
  return ec;
}

}  // namespace gatenet
