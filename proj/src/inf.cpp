#include "gatenet/inf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "gatenet/netlist_io.hpp"
#include "json.hpp"

namespace gatenet {

InfGraph extract_inf(const Circuit& c, NodeId node) {
  if (node < 0 || node >= c.node_count())
    throw std::out_of_range("extract_inf: unknown node id " +
                            std::to_string(node));
  AdjacencyLists adj(c);
  std::vector<char> visited(c.node_count(), 0);
  std::vector<NodeId> stack{node};
  visited[node] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : adj.fanin[v])
      if (!visited[u]) {
        visited[u] = 1;
        stack.push_back(u);
      }
  }
  InfGraph inf;
  inf.root = node;
  inf.circuit = c.name;
  for (NodeId v = 0; v < c.node_count(); ++v)
    if (visited[v]) {
      inf.nodes.push_back(v);
      inf.types.push_back(c.types[v]);
    }
  for (const Edge& e : c.edges)
    if (visited[e.src] && visited[e.dst]) inf.edges.push_back(e);
  return inf;
}

int32_t inf_local_index(const InfGraph& inf, NodeId id) {
  auto it = std::lower_bound(inf.nodes.begin(), inf.nodes.end(), id);
  if (it == inf.nodes.end() || *it != id)
    throw std::out_of_range("id " + std::to_string(id) + " not in inf");
  return (int32_t)(it - inf.nodes.begin());
}

std::string serialize_inf_line(const InfGraph& inf) {
  nlohmann::ordered_json j;
  j["nodes"] = inf.nodes;
  auto types = nlohmann::ordered_json::array();
  for (CellType t : inf.types) types.push_back(cell_type_name(t));
  j["types"] = types;
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : inf.edges) edges.push_back({e.src, e.dst});
  j["edges"] = edges;
  j["label"] = inf.label;
  j["circuit"] = inf.circuit;
  j["root"] = inf.root;
  return j.dump();
}

InfGraph parse_inf_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad inf line: ") + e.what());
  }
  InfGraph inf;
  try {
    inf.nodes = j.at("nodes").get<std::vector<NodeId>>();
    for (const auto& t : j.at("types")) {
      auto name = t.get<std::string>();
      auto ty = cell_type_from_name(name);
      if (!ty) throw IoError("inf line: unknown cell type " + name);
      inf.types.push_back(*ty);
    }
    for (const auto& e : j.at("edges"))
      inf.edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
    inf.label = j.at("label").get<int>();
    inf.circuit = j.at("circuit").get<std::string>();
    inf.root = j.at("root").get<NodeId>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad inf line: ") + e.what());
  }
  if (inf.nodes.size() != inf.types.size())
    throw IoError("inf line: nodes/types length mismatch");
  if (!std::is_sorted(inf.nodes.begin(), inf.nodes.end()) ||
      std::adjacent_find(inf.nodes.begin(), inf.nodes.end()) !=
          inf.nodes.end())
    throw IoError("inf line: node ids not strictly ascending");
  auto member = [&](NodeId v) {
    return std::binary_search(inf.nodes.begin(), inf.nodes.end(), v);
  };
  for (const Edge& e : inf.edges)
    if (!member(e.src) || !member(e.dst))
      throw IoError("inf line: edge endpoint outside node set");
  if (inf.label != 0 && inf.label != 1)
    throw IoError("inf line: label must be 0 or 1");
  if (!member(inf.root)) throw IoError("inf line: root outside node set");
  return inf;
}

std::vector<InfGraph> read_inf_file(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<InfGraph> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_inf_line(line));
  }
  return out;
}

void write_inf_file(const std::vector<InfGraph>& infs,
                    const std::string& path) {
  std::string body;
  for (const InfGraph& inf : infs) {
    body += serialize_inf_line(inf);
    body += '\n';
  }
  write_file_atomic(path, body);
}

}  // namespace gatenet
