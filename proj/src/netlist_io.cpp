#include "gatenet/netlist_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gatenet {

using nlohmann::ordered_json;

Circuit parse_netlist(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw IoError(std::string("netlist JSON parse failure: ") + e.what());
  }
  if (!j.is_object()) throw IoError("netlist root is not a JSON object");
  for (const char* key : {"name", "nodes", "edges", "inputs", "outputs"})
    if (!j.contains(key))
      throw IoError(std::string("netlist is missing field '") + key + "'");

  Circuit c;
  c.name = j.at("name").get<std::string>();
  const auto& nodes = j.at("nodes");
  if (!nodes.is_array()) throw IoError("'nodes' is not an array");
  c.types.assign(nodes.size(), CellType::Input);
  std::vector<char> seen(nodes.size(), 0);
  for (const auto& nd : nodes) {
    const int64_t id = nd.at("id").get<int64_t>();
    if (id < 0 || id >= (int64_t)nodes.size())
      throw ValidationError("node id " + std::to_string(id) +
                            " is outside the dense range 0.." +
                            std::to_string(nodes.size() - 1));
    if (seen[(size_t)id])
      throw ValidationError("duplicate node id " + std::to_string(id));
    seen[(size_t)id] = 1;
    const std::string ty = nd.at("type").get<std::string>();
    auto t = cell_type_from_name(ty);
    if (!t) throw ValidationError("unknown cell type '" + ty + "'");
    c.types[(size_t)id] = *t;
  }
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw IoError("edge entries must be [src, dst] pairs");
    c.edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
  }
  std::sort(c.edges.begin(), c.edges.end());
  for (size_t i = 1; i < c.edges.size(); ++i)
    if (c.edges[i] == c.edges[i - 1])
      throw ValidationError("duplicate edge (" +
                            std::to_string(c.edges[i].src) + "," +
                            std::to_string(c.edges[i].dst) + ")");
  for (const auto& v : j.at("inputs")) c.inputs.push_back(v.get<NodeId>());
  for (const auto& v : j.at("outputs")) c.outputs.push_back(v.get<NodeId>());
  validate(c);
  return c;
}

Circuit read_netlist(const std::filesystem::path& file) {
  return parse_netlist(read_file(file));
}

std::string serialize_netlist(const Circuit& c) {
  ordered_json j;
  j["name"] = c.name;
  auto& nodes = j["nodes"] = ordered_json::array();
  for (int v = 0; v < c.node_count(); ++v)
    nodes.push_back({{"id", v}, {"type", cell_type_name(c.types[v])}});
  auto& edges = j["edges"] = ordered_json::array();
  for (const Edge& e : c.edges) edges.push_back({e.src, e.dst});
  j["inputs"] = c.inputs;
  j["outputs"] = c.outputs;
  return j.dump(2) + "\n";
}

void write_netlist(const Circuit& c, const std::filesystem::path& file) {
  write_file_atomic(file, serialize_netlist(c));
}

void write_file_atomic(const std::filesystem::path& file,
                       const std::string& content) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.parent_path() / (file.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), (std::streamsize)content.size());
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gatenet
