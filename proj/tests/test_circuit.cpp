#include <algorithm>
#include <filesystem>
#include <set>
#include <vector>

#include "doctest.h"
#include "gatenet/benign_gen.hpp"
#include "gatenet/circuit.hpp"
#include "gatenet/logic_sim.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"

using namespace gatenet;

namespace {

// Full adder: a=0 b=1 cin=2, xor1=3, sum_xor=4, and1=5, and2=6, or1=7,
// sum out=8, cout out=9.
Circuit full_adder() {
  Circuit c;
  c.name = "full_adder";
  c.types = {CellType::Input, CellType::Input, CellType::Input,
             CellType::Xor,   CellType::Xor,   CellType::And,
             CellType::And,   CellType::Or,    CellType::Output,
             CellType::Output};
  c.edges = {{0, 3}, {0, 5}, {1, 3}, {1, 5}, {2, 4}, {2, 6},
             {3, 4}, {3, 6}, {4, 8}, {5, 7}, {6, 7}, {7, 9}};
  c.inputs = {0, 1, 2};
  c.outputs = {8, 9};
  return c;
}

Circuit dff_delay_line() {
  Circuit c;
  c.name = "delay2";
  c.types = {CellType::Input, CellType::Dff, CellType::Dff, CellType::Output};
  c.edges = {{0, 1}, {1, 2}, {2, 3}};
  c.inputs = {0};
  c.outputs = {3};
  return c;
}

}  // namespace

TEST_CASE("full adder is a valid circuit") {
  Circuit c = full_adder();
  CHECK(c.node_count() == 10);
  CHECK(c.edges.size() == 12);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("adjacency lists match the edge list") {
  Circuit c = full_adder();
  AdjacencyLists adj(c);
  for (int v = 0; v < c.node_count(); ++v) {
    std::vector<NodeId> fi, fo;
    for (const Edge& e : c.edges) {
      if (e.dst == v) fi.push_back(e.src);
      if (e.src == v) fo.push_back(e.dst);
    }
    CHECK(adj.fanin[(size_t)v] == fi);
    CHECK(adj.fanout[(size_t)v] == fo);
  }
}

TEST_CASE("validate rejects malformed circuits") {
  SUBCASE("unsorted edges") {
    Circuit c = full_adder();
    std::swap(c.edges[0], c.edges[5]);
    CHECK_THROWS_AS(validate(c), ValidationError);
  }
  SUBCASE("wrong arity") {
    Circuit c = full_adder();
    c.edges.push_back({2, 3});
    std::sort(c.edges.begin(), c.edges.end());
    CHECK_THROWS_AS(validate(c), ValidationError);
  }
  SUBCASE("output with fanout") {
    Circuit c = full_adder();
    c.types[7] = CellType::Output;
    CHECK_THROWS_AS(validate(c), ValidationError);
  }
  SUBCASE("node unreachable from any input") {
    Circuit c;
    c.name = "island";
    c.types = {CellType::Input, CellType::Output, CellType::Not,
               CellType::Not};
    c.edges = {{0, 1}, {2, 3}, {3, 2}};
    c.inputs = {0};
    c.outputs = {1};
    CHECK_THROWS_AS(validate(c), ValidationError);
  }
  SUBCASE("combinational cycle") {
    Circuit c;
    c.name = "comb_loop";
    c.types = {CellType::Input, CellType::And, CellType::And,
               CellType::Output};
    c.edges = {{0, 1}, {0, 2}, {1, 2}, {2, 1}, {1, 3}};
    std::sort(c.edges.begin(), c.edges.end());
    c.inputs = {0};
    c.outputs = {3};
    CHECK_THROWS_AS(validate(c), ValidationError);
  }
  SUBCASE("cycle through a flipflop is legal") {
    Circuit c;
    c.name = "ff_loop";
    c.types = {CellType::Input, CellType::And, CellType::Dff,
               CellType::Output};
    c.edges = {{0, 1}, {1, 2}, {1, 3}, {2, 1}};
    c.inputs = {0};
    c.outputs = {3};
    CHECK_NOTHROW(validate(c));
  }
  SUBCASE("inputs list must match INPUT nodes") {
    Circuit c = full_adder();
    c.inputs = {0, 1};
    CHECK_THROWS_AS(validate(c), ValidationError);
  }
}

TEST_CASE("adjacency matrix round trip") {
  Circuit c = full_adder();
  AdjacencyMatrix m = to_adjacency(c);
  CHECK(m.dim == c.node_count());
  int ones = 0;
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) ones += m.at(i, j);
  CHECK(ones == (int)c.edges.size());
  for (const Edge& e : c.edges) CHECK(m.at(e.src, e.dst) == 1);

  Circuit back = from_adjacency(m, c.name);
  CHECK(back.types == c.types);
  CHECK(back.edges == c.edges);
  CHECK(back.inputs == c.inputs);
  CHECK(back.outputs == c.outputs);
}

TEST_CASE("netlist serialization round trips exactly") {
  Circuit c = full_adder();
  const std::string text = serialize_netlist(c);
  Circuit back = parse_netlist(text);
  CHECK(back == c);
  CHECK(serialize_netlist(back) == text);

  SUBCASE("edge order in the file is free") {
    std::string js = R"({"name":"t","nodes":[{"id":0,"type":"INPUT"},
      {"id":1,"type":"NOT"},{"id":2,"type":"OUTPUT"}],
      "edges":[[1,2],[0,1]],"inputs":[0],"outputs":[2]})";
    Circuit p = parse_netlist(js);
    CHECK(p.edges == std::vector<Edge>{{0, 1}, {1, 2}});
  }
}

TEST_CASE("netlist parser error reporting") {
  CHECK_THROWS_AS(parse_netlist("not json"), IoError);
  CHECK_THROWS_AS(parse_netlist("[1,2]"), IoError);
  CHECK_THROWS_AS(parse_netlist(R"({"name":"x"})"), IoError);
  const std::string bad_type = R"({"name":"t","nodes":[{"id":0,"type":"NAND"}],
    "edges":[],"inputs":[0],"outputs":[]})";
  CHECK_THROWS_AS(parse_netlist(bad_type), ValidationError);
  const std::string dup_edge = R"({"name":"t","nodes":[{"id":0,"type":"INPUT"},
    {"id":1,"type":"NOT"},{"id":2,"type":"OUTPUT"}],
    "edges":[[0,1],[0,1],[1,2]],"inputs":[0],"outputs":[2]})";
  CHECK_THROWS_AS(parse_netlist(dup_edge), ValidationError);
  const std::string sparse_id = R"({"name":"t","nodes":[{"id":0,"type":"INPUT"},
    {"id":5,"type":"OUTPUT"}],"edges":[[0,5]],"inputs":[0],"outputs":[5]})";
  CHECK_THROWS_AS(parse_netlist(sparse_id), ValidationError);
}

TEST_CASE("netlist file io round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gatenet_test_io";
  fs::create_directories(dir);
  const fs::path file = dir / "fa.circuit.json";
  Circuit c = full_adder();
  write_netlist(c, file);
  CHECK(read_netlist(file) == c);
  CHECK_THROWS_AS(read_netlist(dir / "missing.json"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("benign generator output is valid and deterministic") {
  for (uint64_t seed : {1ull, 7ull, 42ull}) {
    Circuit a = gen_random_benign(200, seed, false);
    Circuit b = gen_random_benign(200, seed, false);
    CHECK(a == b);
    CHECK_NOTHROW(validate(a));
    int gates = 0;
    for (CellType t : a.types) {
      CHECK(t != CellType::Xor);
      CHECK(!is_flipflop(t));
      if (t != CellType::Input && t != CellType::Output) ++gates;
    }
    CHECK(gates >= 180);
    CHECK(gates <= 220);
  }
  CHECK(gen_random_benign(200, 1, false) != gen_random_benign(200, 2, false));
}

TEST_CASE("benign generator emits flipflops on request") {
  Circuit c = gen_random_benign(300, 5, true);
  CHECK_NOTHROW(validate(c));
  int ffs = 0;
  for (CellType t : c.types) ffs += is_flipflop(t);
  CHECK(ffs > 0);
}

TEST_CASE("cycle simulator reproduces the full adder truth table") {
  Circuit c = full_adder();
  SimSchedule sched(c);
  CycleSim<uint8_t> sim(sched);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int cin = 0; cin < 2; ++cin) {
        sim.step({(uint8_t)a, (uint8_t)b, (uint8_t)cin});
        const int total = a + b + cin;
        CHECK((sim.value(8) & 1) == (total & 1));
        CHECK((sim.value(9) & 1) == (total >> 1));
      }
}

TEST_CASE("flipflops delay by one cycle and reset to zero") {
  Circuit c = dff_delay_line();
  SimSchedule sched(c);
  CycleSim<uint8_t> sim(sched);
  const std::vector<int> stream = {1, 0, 1, 1, 0, 1, 0, 0, 1};
  for (size_t t = 0; t < stream.size(); ++t) {
    sim.step({(uint8_t)stream[t]});
    const int expect = t >= 2 ? stream[t - 2] : 0;
    CHECK((sim.value(3) & 1) == expect);
  }
  sim.reset();
  sim.step({0});
  CHECK((sim.value(3) & 1) == 0);
}

TEST_CASE("word lanes simulate independent streams") {
  Rng rng(99);
  Circuit c = gen_random_benign(120, 3, true);
  SimSchedule sched(c);
  CycleSim<uint64_t> wide(sched);
  std::vector<CycleSim<uint8_t>> lanes(8, CycleSim<uint8_t>(sched));
  for (int t = 0; t < 50; ++t) {
    std::vector<uint64_t> words(c.inputs.size());
    for (auto& w : words) w = rng.next() & 0xFF;
    for (int k = 0; k < 8; ++k) {
      std::vector<uint8_t> bits(c.inputs.size());
      for (size_t i = 0; i < words.size(); ++i)
        bits[i] = (uint8_t)((words[i] >> k) & 1);
      lanes[(size_t)k].step(bits);
    }
    wide.step(words);
    for (int v = 0; v < c.node_count(); ++v)
      for (int k = 0; k < 8; ++k)
        CHECK(((wide.value(v) >> k) & 1) == (lanes[(size_t)k].value(v) & 1));
  }
}
