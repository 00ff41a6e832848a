#include "gatenet/baseline_features.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gatenet/logic_sim.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"

namespace gatenet {
namespace {

/// BFS distances from `starts` along `adj`, capped at `max_d` (-1 = no cap).
/// Unreached nodes stay -1.
std::vector<int> bfs_dist(const std::vector<std::vector<NodeId>>& adj,
                          const std::vector<NodeId>& starts, int max_d) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<NodeId> q;
  for (NodeId s : starts) {
    if (dist[(size_t)s] == -1) {
      dist[(size_t)s] = 0;
      q.push_back(s);
    }
  }
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop_front();
    int d = dist[(size_t)v];
    if (max_d >= 0 && d == max_d) continue;
    for (NodeId w : adj[(size_t)v]) {
      if (dist[(size_t)w] == -1) {
        dist[(size_t)w] = d + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

void check_net(const Circuit& c, NodeId net) {
  if (net < 0 || net >= c.node_count())
    throw std::out_of_range("net " + std::to_string(net) + " not in circuit");
}

struct KuriharaContext {
  explicit KuriharaContext(const Circuit& c)
      : adj(c),
        cycles(simple_cycles_up_to(c, 5)),
        dim(c.node_count()),
        sentinel(c.node_count() + 1) {
    std::vector<NodeId> ffs;
    for (NodeId v = 0; v < c.node_count(); ++v)
      if (is_flipflop(c.types[(size_t)v])) ffs.push_back(v);
    dist_from_pi = bfs_dist(adj.fanout, c.inputs, -1);
    dist_from_ff = bfs_dist(adj.fanout, ffs, -1);
    dist_to_ff = bfs_dist(adj.fanin, ffs, -1);
  }

  AdjacencyLists adj;
  std::vector<std::vector<NodeId>> cycles;
  int dim;
  int sentinel;
  std::vector<int> dist_from_pi;  ///< backward levels to nearest primary input
  std::vector<int> dist_from_ff;  ///< backward levels to nearest flipflop
  std::vector<int> dist_to_ff;    ///< forward levels to nearest flipflop
};

NetFeatureVector kurihara_one(const Circuit& c, const KuriharaContext& ctx,
                              NodeId net) {
  std::vector<int> back = bfs_dist(ctx.adj.fanin, {net}, 5);
  std::vector<int> fwd = bfs_dist(ctx.adj.fanout, {net}, 5);

  double fanin4 = 0, fanin5 = 0, ff_back4 = 0, ff_fwd3 = 0, ff_fwd4 = 0;
  for (NodeId v = 0; v < ctx.dim; ++v) {
    if (v != net && back[(size_t)v] >= 1) {
      if (back[(size_t)v] <= 4) fanin4 += 1;
      fanin5 += 1;
      if (back[(size_t)v] <= 4 && is_flipflop(c.types[(size_t)v]))
        ff_back4 += 1;
    }
    if (v != net && fwd[(size_t)v] >= 1 && is_flipflop(c.types[(size_t)v])) {
      if (fwd[(size_t)v] <= 3) ff_fwd3 += 1;
      if (fwd[(size_t)v] <= 4) ff_fwd4 += 1;
    }
  }

  auto touches = [&](const std::vector<NodeId>& cyc, const std::vector<int>& d,
                     int cap) {
    for (NodeId v : cyc)
      if (d[(size_t)v] >= 0 && d[(size_t)v] <= cap) return true;
    return false;
  };
  double loops_back4 = 0, loops_fwd5 = 0;
  for (const auto& cyc : ctx.cycles) {
    if ((int)cyc.size() <= 4 && touches(cyc, back, 4)) loops_back4 += 1;
    if ((int)cyc.size() <= 5 && touches(cyc, fwd, 5)) loops_fwd5 += 1;
  }

  auto level_or_sentinel = [&](int d) {
    return d < 0 ? (double)ctx.sentinel : (double)d;
  };
  double min_pi = level_or_sentinel(ctx.dist_from_pi[(size_t)net]);
  int dff_back = ctx.dist_from_ff[(size_t)net];
  int dff_fwd = ctx.dist_to_ff[(size_t)net];
  int dff = -1;
  if (dff_back >= 0) dff = dff_back;
  if (dff_fwd >= 0 && (dff < 0 || dff_fwd < dff)) dff = dff_fwd;
  double min_ff = level_or_sentinel(dff);

  NetFeatureVector f;
  f.scheme = "kurihara9";
  f.net_id = net;
  f.values = {fanin4, fanin5,     ff_back4,  ff_fwd3, ff_fwd4,
              loops_back4, loops_fwd5, min_pi, min_ff};
  return f;
}

NetFeatureVector hoque_one(const Circuit& c, const AdjacencyLists& adj,
                           const std::vector<int>& dist_from_pi,
                           const std::vector<int>& dist_to_po,
                           const SwitchingProfile& sp, NodeId net) {
  double sentinel = c.node_count() + 1;
  auto level_or_sentinel = [&](int d) { return d < 0 ? sentinel : (double)d; };
  NetFeatureVector f;
  f.scheme = "hoque10";
  f.net_id = net;
  f.values = {(double)adj.fanin[(size_t)net].size(),
              (double)adj.fanout[(size_t)net].size(),
              (double)(int)c.types[(size_t)net],
              level_or_sentinel(dist_from_pi[(size_t)net]),
              level_or_sentinel(dist_to_po[(size_t)net]),
              sp.static_probability[(size_t)net],
              sp.signal_rate[(size_t)net],
              sp.toggle_rate[(size_t)net],
              sp.min_toggle_rate[(size_t)net],
              1.0};
  return f;
}

}  // namespace

SwitchingProfile simulate_switching(const Circuit& c, int64_t cycles,
                                    uint64_t seed) {
  if (cycles < 1) throw std::invalid_argument("simulate_switching: cycles < 1");
  validate(c);
  SimSchedule sched(c);
  CycleSim<uint8_t> sim(sched);
  size_t n = (size_t)c.node_count();
  std::vector<int64_t> ones(n, 0), flips(n, 0);
  std::vector<uint8_t> prev(n, 0);
  Rng rng(seed);
  std::vector<uint8_t> bits(c.inputs.size());
  for (int64_t t = 0; t < cycles; ++t) {
    for (auto& b : bits) b = (uint8_t)rng.bit();
    sim.step(bits);
    const auto& vals = sim.values();
    for (size_t v = 0; v < n; ++v) {
      uint8_t x = vals[v] & 1;
      ones[v] += x;
      if (t > 0 && x != prev[v]) flips[v]++;
      prev[v] = x;
    }
  }

  SwitchingProfile sp;
  sp.cycles = cycles;
  sp.static_probability.resize(n);
  sp.signal_rate.resize(n);
  sp.toggle_rate.resize(n);
  sp.min_toggle_rate.resize(n);
  for (size_t v = 0; v < n; ++v) {
    sp.static_probability[v] = (double)ones[v] / (double)cycles;
    sp.signal_rate[v] = (double)flips[v] / (double)cycles;
    sp.toggle_rate[v] = (double)flips[v] / (2.0 * (double)cycles);
  }

  AdjacencyLists adj(c);
  for (size_t v = 0; v < n; ++v) {
    std::vector<int> d = bfs_dist(adj.fanin, {(NodeId)v}, -1);
    double mn = sp.toggle_rate[v];
    for (size_t u = 0; u < n; ++u)
      if (d[u] >= 0) mn = std::min(mn, sp.toggle_rate[u]);
    sp.min_toggle_rate[v] = mn;
  }
  return sp;
}

std::vector<std::vector<NodeId>> simple_cycles_up_to(const Circuit& c,
                                                     int max_len) {
  if (max_len < 1) return {};
  AdjacencyLists adj(c);
  std::vector<std::vector<NodeId>> cycles;
  std::vector<uint8_t> on_path((size_t)c.node_count(), 0);
  std::vector<NodeId> path;

  // Each directed simple cycle is emitted exactly once: rooted at its
  // minimum node id, all other nodes strictly greater.
  auto dfs = [&](auto&& self, NodeId root, NodeId v, int edges) -> void {
    for (NodeId w : adj.fanout[(size_t)v]) {
      if (w == root) {
        cycles.push_back(path);
      } else if (w > root && !on_path[(size_t)w] && edges + 1 < max_len) {
        on_path[(size_t)w] = 1;
        path.push_back(w);
        self(self, root, w, edges + 1);
        path.pop_back();
        on_path[(size_t)w] = 0;
      }
    }
  };
  for (NodeId s = 0; s < c.node_count(); ++s) {
    path = {s};
    on_path[(size_t)s] = 1;
    dfs(dfs, s, s, 0);
    on_path[(size_t)s] = 0;
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

NetFeatureVector kurihara_features(const Circuit& c, NodeId net) {
  check_net(c, net);
  KuriharaContext ctx(c);
  return kurihara_one(c, ctx, net);
}

std::vector<NetFeatureVector> kurihara_features_all(const Circuit& c) {
  KuriharaContext ctx(c);
  std::vector<NetFeatureVector> out;
  out.reserve((size_t)c.node_count());
  for (NodeId v = 0; v < c.node_count(); ++v)
    out.push_back(kurihara_one(c, ctx, v));
  return out;
}

NetFeatureVector hoque_features(const Circuit& c, NodeId net,
                                const SwitchingProfile& sp) {
  check_net(c, net);
  if ((int)sp.static_probability.size() != c.node_count())
    throw std::invalid_argument("switching profile does not match circuit");
  AdjacencyLists adj(c);
  std::vector<int> dist_from_pi = bfs_dist(adj.fanout, c.inputs, -1);
  std::vector<int> dist_to_po = bfs_dist(adj.fanin, c.outputs, -1);
  return hoque_one(c, adj, dist_from_pi, dist_to_po, sp, net);
}

std::vector<NetFeatureVector> hoque_features_all(const Circuit& c,
                                                 const SwitchingProfile& sp) {
  if ((int)sp.static_probability.size() != c.node_count())
    throw std::invalid_argument("switching profile does not match circuit");
  AdjacencyLists adj(c);
  std::vector<int> dist_from_pi = bfs_dist(adj.fanout, c.inputs, -1);
  std::vector<int> dist_to_po = bfs_dist(adj.fanin, c.outputs, -1);
  std::vector<NetFeatureVector> out;
  out.reserve((size_t)c.node_count());
  for (NodeId v = 0; v < c.node_count(); ++v)
    out.push_back(hoque_one(c, adj, dist_from_pi, dist_to_po, sp, v));
  return out;
}

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<NetFeatureVector>& rows,
                       const std::vector<int>& labels) {
  if (rows.size() != labels.size())
    throw std::invalid_argument("feature rows / labels length mismatch");
  size_t dim = rows.empty() ? 0 : rows[0].values.size();
  std::string out = "net_id,scheme";
  for (size_t i = 1; i <= dim; ++i) out += ",f" + std::to_string(i);
  out += ",label\n";
  char buf[40];
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].values.size() != dim || rows[r].scheme != rows[0].scheme)
      throw std::invalid_argument("inconsistent feature rows");
    out += std::to_string(rows[r].net_id);
    out += ',';
    out += rows[r].scheme;
    for (double v : rows[r].values) {
      snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += ',';
    out += std::to_string(labels[r]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

FeatureFile read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw IoError(path.string() + ": empty feature file");
  FeatureFile ff;
  size_t dim = 0;
  {
    std::stringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(col);
    if (cols.size() < 3 || cols.front() != "net_id" || cols[1] != "scheme" ||
        cols.back() != "label")
      throw IoError(path.string() + ": bad feature header");
    dim = cols.size() - 3;
  }
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    if (cols.size() != dim + 3)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": wrong column count");
    NetFeatureVector f;
    try {
      f.net_id = std::stoi(cols[0]);
      f.scheme = cols[1];
      for (size_t i = 0; i < dim; ++i)
        f.values.push_back(std::stod(cols[2 + i]));
      int label = std::stoi(cols.back());
      if (label != 0 && label != 1) throw std::invalid_argument("label");
      ff.labels.push_back(label);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": bad feature row");
    }
    ff.rows.push_back(std::move(f));
  }
  return ff;
}

}  // namespace gatenet
