#include "gatenet/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"
#include "json.hpp"

namespace gatenet {
namespace {

constexpr int kMaxDepth = 64;
constexpr int kBoostRounds = 50;
constexpr double kMinBoostError = 1e-10;

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<int>& y;
  int dim;
  int max_feats;
  Rng& rng;
  std::vector<TreeNode> nodes;
  std::vector<int> feat_pool;

  TreeBuilder(const std::vector<std::vector<double>>& x_,
              const std::vector<int>& y_, int dim_, int max_feats_, Rng& rng_)
      : x(x_), y(y_), dim(dim_), max_feats(max_feats_), rng(rng_) {
    feat_pool.resize((size_t)dim);
    for (int f = 0; f < dim; ++f) feat_pool[(size_t)f] = f;
  }

  int build(std::vector<int>& idx, int depth) {
    int node_id = (int)nodes.size();
    nodes.emplace_back();
    size_t n1 = 0;
    for (int i : idx) n1 += (size_t)y[(size_t)i];
    size_t n0 = idx.size() - n1;
    if (n0 == 0 || n1 == 0 || depth >= kMaxDepth || idx.size() < 2) {
      nodes[(size_t)node_id].label = n1 > n0 ? 1 : 0;
      return node_id;
    }

    for (int j = 0; j < max_feats; ++j) {
      size_t k = (size_t)j + (size_t)rng.uniform((uint64_t)(dim - j));
      std::swap(feat_pool[(size_t)j], feat_pool[k]);
    }

    int best_f = -1;
    double best_thr = 0.0;
    double best_cost = 1e300;
    std::vector<std::pair<double, int>> vals(idx.size());
    for (int j = 0; j < max_feats; ++j) {
      int f = feat_pool[(size_t)j];
      for (size_t i = 0; i < idx.size(); ++i)
        vals[i] = {x[(size_t)idx[i]][(size_t)f], y[(size_t)idx[i]]};
      std::sort(vals.begin(), vals.end());
      double l0 = 0, l1 = 0;
      double m = (double)idx.size();
      for (size_t k = 1; k < vals.size(); ++k) {
        l0 += vals[k - 1].second == 0;
        l1 += vals[k - 1].second == 1;
        if (vals[k - 1].first == vals[k].first) continue;
        double nl = (double)k, nr = m - nl;
        double r0 = (double)n0 - l0, r1 = (double)n1 - l1;
        double cost = nl - (l0 * l0 + l1 * l1) / nl +
                      nr - (r0 * r0 + r1 * r1) / nr;
        if (cost < best_cost) {
          best_cost = cost;
          best_f = f;
          best_thr = (vals[k - 1].first + vals[k].first) / 2.0;
        }
      }
    }
    if (best_f < 0) {
      nodes[(size_t)node_id].label = n1 > n0 ? 1 : 0;
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : idx)
      (x[(size_t)i][(size_t)best_f] <= best_thr ? left : right).push_back(i);
    if (left.empty() || right.empty()) {
      nodes[(size_t)node_id].label = n1 > n0 ? 1 : 0;
      return node_id;
    }
    nodes[(size_t)node_id].feature = best_f;
    nodes[(size_t)node_id].threshold = best_thr;
    int l = build(left, depth + 1);
    int r = build(right, depth + 1);
    nodes[(size_t)node_id].left = l;
    nodes[(size_t)node_id].right = r;
    return node_id;
  }
};

DecisionTree train_tree(const std::vector<std::vector<double>>& x,
                        const std::vector<int>& y, int dim, uint64_t seed) {
  Rng rng(seed);
  std::vector<int> idx(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    idx[i] = (int)rng.uniform((uint64_t)x.size());
  int max_feats = (int)std::ceil(std::sqrt((double)dim));
  TreeBuilder tb(x, y, dim, max_feats, rng);
  tb.build(idx, 0);
  return DecisionTree{std::move(tb.nodes)};
}

GaussianNb train_nb(const std::vector<std::vector<double>>& x,
                    const std::vector<int>& y, int dim) {
  GaussianNb nb;
  nb.prior.assign(2, 0.0);
  nb.mean.assign(2, std::vector<double>((size_t)dim, 0.0));
  nb.var.assign(2, std::vector<double>((size_t)dim, 0.0));
  double count[2] = {0, 0};
  for (size_t i = 0; i < x.size(); ++i) {
    int c = y[i];
    count[c] += 1;
    for (int f = 0; f < dim; ++f) nb.mean[(size_t)c][(size_t)f] += x[i][(size_t)f];
  }
  for (int c = 0; c < 2; ++c) {
    nb.prior[(size_t)c] = count[c] / (double)x.size();
    for (int f = 0; f < dim; ++f) nb.mean[(size_t)c][(size_t)f] /= count[c];
  }
  for (size_t i = 0; i < x.size(); ++i) {
    int c = y[i];
    for (int f = 0; f < dim; ++f) {
      double d = x[i][(size_t)f] - nb.mean[(size_t)c][(size_t)f];
      nb.var[(size_t)c][(size_t)f] += d * d;
    }
  }
  for (int c = 0; c < 2; ++c)
    for (int f = 0; f < dim; ++f)
      nb.var[(size_t)c][(size_t)f] = nb.var[(size_t)c][(size_t)f] / count[c] + 1e-9;
  return nb;
}

AdaBoost train_boost(const std::vector<std::vector<double>>& x,
                     const std::vector<int>& y, int dim) {
  size_t n = x.size();
  std::vector<std::vector<int>> order((size_t)dim, std::vector<int>(n));
  for (int f = 0; f < dim; ++f) {
    auto& ord = order[(size_t)f];
    for (size_t i = 0; i < n; ++i) ord[i] = (int)i;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      double va = x[(size_t)a][(size_t)f], vb = x[(size_t)b][(size_t)f];
      return va != vb ? va < vb : a < b;
    });
  }

  std::vector<double> w(n, 1.0 / (double)n);
  AdaBoost ab;
  for (int round = 0; round < kBoostRounds; ++round) {
    double wpos = 0;
    for (size_t i = 0; i < n; ++i)
      if (y[i] == 1) wpos += w[i];
    double wneg = 1.0 - wpos;

    Stump best;
    double best_err = 1e300;
    for (int f = 0; f < dim; ++f) {
      const auto& ord = order[(size_t)f];
      double lpos = 0, lneg = 0;
      for (size_t k = 1; k < n; ++k) {
        int i = ord[k - 1];
        (y[(size_t)i] == 1 ? lpos : lneg) += w[(size_t)i];
        double v0 = x[(size_t)i][(size_t)f];
        double v1 = x[(size_t)ord[k]][(size_t)f];
        if (v0 == v1) continue;
        double err_pos = lneg + (wpos - lpos);
        double err_neg = lpos + (wneg - lneg);
        if (err_pos < best_err) {
          best_err = err_pos;
          best = {f, (v0 + v1) / 2.0, 1, 0.0};
        }
        if (err_neg < best_err) {
          best_err = err_neg;
          best = {f, (v0 + v1) / 2.0, -1, 0.0};
        }
      }
    }
    if (best_err > 1e299) break;

    double err = std::max(best_err, kMinBoostError);
    err = std::min(err, 1.0 - kMinBoostError);
    best.alpha = 0.5 * std::log((1.0 - err) / err);
    ab.stumps.push_back(best);

    double sum = 0;
    for (size_t i = 0; i < n; ++i) {
      int h = x[i][(size_t)best.feature] <= best.threshold ? best.polarity
                                                           : -best.polarity;
      int yi = y[i] == 1 ? 1 : -1;
      w[i] *= std::exp(-best.alpha * (double)(yi * h));
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
  }
  return ab;
}

}  // namespace

int DecisionTree::predict(const std::vector<double>& x) const {
  int cur = 0;
  while (nodes[(size_t)cur].feature >= 0) {
    const TreeNode& nd = nodes[(size_t)cur];
    cur = x[(size_t)nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[(size_t)cur].label;
}

int GaussianNb::predict(const std::vector<double>& x) const {
  int best = 0;
  double best_ll = -1e300;
  for (int c = 0; c < 2; ++c) {
    double ll = std::log(prior[(size_t)c]);
    for (size_t f = 0; f < x.size(); ++f) {
      double v = var[(size_t)c][f];
      double d = x[f] - mean[(size_t)c][f];
      ll += -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
    if (ll > best_ll) {
      best_ll = ll;
      best = c;
    }
  }
  return best;
}

int AdaBoost::predict(const std::vector<double>& x) const {
  double s = 0;
  for (const Stump& st : stumps) {
    int h = x[(size_t)st.feature] <= st.threshold ? st.polarity : -st.polarity;
    s += st.alpha * (double)h;
  }
  return s > 0 ? 1 : 0;
}

int EnsembleModel::predict(const std::vector<double>& x) const {
  int votes1 = 0;
  for (const DecisionTree& t : forest) votes1 += t.predict(x);
  int forest_label = 2 * votes1 > (int)forest.size() ? 1 : 0;
  if (scheme == "kurihara9") return forest_label;
  int tally = forest_label + nb.predict(x) + boost.predict(x);
  return tally >= 2 ? 1 : 0;
}

EnsembleModel train_ensemble(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& y,
                             const EnsembleConfig& cfg,
                             const std::string& scheme) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("train_ensemble: bad row/label shape");
  if (scheme != "kurihara9" && scheme != "hoque10")
    throw std::invalid_argument("train_ensemble: unknown scheme " + scheme);
  if (cfg.trees < 1) throw std::invalid_argument("train_ensemble: trees < 1");
  int dim = (int)x[0].size();
  bool has[2] = {false, false};
  for (size_t i = 0; i < x.size(); ++i) {
    if ((int)x[i].size() != dim)
      throw std::invalid_argument("train_ensemble: ragged feature rows");
    if (y[i] != 0 && y[i] != 1)
      throw std::invalid_argument("train_ensemble: labels must be 0/1");
    has[y[i]] = true;
  }
  if (!has[0] || !has[1])
    throw std::invalid_argument("train_ensemble: both classes required");

  EnsembleModel model;
  model.scheme = scheme;
  model.forest.reserve((size_t)cfg.trees);
  for (int t = 0; t < cfg.trees; ++t)
    model.forest.push_back(train_tree(x, y, dim, mix_seed(cfg.seed, (uint64_t)t)));
  model.nb = train_nb(x, y, dim);
  model.boost = train_boost(x, y, dim);
  return model;
}

int classify_inf_by_net_votes(const EnsembleModel& model, const InfGraph& inf,
                              const std::vector<NetFeatureVector>& features,
                              double frac) {
  if (inf.nodes.empty())
    throw std::invalid_argument("classify_inf_by_net_votes: empty INF");
  std::unordered_map<NodeId, const NetFeatureVector*> by_id;
  by_id.reserve(features.size());
  for (const auto& f : features) by_id[f.net_id] = &f;
  int flagged = 0;
  for (NodeId v : inf.nodes) {
    auto it = by_id.find(v);
    if (it == by_id.end())
      throw std::invalid_argument("classify_inf_by_net_votes: no features for net " +
                                  std::to_string(v));
    flagged += model.predict(it->second->values);
  }
  return (double)flagged / (double)inf.nodes.size() > frac ? 1 : 0;
}

void save_ensemble(const std::filesystem::path& path,
                   const EnsembleModel& model) {
  nlohmann::ordered_json j;
  j["scheme"] = model.scheme;
  auto forest = nlohmann::ordered_json::array();
  for (const DecisionTree& t : model.forest) {
    auto tree = nlohmann::ordered_json::array();
    for (const TreeNode& nd : t.nodes)
      tree.push_back({{"feature", nd.feature},
                      {"threshold", nd.threshold},
                      {"left", nd.left},
                      {"right", nd.right},
                      {"label", nd.label}});
    forest.push_back(std::move(tree));
  }
  j["forest"] = std::move(forest);
  j["nb"] = {{"prior", model.nb.prior},
             {"mean", model.nb.mean},
             {"var", model.nb.var}};
  auto stumps = nlohmann::ordered_json::array();
  for (const Stump& st : model.boost.stumps)
    stumps.push_back({{"feature", st.feature},
                      {"threshold", st.threshold},
                      {"polarity", st.polarity},
                      {"alpha", st.alpha}});
  j["boost"] = std::move(stumps);
  write_file_atomic(path, j.dump(2) + "\n");
}

EnsembleModel load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  EnsembleModel model;
  try {
    model.scheme = j.at("scheme").get<std::string>();
    for (const auto& tree : j.at("forest")) {
      DecisionTree t;
      for (const auto& nd : tree)
        t.nodes.push_back({nd.at("feature").get<int>(),
                           nd.at("threshold").get<double>(),
                           nd.at("left").get<int>(), nd.at("right").get<int>(),
                           nd.at("label").get<int>()});
      model.forest.push_back(std::move(t));
    }
    model.nb.prior = j.at("nb").at("prior").get<std::vector<double>>();
    model.nb.mean =
        j.at("nb").at("mean").get<std::vector<std::vector<double>>>();
    model.nb.var = j.at("nb").at("var").get<std::vector<std::vector<double>>>();
    for (const auto& st : j.at("boost"))
      model.boost.stumps.push_back({st.at("feature").get<int>(),
                                    st.at("threshold").get<double>(),
                                    st.at("polarity").get<int>(),
                                    st.at("alpha").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (model.scheme != "kurihara9" && model.scheme != "hoque10")
    throw IoError(path.string() + ": unknown scheme " + model.scheme);
  if (model.forest.empty()) throw IoError(path.string() + ": empty forest");
  for (const DecisionTree& t : model.forest) {
    if (t.nodes.empty()) throw IoError(path.string() + ": empty tree");
    for (const TreeNode& nd : t.nodes) {
      bool leaf = nd.feature < 0;
      if (leaf && (nd.label != 0 && nd.label != 1))
        throw IoError(path.string() + ": bad leaf label");
      if (!leaf && (nd.left < 0 || nd.right < 0 ||
                    nd.left >= (int)t.nodes.size() ||
                    nd.right >= (int)t.nodes.size()))
        throw IoError(path.string() + ": tree child out of range");
    }
  }
  return model;
}

}  // namespace gatenet
