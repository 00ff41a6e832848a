#include "gatenet/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gatenet/kernels.hpp"

namespace gatenet::nn {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Matrix normalize_adjacency(int dim,
                           const std::vector<std::pair<int, int>>& edges) {
  require(dim >= 1, "normalize_adjacency: dim must be >= 1");
  Matrix a(dim, dim);
  for (auto [s, d] : edges) {
    require(s >= 0 && s < dim && d >= 0 && d < dim,
            "normalize_adjacency: edge endpoint out of range");
    a.at(s, d) = 1.0;
    a.at(d, s) = 1.0;
  }
  for (int i = 0; i < dim; ++i) a.at(i, i) = 1.0;
  std::vector<double> dinv(dim);
  for (int i = 0; i < dim; ++i) {
    double deg = 0.0;
    for (int j = 0; j < dim; ++j) deg += a.at(i, j);
    dinv[i] = 1.0 / std::sqrt(deg);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a.at(i, j) *= dinv[i] * dinv[j];
  return a;
}

Matrix normalize_adjacency(const AdjacencyMatrix& a) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      if (a.at(i, j)) edges.emplace_back(i, j);
  return normalize_adjacency(a.dim, edges);
}

Matrix inf_normalized_adjacency(const InfGraph& inf) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(inf.edges.size());
  for (const Edge& e : inf.edges)
    edges.emplace_back(inf_local_index(inf, e.src),
                       inf_local_index(inf, e.dst));
  return normalize_adjacency(inf.node_count(), edges);
}

Matrix inf_one_hot(const InfGraph& inf) {
  Matrix x(inf.node_count(), kNumCellTypes);
  for (int32_t i = 0; i < inf.node_count(); ++i)
    x.at(i, (int)inf.types[i]) = 1.0;
  return x;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(),
                            b.cols(), false);
  return c;
}

Matrix gcn_layer_forward(const Matrix& h, const Matrix& s,
                         const Matrix& theta) {
  require(s.rows() == s.cols(), "gcn_layer_forward: s must be square");
  require(s.cols() == h.rows(), "gcn_layer_forward: s/h shape mismatch");
  require(h.cols() == theta.rows(), "gcn_layer_forward: h/theta shape mismatch");
  require(h.all_finite() && theta.all_finite(),
          "gcn_layer_forward: non-finite input");
  const auto& ops = kernels::active();
  Matrix sh(s.rows(), h.cols());
  ops.gemm_zskip(s.data(), h.data(), sh.data(), s.rows(), s.cols(), h.cols(), false);
  Matrix out(sh.rows(), theta.cols());
  ops.gemm_nn(sh.data(), theta.data(), out.data(), sh.rows(), sh.cols(),
              theta.cols(), false);
  ops.relu(out.data(), out.data(), out.size());
  return out;
}

std::vector<double> mean_pool(const Matrix& h) {
  require(h.rows() >= 1, "mean_pool: empty matrix");
  std::vector<double> out(h.cols(), 0.0);
  for (int i = 0; i < h.rows(); ++i)
    for (int j = 0; j < h.cols(); ++j) out[j] += h.at(i, j);
  for (double& v : out) v /= (double)h.rows();
  return out;
}

std::vector<double> l2_normalize(const std::vector<double>& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 == 0.0)
    throw std::domain_error(
        "l2_normalize: zero vector; guard upstream or add an epsilon before "
        "normalizing");
  const double inv = 1.0 / std::sqrt(n2);
  std::vector<double> out(v);
  for (double& x : out) x *= inv;
  return out;
}

double supcon_loss(const Matrix& z, const std::vector<int>& labels,
                   double tau) {
  require(tau > 0.0, "supcon_loss: tau must be positive");
  require((size_t)z.rows() == labels.size(),
          "supcon_loss: z rows and labels length differ");
  require(z.rows() >= 2, "supcon_loss: need at least 2 vectors");
  const int n = z.rows();
  const auto& ops = kernels::active();
  double loss = 0.0;
  std::vector<double> sim(n);
  for (int i = 0; i < n; ++i) {
    int npos = 0;
    for (int j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) ++npos;
    if (npos == 0) continue;
    double mx = -1e300;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sim[j] = ops.dot(z.row(i), z.row(j), (size_t)z.cols()) / tau;
      mx = std::max(mx, sim[j]);
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) denom += std::exp(sim[j] - mx);
    const double log_denom = mx + std::log(denom);
    double anchor = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) anchor += sim[j] - log_denom;
    loss -= anchor / (double)npos;
  }
  return loss;
}

double bce_loss(const std::vector<double>& yhat,
                const std::vector<double>& y) {
  require(yhat.size() == y.size(), "bce_loss: length mismatch");
  require(!yhat.empty(), "bce_loss: empty input");
  double loss = 0.0;
  for (size_t i = 0; i < yhat.size(); ++i) {
    const double p = std::clamp(yhat[i], 1e-7, 1.0 - 1e-7);
    loss -= y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
  }
  return loss / (double)yhat.size();
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace gatenet::nn
