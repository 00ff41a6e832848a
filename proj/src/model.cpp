#include "gatenet/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "gatenet/kernels.hpp"
#include "gatenet/metrics.hpp"
#include "gatenet/nn_ops.hpp"
#include "gatenet/rng.hpp"
#include "gatenet/tape.hpp"

namespace gatenet {

namespace {

Matrix glorot(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  const double lim = std::sqrt(6.0 / (double)(rows + cols));
  for (size_t i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform_real(-lim, lim);
  return m;
}

struct Adam {
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t t = 0;
  std::vector<Matrix> m, v;

  Adam(const std::vector<Matrix*>& params, double lr_) : lr(lr_) {
    for (const Matrix* p : params) {
      m.emplace_back(p->rows(), p->cols());
      v.emplace_back(p->rows(), p->cols());
    }
  }

  void step(const std::vector<Matrix*>& params,
            const std::vector<const Matrix*>& grads) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, (double)t);
    const double bc2 = 1.0 - std::pow(beta2, (double)t);
    for (size_t k = 0; k < params.size(); ++k) {
      double* p = params[k]->data();
      const double* g = grads[k]->data();
      double* mk = m[k].data();
      double* vk = v[k].data();
      for (size_t i = 0; i < params[k]->size(); ++i) {
        mk[i] = beta1 * mk[i] + (1.0 - beta1) * g[i];
        vk[i] = beta2 * vk[i] + (1.0 - beta2) * g[i] * g[i];
        p[i] -= lr * (mk[i] / bc1) / (std::sqrt(vk[i] / bc2) + eps);
      }
    }
  }
};

std::vector<int> graph_labels(const std::vector<InfGraph>& infs) {
  std::vector<int> labels;
  labels.reserve(infs.size());
  for (const InfGraph& g : infs) labels.push_back(g.label);
  return labels;
}

/// Batches of indices. Stratified mode deals each class's shuffled indices
/// round-robin so every batch sees both classes; min_size merges too-small
/// batches (the contrastive loss needs pairs).
std::vector<std::vector<size_t>> make_batches(const std::vector<int>& labels,
                                              int batch_size, bool stratify,
                                              size_t min_size, Rng& rng) {
  const size_t n = labels.size();
  const size_t nb = std::max<size_t>(1, (n + batch_size - 1) / batch_size);
  std::vector<std::vector<size_t>> batches(nb);
  if (stratify) {
    for (int cls = 0; cls <= 1; ++cls) {
      std::vector<size_t> idx;
      for (size_t i = 0; i < n; ++i)
        if (labels[i] == cls) idx.push_back(i);
      rng.shuffle(idx);
      for (size_t i = 0; i < idx.size(); ++i)
        batches[i % nb].push_back(idx[i]);
    }
  } else {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (size_t i = 0; i < n; ++i) batches[i / batch_size].push_back(idx[i]);
  }
  std::vector<std::vector<size_t>> out;
  for (auto& b : batches)
    if (!b.empty()) {
      if (b.size() < min_size && !out.empty())
        out.back().insert(out.back().end(), b.begin(), b.end());
      else
        out.push_back(std::move(b));
    }
  return out;
}

/// S X, with S rebuilt on the fly; the result is the first layer's constant
/// left factor.
Matrix first_layer_const(const InfGraph& inf) {
  const Matrix s = nn::inf_normalized_adjacency(inf);
  const Matrix x = nn::inf_one_hot(inf);
  Matrix c0(s.rows(), x.cols());
  kernels::active().gemm_zskip(s.data(), x.data(), c0.data(), s.rows(), s.cols(),
                               x.cols(), false);
  return c0;
}

struct EncoderIds {
  int t1, t2, t3, pj;
};

int encoder_forward(nn::Tape& tape, const InfGraph& inf, const Matrix& c0,
                    const EncoderIds& p) {
  const int s = tape.constant(nn::inf_normalized_adjacency(inf));
  const int c = tape.constant(c0);
  const int h1 = tape.relu(tape.matmul(c, p.t1));
  const int h2 = tape.relu(tape.matmul(tape.matmul_zskip(s, h1), p.t2));
  const int h3 = tape.relu(tape.matmul(tape.matmul_zskip(s, h2), p.t3));
  const int u = tape.l2_normalize_row(tape.mean_pool_rows(h3));
  return tape.l2_normalize_row(tape.matmul(u, p.pj));
}

struct FcnIds {
  int w1, b1, w2, b2, w3, b3;
};

FcnIds push_fcn(nn::Tape& tape, const FcnState& fcn) {
  return {tape.param(fcn.w1), tape.param(fcn.b1), tape.param(fcn.w2),
          tape.param(fcn.b2), tape.param(fcn.w3), tape.param(fcn.b3)};
}

int fcn_forward_on_tape(nn::Tape& tape, int z, const FcnIds& p) {
  int a = tape.relu(tape.add_row_vec(tape.matmul(z, p.w1), p.b1));
  a = tape.relu(tape.add_row_vec(tape.matmul(a, p.w2), p.b2));
  return tape.sigmoid(tape.add_row_vec(tape.matmul(a, p.w3), p.b3));
}

void check_finite_loss(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string(what) + ": non-finite loss");
}

}  // namespace

EncoderState init_encoder(const TrainConfig& cfg, uint64_t seed) {
  Rng rng(seed);
  EncoderState enc;
  enc.theta1 = glorot(rng, kNumCellTypes, cfg.q);
  enc.theta2 = glorot(rng, cfg.q, cfg.q);
  enc.theta3 = glorot(rng, cfg.q, cfg.q);
  enc.proj = glorot(rng, cfg.q, cfg.q_proj);
  return enc;
}

FcnState init_fcn(const TrainConfig& cfg, uint64_t seed) {
  Rng rng(seed);
  FcnState fcn;
  fcn.w1 = glorot(rng, cfg.q_proj, cfg.fcn_hidden1);
  fcn.b1 = Matrix(1, cfg.fcn_hidden1);
  fcn.w2 = glorot(rng, cfg.fcn_hidden1, cfg.fcn_hidden2);
  fcn.b2 = Matrix(1, cfg.fcn_hidden2);
  fcn.w3 = glorot(rng, cfg.fcn_hidden2, 1);
  fcn.b3 = Matrix(1, 1);
  return fcn;
}

std::vector<double> encode(const InfGraph& inf, const EncoderState& enc) {
  if (inf.node_count() == 0)
    throw std::invalid_argument("encode: empty graph");
  const Matrix s = nn::inf_normalized_adjacency(inf);
  Matrix h = nn::gcn_layer_forward(nn::inf_one_hot(inf), s, enc.theta1);
  h = nn::gcn_layer_forward(h, s, enc.theta2);
  h = nn::gcn_layer_forward(h, s, enc.theta3);
  const auto u = nn::l2_normalize(nn::mean_pool(h));
  std::vector<double> v(enc.q_proj(), 0.0);
  kernels::active().gemm_nn(u.data(), enc.proj.data(), v.data(), 1, enc.q(),
                            enc.q_proj(), false);
  return nn::l2_normalize(v);
}

Matrix encode_dataset(const std::vector<InfGraph>& infs,
                      const EncoderState& enc, int jobs) {
  Matrix z((int)infs.size(), enc.q_proj());
  auto work = [&](size_t i) {
    const auto v = encode(infs[i], enc);
    std::copy(v.begin(), v.end(), z.row((int)i));
  };
  if (jobs <= 1) {
    for (size_t i = 0; i < infs.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < infs.size();
             i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }
  return z;
}

PretrainResult pretrain_contrastive(const std::vector<InfGraph>& infs,
                                    const TrainConfig& cfg) {
  const auto labels = graph_labels(infs);
  const bool has0 = std::count(labels.begin(), labels.end(), 0) > 0;
  const bool has1 = std::count(labels.begin(), labels.end(), 1) > 0;
  if (!has0 || !has1)
    throw std::invalid_argument(
        "pretrain_contrastive: training set must contain both classes");

  PretrainResult res;
  EncoderState enc = init_encoder(cfg, mix_seed(cfg.seed, 1));
  auto snapshot_wanted = [&](int e) {
    return std::find(cfg.snapshot_epochs.begin(), cfg.snapshot_epochs.end(),
                     e) != cfg.snapshot_epochs.end();
  };
  if (snapshot_wanted(0)) res.snapshots.emplace_back(0, enc);

  std::vector<Matrix> c0;
  c0.reserve(infs.size());
  for (const InfGraph& g : infs) c0.push_back(first_layer_const(g));

  std::vector<Matrix*> params{&enc.theta1, &enc.theta2, &enc.theta3,
                              &enc.proj};
  Adam opt(params, cfg.learning_rate);
  Rng batch_rng(mix_seed(cfg.seed, 2));

  for (int epoch = 1; epoch <= cfg.epochs_pretrain; ++epoch) {
    const auto batches =
        make_batches(labels, cfg.batch_size, cfg.stratify, 2, batch_rng);
    double loss_sum = 0.0;
    size_t anchors = 0;
    for (const auto& batch : batches) {
      nn::Tape tape;
      const EncoderIds ids{tape.param(enc.theta1), tape.param(enc.theta2),
                           tape.param(enc.theta3), tape.param(enc.proj)};
      std::vector<int> zrows;
      std::vector<int> blabels;
      for (size_t i : batch) {
        zrows.push_back(encoder_forward(tape, infs[i], c0[i], ids));
        blabels.push_back(labels[i]);
      }
      const int loss =
          tape.supcon_loss(tape.stack_rows(zrows), blabels, cfg.tau);
      const double lv = tape.scalar(loss);
      check_finite_loss(lv, "pretrain_contrastive");
      loss_sum += lv;
      anchors += batch.size();
      tape.backward(loss);
      opt.step(params, {&tape.grad(ids.t1), &tape.grad(ids.t2),
                        &tape.grad(ids.t3), &tape.grad(ids.pj)});
    }
    res.loss_log.push_back(loss_sum / (double)anchors);
    if (snapshot_wanted(epoch)) res.snapshots.emplace_back(epoch, enc);
  }
  res.encoder = std::move(enc);
  return res;
}

ClassifierResult train_classifier(const EncoderState& enc,
                                  const std::vector<InfGraph>& infs,
                                  const TrainConfig& cfg) {
  if (infs.empty())
    throw std::invalid_argument("train_classifier: empty training set");
  const auto labels = graph_labels(infs);
  const Matrix z = encode_dataset(infs, enc);

  ClassifierResult res;
  res.fcn = init_fcn(cfg, mix_seed(cfg.seed, 3));
  std::vector<Matrix*> params{&res.fcn.w1, &res.fcn.b1, &res.fcn.w2,
                              &res.fcn.b2, &res.fcn.w3, &res.fcn.b3};
  Adam opt(params, cfg.learning_rate);
  Rng batch_rng(mix_seed(cfg.seed, 4));

  for (int epoch = 1; epoch <= cfg.epochs_classify; ++epoch) {
    const auto batches =
        make_batches(labels, cfg.batch_size, false, 1, batch_rng);
    double loss_sum = 0.0;
    for (const auto& batch : batches) {
      Matrix zb((int)batch.size(), z.cols());
      std::vector<double> targets;
      for (size_t r = 0; r < batch.size(); ++r) {
        std::copy(z.row((int)batch[r]), z.row((int)batch[r]) + z.cols(),
                  zb.row((int)r));
        targets.push_back((double)labels[batch[r]]);
      }
      nn::Tape tape;
      const int zc = tape.constant(std::move(zb));
      const FcnIds ids = push_fcn(tape, res.fcn);
      const int loss = tape.bce_loss(fcn_forward_on_tape(tape, zc, ids),
                                     std::move(targets));
      const double lv = tape.scalar(loss);
      check_finite_loss(lv, "train_classifier");
      loss_sum += lv * (double)batch.size();
      tape.backward(loss);
      opt.step(params,
               {&tape.grad(ids.w1), &tape.grad(ids.b1), &tape.grad(ids.w2),
                &tape.grad(ids.b2), &tape.grad(ids.w3), &tape.grad(ids.b3)});
    }
    res.loss_log.push_back(loss_sum / (double)infs.size());
  }
  return res;
}

NoContResult train_nocont(const std::vector<InfGraph>& infs,
                          const TrainConfig& cfg) {
  if (infs.empty())
    throw std::invalid_argument("train_nocont: empty training set");
  const auto labels = graph_labels(infs);

  NoContResult res;
  res.encoder = init_encoder(cfg, mix_seed(cfg.seed, 1));
  res.fcn = init_fcn(cfg, mix_seed(cfg.seed, 3));

  std::vector<Matrix> c0;
  c0.reserve(infs.size());
  for (const InfGraph& g : infs) c0.push_back(first_layer_const(g));

  std::vector<Matrix*> params{&res.encoder.theta1, &res.encoder.theta2,
                              &res.encoder.theta3, &res.encoder.proj,
                              &res.fcn.w1,         &res.fcn.b1,
                              &res.fcn.w2,         &res.fcn.b2,
                              &res.fcn.w3,         &res.fcn.b3};
  Adam opt(params, cfg.learning_rate);
  Rng batch_rng(mix_seed(cfg.seed, 5));

  for (int epoch = 1; epoch <= cfg.epochs_classify; ++epoch) {
    const auto batches =
        make_batches(labels, cfg.batch_size, cfg.stratify, 1, batch_rng);
    double loss_sum = 0.0;
    for (const auto& batch : batches) {
      nn::Tape tape;
      const EncoderIds eids{
          tape.param(res.encoder.theta1), tape.param(res.encoder.theta2),
          tape.param(res.encoder.theta3), tape.param(res.encoder.proj)};
      const FcnIds fids = push_fcn(tape, res.fcn);
      std::vector<int> zrows;
      std::vector<double> targets;
      for (size_t i : batch) {
        zrows.push_back(encoder_forward(tape, infs[i], c0[i], eids));
        targets.push_back((double)labels[i]);
      }
      const int zb = tape.stack_rows(zrows);
      const int loss = tape.bce_loss(fcn_forward_on_tape(tape, zb, fids),
                                     std::move(targets));
      const double lv = tape.scalar(loss);
      check_finite_loss(lv, "train_nocont");
      loss_sum += lv * (double)batch.size();
      tape.backward(loss);
      opt.step(params, {&tape.grad(eids.t1), &tape.grad(eids.t2),
                        &tape.grad(eids.t3), &tape.grad(eids.pj),
                        &tape.grad(fids.w1), &tape.grad(fids.b1),
                        &tape.grad(fids.w2), &tape.grad(fids.b2),
                        &tape.grad(fids.w3), &tape.grad(fids.b3)});
    }
    res.loss_log.push_back(loss_sum / (double)infs.size());
  }
  return res;
}

double fcn_forward(const FcnState& fcn, const std::vector<double>& z) {
  if ((int)z.size() != fcn.w1.rows())
    throw std::invalid_argument("fcn_forward: embedding dimension mismatch");
  const auto& ops = kernels::active();
  auto affine = [&](const std::vector<double>& in, const Matrix& w,
                    const Matrix& b) {
    std::vector<double> out(b.cols());
    std::copy(b.data(), b.data() + b.cols(), out.begin());
    ops.gemm_nn(in.data(), w.data(), out.data(), 1, w.rows(), w.cols(), true);
    return out;
  };
  std::vector<double> a = affine(z, fcn.w1, fcn.b1);
  ops.relu(a.data(), a.data(), a.size());
  a = affine(a, fcn.w2, fcn.b2);
  ops.relu(a.data(), a.data(), a.size());
  a = affine(a, fcn.w3, fcn.b3);
  return nn::sigmoid(a[0]);
}

std::pair<double, int> predict(const InfGraph& inf, const EncoderState& enc,
                               const FcnState& fcn, double threshold) {
  const double p = fcn_forward(fcn, encode(inf, enc));
  return {p, p >= threshold ? 1 : 0};
}

double linear_probe_f1(const Matrix& train_z, const std::vector<int>& train_y,
                       const Matrix& test_z, const std::vector<int>& test_y) {
  if ((size_t)train_z.rows() != train_y.size() ||
      (size_t)test_z.rows() != test_y.size())
    throw std::invalid_argument("linear_probe_f1: rows/labels mismatch");
  const int d = train_z.cols();
  const int m = train_z.rows();
  const auto& ops = kernels::active();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> gw(d);
  for (int it = 0; it < 500; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (int i = 0; i < m; ++i) {
      const double p =
          nn::sigmoid(ops.dot(train_z.row(i), w.data(), (size_t)d) + b);
      const double e = (p - (double)train_y[i]) / (double)m;
      ops.axpy(e, train_z.row(i), gw.data(), (size_t)d);
      gb += e;
    }
    ops.axpy(-0.1, gw.data(), w.data(), (size_t)d);
    b -= 0.1 * gb;
  }
  std::vector<int> pred;
  pred.reserve(test_y.size());
  for (int i = 0; i < test_z.rows(); ++i) {
    const double p =
        nn::sigmoid(ops.dot(test_z.row(i), w.data(), (size_t)d) + b);
    pred.push_back(p >= 0.5 ? 1 : 0);
  }
  return compute_metrics(pred, test_y).f1;
}

double mean_intra_class_cosine(const Matrix& z,
                               const std::vector<int>& labels) {
  if ((size_t)z.rows() != labels.size())
    throw std::invalid_argument("mean_intra_class_cosine: length mismatch");
  const auto& ops = kernels::active();
  double sum = 0.0;
  int64_t pairs = 0;
  for (int i = 0; i < z.rows(); ++i)
    for (int j = i + 1; j < z.rows(); ++j)
      if (labels[i] == labels[j]) {
        sum += ops.dot(z.row(i), z.row(j), (size_t)z.cols());
        ++pairs;
      }
  return pairs == 0 ? 0.0 : sum / (double)pairs;
}

}  // namespace gatenet
