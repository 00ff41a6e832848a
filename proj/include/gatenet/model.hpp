#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gatenet/inf.hpp"
#include "gatenet/matrix.hpp"

namespace gatenet {

struct EncoderState {
  Matrix theta1;  ///< 9 x q
  Matrix theta2;  ///< q x q
  Matrix theta3;  ///< q x q
  Matrix proj;    ///< q x q'
  int q() const { return theta1.cols(); }
  int q_proj() const { return proj.cols(); }
  bool operator==(const EncoderState&) const = default;
};

struct FcnState {
  Matrix w1, b1;  ///< q' x d1, 1 x d1
  Matrix w2, b2;  ///< d1 x d2, 1 x d2
  Matrix w3, b3;  ///< d2 x 1, 1 x 1
  bool operator==(const FcnState&) const = default;
};

struct TrainConfig {
  double tau = 0.07;
  int batch_size = 64;
  int epochs_pretrain = 150;
  int epochs_classify = 50;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  bool stratify = true;
  int q = 128;
  int q_proj = 256;
  int fcn_hidden1 = 128;
  int fcn_hidden2 = 64;
  std::vector<int> snapshot_epochs;  ///< pretraining epochs to snapshot

  bool operator==(const TrainConfig&) const = default;
};

EncoderState init_encoder(const TrainConfig& cfg, uint64_t seed);
FcnState init_fcn(const TrainConfig& cfg, uint64_t seed);

/// 3 GCN layers -> mean pool -> unit norm -> projection -> unit norm.
std::vector<double> encode(const InfGraph& inf, const EncoderState& enc);

/// One embedding row per graph; rows are independent, so `jobs` threads
/// produce identical output.
Matrix encode_dataset(const std::vector<InfGraph>& infs,
                      const EncoderState& enc, int jobs = 1);

struct PretrainResult {
  EncoderState encoder;
  std::vector<double> loss_log;  ///< per-epoch loss per anchor
  std::vector<std::pair<int, EncoderState>> snapshots;
};

/// Contrastive pretraining over stratified mini-batches with Adam. Labels
/// are taken from the graphs. Snapshot epoch e is the state after e epochs
/// (0 = initialization).
PretrainResult pretrain_contrastive(const std::vector<InfGraph>& infs,
                                    const TrainConfig& cfg);

struct ClassifierResult {
  FcnState fcn;
  std::vector<double> loss_log;
};

/// Trains the FCN head on frozen-encoder embeddings; `enc` is const and
/// never copied into the optimizer.
ClassifierResult train_classifier(const EncoderState& enc,
                                  const std::vector<InfGraph>& infs,
                                  const TrainConfig& cfg);

struct NoContResult {
  EncoderState encoder;
  FcnState fcn;
  std::vector<double> loss_log;
};

/// Ablation: encoder + head trained jointly end-to-end on cross-entropy for
/// epochs_classify epochs, no contrastive phase, no freezing.
NoContResult train_nocont(const std::vector<InfGraph>& infs,
                          const TrainConfig& cfg);

double fcn_forward(const FcnState& fcn, const std::vector<double>& z);

std::pair<double, int> predict(const InfGraph& inf, const EncoderState& enc,
                               const FcnState& fcn, double threshold = 0.5);

/// F1 of a logistic probe fit on (train_z, train_y), scored on test rows.
/// Zero-initialized full-batch gradient descent, so it is deterministic.
double linear_probe_f1(const Matrix& train_z, const std::vector<int>& train_y,
                       const Matrix& test_z, const std::vector<int>& test_y);

/// Mean cosine similarity over all same-label row pairs.
double mean_intra_class_cosine(const Matrix& z, const std::vector<int>& labels);

}  // namespace gatenet
