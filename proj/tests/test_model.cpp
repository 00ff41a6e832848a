#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gatenet/benign_gen.hpp"
#include "gatenet/checkpoint.hpp"
#include "gatenet/embedding.hpp"
#include "gatenet/manifest.hpp"
#include "gatenet/model.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/rng.hpp"
#include "gatenet/trigger.hpp"

using namespace gatenet;

namespace {

TrainConfig tiny_train_config() {
  TrainConfig cfg;
  cfg.tau = 0.07;
  cfg.batch_size = 8;
  cfg.epochs_pretrain = 10;
  cfg.epochs_classify = 10;
  cfg.learning_rate = 1e-2;
  cfg.seed = 7;
  cfg.q = 8;
  cfg.q_proj = 16;
  cfg.fcn_hidden1 = 8;
  cfg.fcn_hidden2 = 4;
  cfg.snapshot_epochs = {0, 10};
  return cfg;
}

std::vector<InfGraph> tiny_dataset(uint64_t seed) {
  Rng seeds(seed);
  std::vector<InfGraph> all;
  for (int i = 0; i < 2; ++i) {
    Circuit b = gen_random_benign(45, seeds.next(), false);
    b.name = "mdl_host_" + std::to_string(i);
    Trigger t = gen_comb_trigger(4, seeds.next());
    EmbeddedCircuit ec =
        embed_trigger(b, t, EmbedStrategy::shallow(2), seeds.next(),
                      "mdl_emb_" + std::to_string(i));
    auto infs = dataset_infs_for(ec, 6, seeds.next());
    all.insert(all.end(), infs.begin(), infs.end());
  }
  return all;
}

Circuit apply_permutation(const Circuit& c, const std::vector<NodeId>& perm) {
  Circuit out;
  out.name = c.name + "_perm";
  out.types.resize(c.types.size());
  for (NodeId v = 0; v < c.node_count(); ++v)
    out.types[(size_t)perm[(size_t)v]] = c.types[(size_t)v];
  for (const Edge& e : c.edges)
    out.edges.push_back({perm[(size_t)e.src], perm[(size_t)e.dst]});
  std::sort(out.edges.begin(), out.edges.end());
  for (NodeId v : c.inputs) out.inputs.push_back(perm[(size_t)v]);
  for (NodeId v : c.outputs) out.outputs.push_back(perm[(size_t)v]);
  std::sort(out.inputs.begin(), out.inputs.end());
  std::sort(out.outputs.begin(), out.outputs.end());
  validate(out);
  return out;
}

}  // namespace

TEST_CASE("initialization is deterministic and shaped correctly") {
  TrainConfig cfg = tiny_train_config();
  EncoderState a = init_encoder(cfg, 11);
  EncoderState b = init_encoder(cfg, 11);
  CHECK(a == b);
  CHECK(a.theta1.rows() == kNumCellTypes);
  CHECK(a.theta1.cols() == cfg.q);
  CHECK(a.theta2.rows() == cfg.q);
  CHECK(a.theta3.cols() == cfg.q);
  CHECK(a.proj.rows() == cfg.q);
  CHECK(a.proj.cols() == cfg.q_proj);
  CHECK(a.q() == cfg.q);
  CHECK(a.q_proj() == cfg.q_proj);
  CHECK(init_encoder(cfg, 12) != a);

  FcnState f = init_fcn(cfg, 13);
  CHECK(f == init_fcn(cfg, 13));
  CHECK(f.w1.rows() == cfg.q_proj);
  CHECK(f.w1.cols() == cfg.fcn_hidden1);
  CHECK(f.w2.cols() == cfg.fcn_hidden2);
  CHECK(f.w3.cols() == 1);
  for (const Matrix* bias : {&f.b1, &f.b2, &f.b3}) {
    CHECK(bias->rows() == 1);
    for (int j = 0; j < bias->cols(); ++j) CHECK(bias->at(0, j) == 0.0);
  }
}

TEST_CASE("embeddings are unit vectors and deterministic") {
  TrainConfig cfg = tiny_train_config();
  EncoderState enc = init_encoder(cfg, 3);
  auto infs = tiny_dataset(21);
  for (const InfGraph& g : infs) {
    auto z = encode(g, enc);
    REQUIRE((int)z.size() == cfg.q_proj);
    const double norm = std::sqrt(
        std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(encode(g, enc) == z);
  }
}

TEST_CASE("embedding is invariant to node relabeling") {
  Rng rng(31);
  TrainConfig cfg = tiny_train_config();
  EncoderState enc = init_encoder(cfg, 5);
  for (int rep = 0; rep < 5; ++rep) {
    Circuit c = gen_random_benign(40, rng.next(), true);
    std::vector<NodeId> perm((size_t)c.node_count());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Circuit pc = apply_permutation(c, perm);

    const NodeId root = c.outputs[0];
    auto z1 = encode(extract_inf(c, root), enc);
    auto z2 = encode(extract_inf(pc, perm[(size_t)root]), enc);
    REQUIRE(z1.size() == z2.size());
    for (size_t i = 0; i < z1.size(); ++i)
      CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-9));
  }
}

TEST_CASE("dataset encoding is identical across thread counts") {
  TrainConfig cfg = tiny_train_config();
  EncoderState enc = init_encoder(cfg, 9);
  auto infs = tiny_dataset(33);
  Matrix z1 = encode_dataset(infs, enc, 1);
  Matrix z4 = encode_dataset(infs, enc, 4);
  CHECK(z1 == z4);
  CHECK(z1.rows() == (int)infs.size());
}

TEST_CASE("contrastive pretraining learns and snapshots") {
  TrainConfig cfg = tiny_train_config();
  auto infs = tiny_dataset(55);
  PretrainResult r1 = pretrain_contrastive(infs, cfg);
  CHECK((int)r1.loss_log.size() == cfg.epochs_pretrain);
  for (double l : r1.loss_log) CHECK(std::isfinite(l));
  CHECK(r1.loss_log.back() < r1.loss_log.front());

  REQUIRE(r1.snapshots.size() == 2);
  CHECK(r1.snapshots[0].first == 0);
  CHECK(r1.snapshots[1].first == 10);
  CHECK(r1.snapshots[0].second == init_encoder(cfg, mix_seed(cfg.seed, 1)));
  CHECK(r1.snapshots[1].second == r1.encoder);
  CHECK(r1.snapshots[0].second != r1.encoder);

  PretrainResult r2 = pretrain_contrastive(infs, cfg);
  CHECK(r2.encoder == r1.encoder);
  CHECK(r2.loss_log == r1.loss_log);
}

TEST_CASE("classifier training freezes the encoder") {
  TrainConfig cfg = tiny_train_config();
  auto infs = tiny_dataset(77);
  EncoderState enc = init_encoder(cfg, mix_seed(cfg.seed, 1));
  const EncoderState before = enc;
  ClassifierResult cr = train_classifier(enc, infs, cfg);
  CHECK(enc == before);
  CHECK((int)cr.loss_log.size() == cfg.epochs_classify);
  for (double l : cr.loss_log) CHECK(std::isfinite(l));
  CHECK(cr.loss_log.back() < cr.loss_log.front());
  CHECK(train_classifier(enc, infs, cfg).fcn == cr.fcn);
}

TEST_CASE("ablation trains end to end") {
  TrainConfig cfg = tiny_train_config();
  auto infs = tiny_dataset(88);
  NoContResult nr = train_nocont(infs, cfg);
  CHECK((int)nr.loss_log.size() == cfg.epochs_classify);
  CHECK(nr.loss_log.back() < nr.loss_log.front());
  // The encoder moves: this is the unfrozen path.
  CHECK(nr.encoder != init_encoder(cfg, mix_seed(cfg.seed, 1)));
  NoContResult nr2 = train_nocont(infs, cfg);
  CHECK(nr2.encoder == nr.encoder);
  CHECK(nr2.fcn == nr.fcn);
}

TEST_CASE("prediction threshold is inclusive") {
  TrainConfig cfg = tiny_train_config();
  EncoderState enc = init_encoder(cfg, 2);
  FcnState fcn = init_fcn(cfg, 3);
  // Zero weights and biases give sigmoid(0) = 0.5 exactly.
  for (Matrix* w : {&fcn.w1, &fcn.b1, &fcn.w2, &fcn.b2, &fcn.w3, &fcn.b3})
    *w = Matrix(w->rows(), w->cols(), 0.0);
  auto infs = tiny_dataset(91);
  auto [p, label] = predict(infs[0], enc, fcn, 0.5);
  CHECK(p == doctest::Approx(0.5));
  CHECK(label == 1);
  CHECK(predict(infs[0], enc, fcn, 0.5001).second == 0);
  CHECK(fcn_forward(fcn, encode(infs[0], enc)) == doctest::Approx(0.5));
}

TEST_CASE("linear probe and intra class cosine behave on crafted data") {
  // Perfectly separable embeddings.
  Matrix train = Matrix::from_rows(
      {{1, 0}, {0.9, 0.1}, {0.8, -0.1}, {-1, 0}, {-0.9, 0.1}, {-0.85, 0}});
  std::vector<int> train_y = {1, 1, 1, 0, 0, 0};
  Matrix test = Matrix::from_rows({{0.95, 0}, {-0.95, 0.05}});
  std::vector<int> test_y = {1, 0};
  CHECK(linear_probe_f1(train, train_y, test, test_y) ==
        doctest::Approx(1.0));

  Matrix z = Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}});
  CHECK(mean_intra_class_cosine(z, {0, 0, 1}) == doctest::Approx(1.0));
  Matrix z2 = Matrix::from_rows({{1, 0}, {0, 1}});
  CHECK(mean_intra_class_cosine(z2, {0, 0}) == doctest::Approx(0.0));
  Matrix z3 = Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  CHECK(mean_intra_class_cosine(z3, {0, 0, 1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("checkpoints round trip bitwise") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gatenet_test_ckpt";
  fs::create_directories(dir);
  TrainConfig cfg = tiny_train_config();

  Checkpoint enc_only;
  enc_only.encoder = init_encoder(cfg, 41);
  enc_only.has_fcn = false;
  enc_only.config_json = R"({"demo":1})";
  const fs::path p1 = dir / "enc.ckpt";
  save_checkpoint(p1, enc_only);
  CHECK(load_checkpoint(p1) == enc_only);

  Checkpoint full = enc_only;
  full.fcn = init_fcn(cfg, 42);
  full.has_fcn = true;
  const fs::path p2 = dir / "full.ckpt";
  save_checkpoint(p2, full);
  CHECK(load_checkpoint(p2) == full);

  // Same state saved twice gives identical bytes.
  const fs::path p3 = dir / "full2.ckpt";
  save_checkpoint(p3, full);
  CHECK(read_file(p2) == read_file(p3));

  SUBCASE("corrupted magic") {
    std::string bytes = read_file(p2);
    bytes[0] = 'X';
    write_file_atomic(dir / "bad.ckpt", bytes);
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), IoError);
  }
  SUBCASE("unsupported version") {
    std::string bytes = read_file(p2);
    bytes[4] = 9;
    write_file_atomic(dir / "bad.ckpt", bytes);
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), IoError);
  }
  SUBCASE("truncation") {
    std::string bytes = read_file(p2);
    bytes.resize(bytes.size() - 7);
    write_file_atomic(dir / "bad.ckpt", bytes);
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), IoError);
  }
  SUBCASE("trailing garbage") {
    std::string bytes = read_file(p2) + "zz";
    write_file_atomic(dir / "bad.ckpt", bytes);
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), IoError);
  }
  fs::remove_all(dir);
}
