#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "gatenet/benign_gen.hpp"
#include "gatenet/inf.hpp"
#include "gatenet/matrix.hpp"
#include "gatenet/nn_ops.hpp"
#include "gatenet/rng.hpp"
#include "gatenet/tape.hpp"

using namespace gatenet;
using nn::Tape;

namespace {

Matrix random_matrix(Rng& rng, int r, int c, double lo = -1.5,
                     double hi = 1.5) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.at(i, j) = rng.uniform_real(lo, hi);
  return m;
}

/// Central finite differences of build() w.r.t. one parameter matrix.
/// build() must record a fresh tape and return (tape, loss id, param id).
void check_gradient(
    Matrix& param,
    const std::function<double(const Matrix&, Matrix* grad_out)>& eval,
    double rel_tol = 1e-5, double h = 1e-6) {
  Matrix grad;
  eval(param, &grad);
  REQUIRE(grad.same_shape(param));
  for (int i = 0; i < param.rows(); ++i)
    for (int j = 0; j < param.cols(); ++j) {
      Matrix p = param;
      p.at(i, j) += h;
      const double up = eval(p, nullptr);
      p.at(i, j) -= 2 * h;
      const double dn = eval(p, nullptr);
      const double fd = (up - dn) / (2 * h);
      const double an = grad.at(i, j);
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
      CHECK(std::abs(fd - an) / denom <= rel_tol);
    }
}

}  // namespace

TEST_CASE("matrix basics") {
  Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.at(1, 2) == 6);
  CHECK(m.all_finite());
  m.at(0, 0) = std::nan("");
  CHECK(!m.all_finite());
  CHECK(Matrix(2, 3).same_shape(m));
  CHECK(!Matrix(3, 2).same_shape(m));
}

TEST_CASE("normalized adjacency hand values") {
  Matrix single = nn::normalize_adjacency(1, {});
  CHECK(single.at(0, 0) == doctest::Approx(1.0));

  Matrix pair = nn::normalize_adjacency(2, {{0, 1}});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(pair.at(i, j) == doctest::Approx(0.5));

  Matrix path = nn::normalize_adjacency(3, {{0, 1}, {1, 2}});
  const double s = 1.0 / std::sqrt(6.0);
  CHECK(path.at(0, 0) == doctest::Approx(0.5));
  CHECK(path.at(0, 1) == doctest::Approx(s));
  CHECK(path.at(1, 0) == doctest::Approx(s));
  CHECK(path.at(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(path.at(1, 2) == doctest::Approx(s));
  CHECK(path.at(2, 2) == doctest::Approx(0.5));
  CHECK(path.at(0, 2) == 0.0);
  CHECK(path.at(2, 0) == 0.0);

  // Direction is irrelevant after symmetrization.
  CHECK(nn::normalize_adjacency(3, {{1, 0}, {2, 1}}) == path);
}

TEST_CASE("one hot features index cell types") {
  Circuit c = gen_random_benign(30, 2, true);
  InfGraph inf = extract_inf(c, c.outputs[0]);
  Matrix x = nn::inf_one_hot(inf);
  CHECK(x.rows() == inf.node_count());
  CHECK(x.cols() == kNumCellTypes);
  for (int i = 0; i < x.rows(); ++i) {
    double sum = 0;
    for (int j = 0; j < x.cols(); ++j) sum += x.at(i, j);
    CHECK(sum == 1.0);
    CHECK(x.at(i, (int)inf.types[(size_t)i]) == 1.0);
  }
}

TEST_CASE("supcon loss hand values") {
  // Two identical unit vectors in one class plus an orthogonal one in the
  // other: each populated anchor contributes -log(e / (e + 1)).
  Matrix z = Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}});
  const double got = nn::supcon_loss(z, {0, 0, 1}, 1.0);
  CHECK(got == doctest::Approx(0.6265233750364456).epsilon(1e-9));
  CHECK(std::abs(got - 0.626523) < 1e-6);

  // Lone positive pair: numerator equals the denominator.
  Matrix two = Matrix::from_rows({{0, 1}, {0, 1}});
  CHECK(nn::supcon_loss(two, {0, 0}, 1.0) == doctest::Approx(0.0));

  // All labels distinct: every anchor is skipped.
  Matrix three = Matrix::from_rows({{1, 0}, {0, 1}, {-1, 0}});
  CHECK(nn::supcon_loss(three, {0, 1, 2}, 0.07) == 0.0);

  CHECK_THROWS_AS(nn::supcon_loss(z, {0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(nn::supcon_loss(z, {0, 0, 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nn::supcon_loss(z, {0, 0, 1}, -1.0), std::invalid_argument);
}

TEST_CASE("bce loss hand values") {
  CHECK(std::abs(nn::bce_loss({0.9, 0.2}, {1, 0}) - 0.164252033486018) < 1e-9);
  CHECK(nn::bce_loss({0.5}, {1}) == doctest::Approx(std::log(2.0)));
  CHECK(nn::bce_loss({0.5}, {0}) == doctest::Approx(std::log(2.0)));
  // Saturated predictions are clamped, not infinite.
  CHECK(nn::bce_loss({1.0}, {1}) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(nn::bce_loss({0.0}, {1}) == doctest::Approx(-std::log(1e-7)));
  CHECK_THROWS_AS(nn::bce_loss({0.5, 0.5}, {1}), std::invalid_argument);
}

TEST_CASE("l2 normalize") {
  auto v = nn::l2_normalize({3.0, 4.0});
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(nn::l2_normalize({0.0, 0.0}), std::domain_error);
}

TEST_CASE("tape matmul and relu gradients") {
  Rng rng(7);
  Matrix a = random_matrix(rng, 3, 4);
  Matrix w = random_matrix(rng, 4, 2);
  auto eval = [&](const Matrix& p, Matrix* grad_out) {
    Tape tape;
    const int ca = tape.constant(a);
    const int cw = tape.param(p);
    const int y = tape.relu(tape.matmul(ca, cw));
    const int loss = tape.half_sum_squares(y);
    if (grad_out) {
      tape.backward(loss);
      *grad_out = tape.grad(cw);
    }
    return tape.scalar(loss);
  };
  check_gradient(w, eval);
}

TEST_CASE("tape zskip matmul equals dense matmul in value and gradient") {
  Rng rng(8);
  Matrix s = random_matrix(rng, 5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if ((i + j) % 3) s.at(i, j) = 0.0;
  // The zskip contract wants a symmetric constant factor.
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < i; ++j) s.at(i, j) = s.at(j, i);
  Matrix h = random_matrix(rng, 5, 3);

  Tape t1;
  const int p1 = t1.param(h);
  const int l1 = t1.half_sum_squares(t1.matmul(t1.constant(s), p1));
  t1.backward(l1);

  Tape t2;
  const int p2 = t2.param(h);
  const int l2 = t2.half_sum_squares(t2.matmul_zskip(t2.constant(s), p2));
  t2.backward(l2);

  CHECK(t1.scalar(l1) == doctest::Approx(t2.scalar(l2)).epsilon(1e-14));
  const Matrix& g1 = t1.grad(p1);
  const Matrix& g2 = t2.grad(p2);
  REQUIRE(g1.same_shape(g2));
  for (int i = 0; i < g1.rows(); ++i)
    for (int j = 0; j < g1.cols(); ++j)
      CHECK(g1.at(i, j) == doctest::Approx(g2.at(i, j)).epsilon(1e-13));
}

TEST_CASE("tape broadcast, pool and row normalize gradients") {
  Rng rng(9);
  Matrix a = random_matrix(rng, 4, 3);
  Matrix b = random_matrix(rng, 1, 3);

  auto eval_bias = [&](const Matrix& p, Matrix* grad_out) {
    Tape tape;
    const int ca = tape.constant(a);
    const int cb = tape.param(p);
    const int y = tape.sigmoid(tape.add_row_vec(ca, cb));
    const int loss = tape.half_sum_squares(y);
    if (grad_out) {
      tape.backward(loss);
      *grad_out = tape.grad(cb);
    }
    return tape.scalar(loss);
  };
  check_gradient(b, eval_bias);

  Matrix a2 = random_matrix(rng, 4, 3, 0.5, 1.5);
  auto eval_pool = [&](const Matrix& p, Matrix* grad_out) {
    Tape tape;
    const int ca = tape.param(p);
    const int pooled = tape.mean_pool_rows(ca);
    const int unit = tape.l2_normalize_row(pooled);
    // A non-symmetric weighting makes the normalize jacobian visible.
    Matrix w(3, 1);
    w.at(0, 0) = 0.3;
    w.at(1, 0) = -1.1;
    w.at(2, 0) = 0.7;
    const int loss = tape.half_sum_squares(tape.matmul(unit, tape.constant(w)));
    if (grad_out) {
      tape.backward(loss);
      *grad_out = tape.grad(ca);
    }
    return tape.scalar(loss);
  };
  check_gradient(a2, eval_pool);
}

TEST_CASE("tape stack rows gradient routes to each source") {
  Rng rng(10);
  Matrix r0 = random_matrix(rng, 1, 4);
  Matrix r1 = random_matrix(rng, 1, 4);
  auto eval = [&](const Matrix& p, Matrix* grad_out) {
    Tape tape;
    const int c0 = tape.param(p);
    const int c1 = tape.constant(r1);
    const int z = tape.stack_rows({c0, c1, c0});
    const int loss = tape.half_sum_squares(tape.sigmoid(z));
    if (grad_out) {
      tape.backward(loss);
      *grad_out = tape.grad(c0);
    }
    return tape.scalar(loss);
  };
  check_gradient(r0, eval);
}

TEST_CASE("tape supcon gradient matches finite differences") {
  Rng rng(11);
  std::vector<Matrix> rows;
  for (int i = 0; i < 5; ++i) rows.push_back(random_matrix(rng, 1, 3));
  const std::vector<int> labels = {0, 1, 0, 1, 0};
  for (double tau : {1.0, 0.07}) {
    for (int sel : {0, 1, 4}) {
      auto eval = [&](const Matrix& p, Matrix* grad_out) {
        Tape tape;
        std::vector<int> unit_rows;
        int pid = -1;
        for (int i = 0; i < 5; ++i) {
          const int src = i == sel ? (pid = tape.param(p))
                                   : tape.constant(rows[(size_t)i]);
          unit_rows.push_back(tape.l2_normalize_row(src));
        }
        const int zu = tape.stack_rows(unit_rows);
        const int loss = tape.supcon_loss(zu, labels, tau);
        if (grad_out) {
          tape.backward(loss);
          *grad_out = tape.grad(pid);
        }
        return tape.scalar(loss);
      };
      check_gradient(rows[(size_t)sel], eval, 1e-4);
    }
  }
}

TEST_CASE("tape bce gradient matches finite differences") {
  Rng rng(12);
  Matrix x = random_matrix(rng, 6, 2);
  Matrix w = random_matrix(rng, 2, 1);
  const std::vector<double> targets = {1, 0, 1, 1, 0, 0};
  auto eval = [&](const Matrix& p, Matrix* grad_out) {
    Tape tape;
    const int cx = tape.constant(x);
    const int cw = tape.param(p);
    const int yhat = tape.sigmoid(tape.matmul(cx, cw));
    const int loss = tape.bce_loss(yhat, targets);
    if (grad_out) {
      tape.backward(loss);
      *grad_out = tape.grad(cw);
    }
    return tape.scalar(loss);
  };
  check_gradient(w, eval);
}

TEST_CASE("three gcn layers see exactly a three hop neighborhood") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Circuit c = gen_random_benign(25, rng.next(), rep % 2 == 1);
    InfGraph inf = extract_inf(c, c.outputs[0]);
    const int n = inf.node_count();
    if (n < 6) continue;
    Matrix s = nn::inf_normalized_adjacency(inf);
    Matrix x = nn::inf_one_hot(inf);
    Matrix theta1 = random_matrix(rng, x.cols(), 7);
    Matrix theta2 = random_matrix(rng, 7, 7);
    Matrix theta3 = random_matrix(rng, 7, 7);
    auto forward = [&](const Matrix& feats) {
      Matrix h = nn::gcn_layer_forward(feats, s, theta1);
      h = nn::gcn_layer_forward(h, s, theta2);
      return nn::gcn_layer_forward(h, s, theta3);
    };
    const Matrix base = forward(x);

    // Undirected hop distances from node 0 over the nonzero pattern of S.
    std::vector<int> dist((size_t)n, -1);
    std::vector<int> queue{0};
    dist[0] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      const int v = queue[qi];
      for (int w = 0; w < n; ++w)
        if (w != v && s.at(v, w) != 0.0 && dist[(size_t)w] < 0) {
          dist[(size_t)w] = dist[(size_t)v] + 1;
          queue.push_back(w);
        }
    }
    bool perturbed = false;
    Matrix x2 = x;
    for (int v = 0; v < n; ++v)
      if (dist[(size_t)v] > 3 || dist[(size_t)v] < 0) {
        for (int j = 0; j < x2.cols(); ++j) x2.at(v, j) += 10.0;
        perturbed = true;
      }
    if (!perturbed) continue;
    const Matrix far = forward(x2);
    for (int j = 0; j < base.cols(); ++j)
      CHECK(far.at(0, j) == base.at(0, j));
  }
}
