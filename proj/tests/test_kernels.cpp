#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "gatenet/kernels.hpp"
#include "gatenet/rng.hpp"

using namespace gatenet;
using kernels::Ops;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double sparsity = 0.0) {
  std::vector<double> v(n);
  for (double& x : v)
    x = rng.bernoulli(sparsity) ? 0.0 : rng.uniform_real(-2.0, 2.0);
  return v;
}

/// Straightforward triple loop, no reassociation tricks.
void naive_gemm(const std::vector<double>& a, const std::vector<double>& b,
                std::vector<double>& c, int m, int k, int n, bool ta, bool tb,
                bool acc) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = acc ? c[(size_t)i * n + j] : 0.0;
      for (int p = 0; p < k; ++p) {
        const double av = ta ? a[(size_t)p * m + i] : a[(size_t)i * k + p];
        const double bv = tb ? b[(size_t)j * k + p] : b[(size_t)p * n + j];
        s += av * bv;
      }
      c[(size_t)i * n + j] = s;
    }
}

void check_close(const std::vector<double>& got,
                 const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < got.size(); ++i) {
    const double scale = std::max(1.0, std::abs(want[i]));
    CHECK(std::abs(got[i] - want[i]) <= tol * scale);
  }
}

void exercise_ops(const Ops& ops, double tol) {
  Rng rng(404);
  const int shapes[][3] = {{1, 1, 1},  {2, 3, 4},   {5, 5, 5},  {7, 13, 9},
                           {16, 8, 4}, {33, 17, 6}, {1, 64, 1}, {12, 1, 20}};
  for (const auto& sh : shapes) {
    const int m = sh[0], k = sh[1], n = sh[2];
    for (bool acc : {false, true}) {
      auto a = random_vec(rng, (size_t)m * k);
      auto b = random_vec(rng, (size_t)k * n);
      auto at = std::vector<double>((size_t)m * k);
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) at[(size_t)p * m + i] = a[(size_t)i * k + p];
      auto bt = std::vector<double>((size_t)k * n);
      for (int p = 0; p < k; ++p)
        for (int j = 0; j < n; ++j) bt[(size_t)j * k + p] = b[(size_t)p * n + j];
      auto seed_c = random_vec(rng, (size_t)m * n);

      std::vector<double> want = seed_c;
      naive_gemm(a, b, want, m, k, n, false, false, acc);

      std::vector<double> c = seed_c;
      ops.gemm_nn(a.data(), b.data(), c.data(), m, k, n, acc);
      check_close(c, want, tol);

      c = seed_c;
      ops.gemm_tn(at.data(), b.data(), c.data(), m, k, n, acc);
      check_close(c, want, tol);

      c = seed_c;
      ops.gemm_nt(a.data(), bt.data(), c.data(), m, k, n, acc);
      check_close(c, want, tol);

      auto sparse_a = random_vec(rng, (size_t)m * k, 0.8);
      want = seed_c;
      naive_gemm(sparse_a, b, want, m, k, n, false, false, acc);
      c = seed_c;
      ops.gemm_zskip(sparse_a.data(), b.data(), c.data(), m, k, n, acc);
      check_close(c, want, tol);
    }
  }

  for (size_t n : {1ull, 7ull, 64ull, 200ull}) {
    auto x = random_vec(rng, n);
    std::vector<double> y(n);
    ops.relu(x.data(), y.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(y[i] == std::max(0.0, x[i]));

    auto g = random_vec(rng, n);
    auto dx = random_vec(rng, n);
    auto dx_want = dx;
    for (size_t i = 0; i < n; ++i)
      if (y[i] > 0) dx_want[i] += g[i];
    ops.relu_backward(y.data(), g.data(), dx.data(), n);
    check_close(dx, dx_want, tol);

    auto y2 = random_vec(rng, n);
    auto y2_want = y2;
    ops.axpy(0.37, x.data(), y2.data(), n);
    for (size_t i = 0; i < n; ++i) y2_want[i] += 0.37 * x[i];
    check_close(y2, y2_want, tol);

    auto sx = x;
    ops.scale(-1.25, sx.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(sx[i] == doctest::Approx(-1.25 * x[i]));

    double want_dot = 0.0;
    for (size_t i = 0; i < n; ++i) want_dot += x[i] * g[i];
    CHECK(ops.dot(x.data(), g.data(), n) ==
          doctest::Approx(want_dot).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("scalar kernels match the naive reference") {
  exercise_ops(kernels::kScalarOps, 1e-13);
}

#ifdef GATENET_HAVE_AVX2_TU
TEST_CASE("avx2 kernels match the naive reference") {
  if (!kernels::cpu_has_avx2()) return;
  exercise_ops(kernels::kAvx2Ops, 1e-12);
}

TEST_CASE("avx2 and scalar agree on identical inputs") {
  if (!kernels::cpu_has_avx2()) return;
  Rng rng(11);
  const int m = 23, k = 31, n = 19;
  auto a = random_vec(rng, (size_t)m * k, 0.5);
  auto b = random_vec(rng, (size_t)k * n);
  std::vector<double> cs((size_t)m * n, 0.0), cv((size_t)m * n, 0.0);
  kernels::kScalarOps.gemm_nn(a.data(), b.data(), cs.data(), m, k, n, false);
  kernels::kAvx2Ops.gemm_nn(a.data(), b.data(), cv.data(), m, k, n, false);
  for (size_t i = 0; i < cs.size(); ++i)
    CHECK(cv[i] == doctest::Approx(cs[i]).epsilon(1e-12));
}
#endif

TEST_CASE("backend selection") {
  using kernels::Backend;
  CHECK(kernels::backend_available(Backend::Scalar));
  CHECK(kernels::backend_available(Backend::Auto));

  kernels::set_backend(Backend::Scalar);
  CHECK(kernels::configured_backend() == Backend::Scalar);
  CHECK(std::string(kernels::active().name) == "scalar");

  if (kernels::backend_available(Backend::Avx2)) {
    kernels::set_backend(Backend::Avx2);
    CHECK(std::string(kernels::active().name) == "avx2");
  } else {
    CHECK_THROWS_AS(kernels::set_backend(Backend::Avx2), std::runtime_error);
  }
  kernels::set_backend(Backend::Auto);
}
