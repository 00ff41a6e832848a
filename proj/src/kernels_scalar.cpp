#include <algorithm>

#include "gatenet/kernels.hpp"

namespace gatenet::kernels {

namespace {

void gemm_nn_scalar(const double* a, const double* b, double* c, int m, int k,
                    int n, bool acc) {
  for (int i = 0; i < m; ++i) {
    double* ci = c + (size_t)i * n;
    if (!acc) std::fill(ci, ci + n, 0.0);
    const double* ai = a + (size_t)i * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b + (size_t)p * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void gemm_tn_scalar(const double* a, const double* b, double* c, int m, int k,
                    int n, bool acc) {
  if (!acc) std::fill(c, c + (size_t)m * n, 0.0);
  for (int p = 0; p < k; ++p) {
    const double* ap = a + (size_t)p * m;
    const double* bp = b + (size_t)p * n;
    for (int i = 0; i < m; ++i) {
      const double av = ap[i];
      double* ci = c + (size_t)i * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void gemm_nt_scalar(const double* a, const double* b, double* c, int m, int k,
                    int n, bool acc) {
  for (int i = 0; i < m; ++i) {
    const double* ai = a + (size_t)i * k;
    double* ci = c + (size_t)i * n;
    for (int j = 0; j < n; ++j) {
      const double* bj = b + (size_t)j * k;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = acc ? ci[j] + s : s;
    }
  }
}

void gemm_zskip_scalar(const double* a, const double* b, double* c, int m,
                       int k, int n, bool acc) {
  for (int i = 0; i < m; ++i) {
    double* ci = c + (size_t)i * n;
    if (!acc) std::fill(ci, ci + n, 0.0);
    const double* ai = a + (size_t)i * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + (size_t)p * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void relu_scalar(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* y, const double* g, double* dx,
                          size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (y[i] > 0.0) dx[i] += g[i];
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double dot_scalar(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

const Ops kScalarOps = {
    "scalar",        gemm_nn_scalar, gemm_tn_scalar, gemm_nt_scalar,
    gemm_zskip_scalar, relu_scalar,  relu_backward_scalar,
    axpy_scalar,     scale_scalar,   dot_scalar,
};

}  // namespace gatenet::kernels
