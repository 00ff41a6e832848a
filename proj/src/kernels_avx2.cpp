#include <immintrin.h>

#include <algorithm>

#include "gatenet/kernels.hpp"

namespace gatenet::kernels {

namespace {

inline void row_tail(const double* ai, const double* b, double* ci, int k,
                     int n, int j0) {
  for (int p = 0; p < k; ++p) {
    const double av = ai[p];
    const double* bp = b + (size_t)p * n;
    for (int j = j0; j < n; ++j) ci[j] += av * bp[j];
  }
}

void gemm_nn_avx2(const double* a, const double* b, double* c, int m, int k,
                  int n, bool acc) {
  if (!acc)
    for (int i = 0; i < m; ++i)
      std::fill(c + (size_t)i * n, c + (size_t)i * n + n, 0.0);
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    const double* a0 = a + (size_t)(i + 0) * k;
    const double* a1 = a + (size_t)(i + 1) * k;
    const double* a2 = a + (size_t)(i + 2) * k;
    const double* a3 = a + (size_t)(i + 3) * k;
    double* c0 = c + (size_t)(i + 0) * n;
    double* c1 = c + (size_t)(i + 1) * n;
    double* c2 = c + (size_t)(i + 2) * n;
    double* c3 = c + (size_t)(i + 3) * n;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d s00 = _mm256_loadu_pd(c0 + j), s01 = _mm256_loadu_pd(c0 + j + 4);
      __m256d s10 = _mm256_loadu_pd(c1 + j), s11 = _mm256_loadu_pd(c1 + j + 4);
      __m256d s20 = _mm256_loadu_pd(c2 + j), s21 = _mm256_loadu_pd(c2 + j + 4);
      __m256d s30 = _mm256_loadu_pd(c3 + j), s31 = _mm256_loadu_pd(c3 + j + 4);
      for (int p = 0; p < k; ++p) {
        const double* bp = b + (size_t)p * n + j;
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d av;
        av = _mm256_set1_pd(a0[p]);
        s00 = _mm256_fmadd_pd(av, b0, s00);
        s01 = _mm256_fmadd_pd(av, b1, s01);
        av = _mm256_set1_pd(a1[p]);
        s10 = _mm256_fmadd_pd(av, b0, s10);
        s11 = _mm256_fmadd_pd(av, b1, s11);
        av = _mm256_set1_pd(a2[p]);
        s20 = _mm256_fmadd_pd(av, b0, s20);
        s21 = _mm256_fmadd_pd(av, b1, s21);
        av = _mm256_set1_pd(a3[p]);
        s30 = _mm256_fmadd_pd(av, b0, s30);
        s31 = _mm256_fmadd_pd(av, b1, s31);
      }
      _mm256_storeu_pd(c0 + j, s00);
      _mm256_storeu_pd(c0 + j + 4, s01);
      _mm256_storeu_pd(c1 + j, s10);
      _mm256_storeu_pd(c1 + j + 4, s11);
      _mm256_storeu_pd(c2 + j, s20);
      _mm256_storeu_pd(c2 + j + 4, s21);
      _mm256_storeu_pd(c3 + j, s30);
      _mm256_storeu_pd(c3 + j + 4, s31);
    }
    if (j < n)
      for (int r = i; r < i + 4; ++r)
        row_tail(a + (size_t)r * k, b, c + (size_t)r * n, k, n, j);
  }
  for (; i < m; ++i) row_tail(a + (size_t)i * k, b, c + (size_t)i * n, k, n, 0);
}

void gemm_tn_avx2(const double* a, const double* b, double* c, int m, int k,
                  int n, bool acc) {
  if (!acc) std::fill(c, c + (size_t)m * n, 0.0);
  for (int p = 0; p < k; ++p) {
    const double* ap = a + (size_t)p * m;
    const double* bp = b + (size_t)p * n;
    for (int i = 0; i < m; ++i) {
      const __m256d av = _mm256_set1_pd(ap[i]);
      double* ci = c + (size_t)i * n;
      int j = 0;
      for (; j + 4 <= n; j += 4)
        _mm256_storeu_pd(
            ci + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + j),
                                    _mm256_loadu_pd(ci + j)));
      for (; j < n; ++j) ci[j] += ap[i] * bp[j];
    }
  }
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void gemm_nt_avx2(const double* a, const double* b, double* c, int m, int k,
                  int n, bool acc) {
  for (int i = 0; i < m; ++i) {
    const double* ai = a + (size_t)i * k;
    double* ci = c + (size_t)i * n;
    for (int j = 0; j < n; ++j) {
      const double* bj = b + (size_t)j * k;
      __m256d s = _mm256_setzero_pd();
      int p = 0;
      for (; p + 4 <= k; p += 4)
        s = _mm256_fmadd_pd(_mm256_loadu_pd(ai + p), _mm256_loadu_pd(bj + p),
                            s);
      double sum = hsum(s);
      for (; p < k; ++p) sum += ai[p] * bj[p];
      ci[j] = acc ? ci[j] + sum : sum;
    }
  }
}

void gemm_zskip_avx2(const double* a, const double* b, double* c, int m, int k,
                     int n, bool acc) {
  for (int i = 0; i < m; ++i) {
    double* ci = c + (size_t)i * n;
    if (!acc) std::fill(ci, ci + n, 0.0);
    const double* ai = a + (size_t)i * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + (size_t)p * n;
      const __m256d avv = _mm256_set1_pd(av);
      int j = 0;
      for (; j + 4 <= n; j += 4)
        _mm256_storeu_pd(
            ci + j, _mm256_fmadd_pd(avv, _mm256_loadu_pd(bp + j),
                                    _mm256_loadu_pd(ci + j)));
      for (; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void relu_avx2(const double* x, double* y, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_avx2(const double* y, const double* g, double* dx,
                        size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(y + i), zero, _CMP_GT_OQ);
    const __m256d gv = _mm256_and_pd(_mm256_loadu_pd(g + i), mask);
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), gv));
  }
  for (; i < n; ++i)
    if (y[i] > 0.0) dx[i] += g[i];
}

void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

double dot_avx2(const double* x, const double* y, size_t n) {
  __m256d s = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    s = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s);
  double sum = hsum(s);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace

const Ops kAvx2Ops = {
    "avx2",        gemm_nn_avx2, gemm_tn_avx2, gemm_nt_avx2, gemm_zskip_avx2,
    relu_avx2,     relu_backward_avx2, axpy_avx2, scale_avx2, dot_avx2,
};

}  // namespace gatenet::kernels
