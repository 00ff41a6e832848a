#pragma once

#include <cstddef>

namespace gatenet::kernels {

/// Hot numeric kernels behind a runtime-selected backend. The scalar set is
/// the reference; vector backends must match it within floating-point
/// reassociation tolerance (the equivalence tests pin this down).
struct Ops {
  const char* name;

  /// C (m x n) = A (m x k) * B (k x n); accumulates into C when acc is set.
  void (*gemm_nn)(const double* a, const double* b, double* c, int m, int k,
                  int n, bool acc);
  /// C (m x n) = A^T * B with A stored k x m.
  void (*gemm_tn)(const double* a, const double* b, double* c, int m, int k,
                  int n, bool acc);
  /// C (m x n) = A * B^T with B stored n x k.
  void (*gemm_nt)(const double* a, const double* b, double* c, int m, int k,
                  int n, bool acc);
  /// gemm_nn that skips zero entries of A; meant for mostly-zero A (e.g.
  /// normalized adjacencies, which stay dense in storage but are sparse in
  /// content). Bit-identical to gemm_nn up to signed zeros.
  void (*gemm_zskip)(const double* a, const double* b, double* c, int m, int k,
                     int n, bool acc);

  void (*relu)(const double* x, double* y, size_t n);
  /// dx += g wherever y > 0 (y is the relu output).
  void (*relu_backward)(const double* y, const double* g, double* dx, size_t n);
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
  void (*scale)(double alpha, double* x, size_t n);
  double (*dot)(const double* x, const double* y, size_t n);
};

enum class Backend { Auto, Scalar, Avx2 };

bool cpu_has_avx2();
bool backend_available(Backend b);

/// Selects the kernel backend. Auto resolves to AVX2 when both the build and
/// the CPU support it, otherwise scalar. Throws std::runtime_error when an
/// explicitly requested backend is unavailable.
void set_backend(Backend b);
Backend configured_backend();

/// The active kernel table (resolves Auto on first use).
const Ops& active();

extern const Ops kScalarOps;
#ifdef GATENET_HAVE_AVX2_TU
extern const Ops kAvx2Ops;
#endif

}  // namespace gatenet::kernels
