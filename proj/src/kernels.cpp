#include "gatenet/kernels.hpp"

#include <stdexcept>

namespace gatenet::kernels {

namespace {
Backend g_backend = Backend::Auto;
}

bool cpu_has_avx2() {
#if defined(GATENET_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Auto:
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error("kernel backend not available on this cpu");
  g_backend = b;
}

Backend configured_backend() { return g_backend; }

const Ops& active() {
#ifdef GATENET_HAVE_AVX2_TU
  if (g_backend == Backend::Avx2) return kAvx2Ops;
  if (g_backend == Backend::Auto && cpu_has_avx2()) return kAvx2Ops;
#endif
  return kScalarOps;
}

}  // namespace gatenet::kernels
