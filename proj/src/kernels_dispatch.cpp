#include "kgop/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace kgop::kernels {

namespace {

const Backend& resolve() {
  const char* want = std::getenv("KGOPLAB_SIMD");
#if defined(KGOP_BUILD_AVX2)
  if (want && std::strcmp(want, "scalar") == 0) return scalar::backend;
  if (want && std::strcmp(want, "avx2") == 0) return avx2::backend;  // caller asked, trust it
  if (avx2::supported_by_cpu()) return avx2::backend;
#else
  (void)want;
#endif
  return scalar::backend;
}

}  // namespace

const Backend& active() {
  static const Backend& b = resolve();
  return b;
}

}  // namespace kgop::kernels
