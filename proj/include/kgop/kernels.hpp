#pragma once

#include <complex>
#include <cstddef>

// Vector primitives behind the inner products, diagonal operators and FFT
// product steps. A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. The environment
// variable KGOPLAB_SIMD=scalar|avx2|auto overrides the choice (tests use it).
//
// Complex arrays are interleaved re/im (std::complex<double> layout).

namespace kgop::kernels {

using cplx = std::complex<double>;

struct Backend {
  // out = sum a[i] * conj(b[i])
  cplx (*dot)(const cplx* a, const cplx* b, std::size_t n);
  // out = sum a[i] * conj(b[i]) * w[i]
  cplx (*dot_weighted)(const cplx* a, const cplx* b, const double* w, std::size_t n);
  // out = sum |a[i]|^2
  double (*norm2)(const cplx* a, std::size_t n);
  // out = sum |a[i]|^2 * w[i]
  double (*norm2_weighted)(const cplx* a, const double* w, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // out[i] = a[i] * w[i]
  void (*rmul)(const cplx* a, const double* w, cplx* out, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // out[i] = alpha * x[i]
  void (*scale)(cplx alpha, const cplx* x, cplx* out, std::size_t n);
  const char* name;
};

// The active backend, resolved once per process.
const Backend& active();

namespace scalar {
extern const Backend backend;
}

#if defined(KGOP_BUILD_AVX2)
namespace avx2 {
extern const Backend backend;
bool supported_by_cpu();
}
#endif

inline cplx dot(const cplx* a, const cplx* b, std::size_t n) { return active().dot(a, b, n); }
inline cplx dot_weighted(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  return active().dot_weighted(a, b, w, n);
}
inline double norm2(const cplx* a, std::size_t n) { return active().norm2(a, n); }
inline double norm2_weighted(const cplx* a, const double* w, std::size_t n) {
  return active().norm2_weighted(a, w, n);
}
inline void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) { active().cmul(a, b, out, n); }
inline void rmul(const cplx* a, const double* w, cplx* out, std::size_t n) { active().rmul(a, w, out, n); }
inline void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scale(cplx alpha, const cplx* x, cplx* out, std::size_t n) { active().scale(alpha, x, out, n); }

// Pairwise (tree-order) sums; reduction order is fixed regardless of how
// callers parallelize, which keeps quadrature output bit-stable.
double pairwise_sum(const double* v, std::size_t n);
cplx pairwise_sum(const cplx* v, std::size_t n);

}  // namespace kgop::kernels
