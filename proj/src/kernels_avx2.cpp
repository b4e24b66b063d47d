#include "kgop/kernels.hpp"

#include <immintrin.h>

// AVX2 variants working on interleaved complex doubles, two complex lanes
// per __m256d. Accumulators stay in fixed vector lanes, so results are
// reproducible run to run (they may differ from the scalar path in the last
// couple of ulps because the summation order differs; the equivalence tests
// pin that gap).

namespace kgop::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// [w0 w0 w1 w1] from two consecutive weights
inline __m256d dup_weights(const double* w) {
  __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(w));
  return _mm256_permute4x64_pd(v, 0x50);
}

// sign mask flipping the imaginary (odd) lanes
inline __m256d odd_neg_mask() { return _mm256_setr_pd(0.0, -0.0, 0.0, -0.0); }

cplx dot_(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const __m256d flip = odd_neg_mask();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    // re parts: ar*br + ai*bi = total sum of va*vb
    acc_re = _mm256_add_pd(acc_re, _mm256_mul_pd(va, vb));
    // im parts: ai*br - ar*bi = total sum of swap(va)*vb with odd lanes negated
    __m256d sw = _mm256_permute_pd(va, 0x5);
    acc_im = _mm256_add_pd(acc_im, _mm256_xor_pd(_mm256_mul_pd(sw, vb), flip));
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  }
  return {re, im};
}

cplx dot_weighted_(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const __m256d flip = odd_neg_mask();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d vw = dup_weights(w + i);
    __m256d prod = _mm256_mul_pd(_mm256_mul_pd(va, vb), vw);
    acc_re = _mm256_add_pd(acc_re, prod);
    __m256d sw = _mm256_permute_pd(va, 0x5);
    __m256d prod_im = _mm256_mul_pd(_mm256_mul_pd(sw, vb), vw);
    acc_im = _mm256_add_pd(acc_im, _mm256_xor_pd(prod_im, flip));
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    re += (a[i].real() * b[i].real() + a[i].imag() * b[i].imag()) * w[i];
    im += (a[i].imag() * b[i].real() - a[i].real() * b[i].imag()) * w[i];
  }
  return {re, im};
}

double norm2_(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, va));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

double norm2_weighted_(const cplx* a, const double* w, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vw = dup_weights(w + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(va, va), vw));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += (a[i].real() * a[i].real() + a[i].imag() * a[i].imag()) * w[i];
  return s;
}

// (ar + i ai)(br + i bi) with the addsub trick
inline __m256d cmul_lanes(__m256d va, __m256d vb) {
  __m256d b_re = _mm256_movedup_pd(vb);
  __m256d b_im = _mm256_permute_pd(vb, 0xF);
  __m256d t1 = _mm256_mul_pd(va, b_re);
  __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(va, 0x5), b_im);
  return _mm256_addsub_pd(t1, t2);
}

void cmul_(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    _mm256_storeu_pd(po + 2 * i, cmul_lanes(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void rmul_(const cplx* a, const double* w, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vw = dup_weights(w + i);
    _mm256_storeu_pd(po + 2 * i, _mm256_mul_pd(va, vw));
  }
  for (; i < n; ++i) out[i] = {a[i].real() * w[i], a[i].imag() * w[i]};
}

void axpy_(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d valpha = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, cmul_lanes(vx, valpha)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_(cplx alpha, const cplx* x, cplx* out, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* po = reinterpret_cast<double*>(out);
  const __m256d valpha = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    _mm256_storeu_pd(po + 2 * i, cmul_lanes(vx, valpha));
  }
  for (; i < n; ++i) out[i] = alpha * x[i];
}

}  // namespace

bool supported_by_cpu() { return __builtin_cpu_supports("avx2"); }

const Backend backend = {dot_,  dot_weighted_, norm2_, norm2_weighted_,
                         cmul_, rmul_,         axpy_,  scale_,
                         "avx2"};

}  // namespace kgop::kernels::avx2
