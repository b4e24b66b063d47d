#include "kgop/kernels.hpp"

namespace kgop::kernels::scalar {

namespace {

cplx dot_(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  return {re, im};
}

cplx dot_weighted_(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += (ar * br + ai * bi) * w[i];
    im += (ai * br - ar * bi) * w[i];
  }
  return {re, im};
}

double norm2_(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

double norm2_weighted_(const cplx* a, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i].real() * a[i].real() + a[i].imag() * a[i].imag()) * w[i];
  return s;
}

void cmul_(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

void rmul_(const cplx* a, const double* w, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = {a[i].real() * w[i], a[i].imag() * w[i]};
}

void axpy_(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double cr = alpha.real(), ci = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cplx{cr * xr - ci * xi, cr * xi + ci * xr};
  }
}

void scale_(cplx alpha, const cplx* x, cplx* out, std::size_t n) {
  const double cr = alpha.real(), ci = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    out[i] = {cr * xr - ci * xi, cr * xi + ci * xr};
  }
}

}  // namespace

const Backend backend = {dot_,  dot_weighted_, norm2_, norm2_weighted_,
                         cmul_, rmul_,         axpy_,  scale_,
                         "scalar"};

}  // namespace kgop::kernels::scalar

namespace kgop::kernels {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

cplx pairwise_sum(const cplx* v, std::size_t n) {
  if (n <= 16) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace kgop::kernels
