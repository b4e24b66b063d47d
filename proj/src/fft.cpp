#include "kgop/fft.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "kgop/kernels.hpp"

namespace kgop::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void fft_pow2(cplx* data, std::size_t n, int sign) {
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const std::size_t half = len / 2;
    // per-stage twiddle table, direct evaluation for accuracy
    std::vector<cplx> tw(half);
    for (std::size_t k = 0; k < half; ++k) tw[k] = {std::cos(ang * k), std::sin(ang * k)};
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = data[i + k];
        const cplx v = data[i + k + half] * tw[k];
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// Bluestein chirp angles: pi*k^2/n with k^2 reduced mod 2n in integers,
// otherwise large k loses the angle to cancellation.
cplx chirp(std::size_t k, std::size_t n, int sign) {
  const std::uint64_t m = (static_cast<std::uint64_t>(k) * k) % (2 * static_cast<std::uint64_t>(n));
  const double ang = sign * (kTwoPi / 2.0) * static_cast<double>(m) / static_cast<double>(n);
  return {std::cos(ang), std::sin(ang)};
}

void fft_bluestein(cplx* data, std::size_t n, int sign) {
  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<cplx> a(m, cplx{0.0, 0.0}), b(m, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const cplx c = chirp(k, n, sign);
    a[k] = data[k] * c;
    b[k] = std::conj(c);
  }
  for (std::size_t k = 1; k < n; ++k) b[m - k] = b[k];
  fft_pow2(a.data(), m, -1);
  fft_pow2(b.data(), m, -1);
  kernels::cmul(a.data(), b.data(), a.data(), m);
  fft_pow2(a.data(), m, +1);
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) data[k] = a[k] * inv * chirp(k, n, sign);
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::vector<cplx>& data, int sign) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if (is_pow2(n))
    fft_pow2(data.data(), n, sign);
  else
    fft_bluestein(data.data(), n, sign);
}

void transform_strided(cplx* base, std::size_t n, std::size_t stride, int sign) {
  if (stride == 1) {
    if (n <= 1) return;
    if (is_pow2(n))
      fft_pow2(base, n, sign);
    else
      fft_bluestein(base, n, sign);
    return;
  }
  std::vector<cplx> line(n);
  for (std::size_t i = 0; i < n; ++i) line[i] = base[i * stride];
  transform(line, sign);
  for (std::size_t i = 0; i < n; ++i) base[i * stride] = line[i];
}

std::vector<cplx> convolve_linear(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_n = a.size() + b.size() - 1;
  const std::size_t m = next_pow2(out_n);
  std::vector<cplx> fa(m, cplx{0.0, 0.0}), fb(m, cplx{0.0, 0.0});
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  fft_pow2(fa.data(), m, -1);
  fft_pow2(fb.data(), m, -1);
  kernels::cmul(fa.data(), fb.data(), fa.data(), m);
  fft_pow2(fa.data(), m, +1);
  const double inv = 1.0 / static_cast<double>(m);
  std::vector<cplx> out(out_n);
  for (std::size_t i = 0; i < out_n; ++i) out[i] = fa[i] * inv;
  return out;
}

}  // namespace kgop::fft
