#include "doctest.h"

#include <random>
#include <vector>

#include "kgop/kernels.hpp"

using namespace kgop;
using kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<cplx> v(n);
  for (auto& x : v) {
    const double re = static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5;
    const double im = static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5;
    x = {2.0 * re, 2.0 * im};
  }
  return v;
}

std::vector<double> random_weights(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w(n);
  for (auto& x : w) x = 0.1 + static_cast<double>(rng()) / 1.8446744073709552e19;
  return w;
}

}  // namespace

TEST_CASE("scalar dot matches a hand sum") {
  std::vector<cplx> a = {{1, 2}, {3, -1}};
  std::vector<cplx> b = {{0, 1}, {2, 2}};
  const cplx d = kernels::scalar::backend.dot(a.data(), b.data(), 2);
  // (1+2i)(0-i) + (3-i)(2-2i) = (2 - i) + (4 - 8i)
  CHECK(d.real() == doctest::Approx(6.0));
  CHECK(d.imag() == doctest::Approx(-9.0));
}

#if defined(__x86_64__)
TEST_CASE("simd backends agree with the scalar reference") {
  const auto& active = kernels::active();
  INFO("active backend: ", active.name);
  // exercise odd and even lengths including the vector tail
  for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 257u, 1000u}) {
    auto a = random_vec(n, 11 * n + 1);
    auto b = random_vec(n, 13 * n + 7);
    auto w = random_weights(n, 17 * n + 3);
    const auto& s = kernels::scalar::backend;

    const cplx ds = s.dot(a.data(), b.data(), n);
    const cplx da = active.dot(a.data(), b.data(), n);
    CHECK(std::abs(ds - da) <= 1e-12 * (1.0 + std::abs(ds)));

    const cplx dws = s.dot_weighted(a.data(), b.data(), w.data(), n);
    const cplx dwa = active.dot_weighted(a.data(), b.data(), w.data(), n);
    CHECK(std::abs(dws - dwa) <= 1e-12 * (1.0 + std::abs(dws)));

    CHECK(active.norm2(a.data(), n) == doctest::Approx(s.norm2(a.data(), n)).epsilon(1e-12));
    CHECK(active.norm2_weighted(a.data(), w.data(), n) ==
          doctest::Approx(s.norm2_weighted(a.data(), w.data(), n)).epsilon(1e-12));

    std::vector<cplx> out_s(n), out_a(n);
    s.cmul(a.data(), b.data(), out_s.data(), n);
    active.cmul(a.data(), b.data(), out_a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out_s[i] - out_a[i]) <= 1e-14);

    s.rmul(a.data(), w.data(), out_s.data(), n);
    active.rmul(a.data(), w.data(), out_a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out_s[i] - out_a[i]) <= 1e-14);

    const cplx alpha{0.3, -0.7};
    std::vector<cplx> ys = b, ya = b;
    s.axpy(alpha, a.data(), ys.data(), n);
    active.axpy(alpha, a.data(), ya.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - ya[i]) <= 1e-14);

    s.scale(alpha, a.data(), out_s.data(), n);
    active.scale(alpha, a.data(), out_a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out_s[i] - out_a[i]) <= 1e-14);
  }
}
#endif

TEST_CASE("pairwise sum is exact on integers and order-fixed") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 7) - 3.0;
  double plain = 0.0;
  for (double x : v) plain += x;
  CHECK(kernels::pairwise_sum(v.data(), v.size()) == plain);
  // repeated evaluation is bit-identical
  CHECK(kernels::pairwise_sum(v.data(), v.size()) == kernels::pairwise_sum(v.data(), v.size()));
}
