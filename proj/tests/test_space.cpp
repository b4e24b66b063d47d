#include "doctest.h"

#include <cmath>

#include "kgop/space.hpp"

using namespace kgop;

namespace {
SpacePtr line_space(double h, double r, double mass, int dim = 1) {
  return Space::make(Grid::box(dim, h, r), WeightSpec::relativistic(mass));
}
}  // namespace

TEST_CASE("grid enumeration is a stable row-major bijection") {
  Grid g = Grid::box(2, 0.5, 1.0);
  CHECK(g.points_per_axis() == 5);
  CHECK(g.size() == 25);
  long multi[2];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.multi_of(i, multi);
    CHECK(g.index_of(std::span<const long>(multi, 2)) == i);
  }
  // first point is the lexicographic corner
  g.multi_of(0, multi);
  CHECK(multi[0] == -2);
  CHECK(multi[1] == -2);
}

TEST_CASE("partial cells are rejected") {
  CHECK_THROWS_AS(Grid::box(1, 0.3, 1.0), Error);
  CHECK_NOTHROW(Grid::box(1, 0.25, 1.0));
}

TEST_CASE("relativistic weight: bounded by 1/m and asymptotically translation invariant") {
  auto sp = line_space(0.5, 20.0, 2.0);
  for (double w : sp->weights()) CHECK(w <= 0.5 + 1e-15);
  // w(p+a)/w(p) -> 1 on the outermost shell
  const auto& w = sp->weights();
  const std::size_t n = sp->size();
  const double ratio_edge = w[n - 1] / w[n - 2];
  CHECK(std::abs(ratio_edge - 1.0) < 0.05);
}

TEST_CASE("delta at the origin: r_inner equals 1/E(0)") {
  auto sp = line_space(1.0, 5.0, 1.0);
  State d(sp);
  d.amp[static_cast<std::size_t>(sp->grid().half_count())] = cplx{1.0, 0.0};
  const cplx v = r_inner(d, d);
  CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));  // E(0) = m = 1
  CHECK(v.imag() == 0.0);
  CHECK(r_norm(d) == doctest::Approx(1.0));
  // plain delta norm is sqrt(h^n) = 1 here, and r = plain/sqrt(m) exactly
  CHECK(r_norm(d) == doctest::Approx(plain_norm(d) / std::sqrt(1.0)));
}

TEST_CASE("zero vector and weight-1 identities") {
  auto sp = line_space(0.5, 4.0, 1.0);
  State z(sp);
  State r = random_state(sp, 42);
  CHECK(std::abs(r_inner(r, z)) == 0.0);
  CHECK(r_norm(z) == 0.0);

  auto flat = Space::make(sp->grid(), WeightSpec::flat());
  for (int k = 0; k < 10; ++k) {
    State a = random_state(flat, 100 + static_cast<std::uint64_t>(k));
    State b = random_state(flat, 200 + static_cast<std::uint64_t>(k));
    CHECK(std::abs(r_inner(a, b) - plain_inner(a, b)) < 1e-12 * std::abs(plain_inner(a, b)));
  }
}

TEST_CASE("mismatched grids are rejected") {
  auto a = line_space(0.5, 4.0, 1.0);
  auto b = line_space(0.5, 5.0, 1.0);
  State x(a), y(b);
  CHECK_THROWS_AS((void)r_inner(x, y), DimensionMismatch);
}

TEST_CASE("Cauchy-Schwarz holds on sampled pairs") {
  auto sp = line_space(0.25, 4.0, 0.7);
  for (int k = 0; k < 20; ++k) {
    State a = random_state(sp, 300 + static_cast<std::uint64_t>(k));
    State b = random_state(sp, 400 + static_cast<std::uint64_t>(k));
    CHECK(std::abs(r_inner(a, b)) <= r_norm(a) * r_norm(b) * (1.0 + 1e-12));
  }
}

TEST_CASE("weight is invariant under coordinate permutations and sign flips") {
  auto sp = Space::make(Grid::box(2, 0.5, 2.0), WeightSpec::relativistic(1.3));
  const Grid& g = sp->grid();
  long multi[2];
  for (std::size_t i = 0; i < sp->size(); ++i) {
    g.multi_of(i, multi);
    long swapped[2] = {multi[1], multi[0]};
    long flipped[2] = {-multi[0], multi[1]};
    CHECK(sp->weight_at(g.index_of(std::span<const long>(swapped, 2))) ==
          doctest::Approx(sp->weight_at(i)).epsilon(1e-15));
    CHECK(sp->weight_at(g.index_of(std::span<const long>(flipped, 2))) ==
          doctest::Approx(sp->weight_at(i)).epsilon(1e-15));
  }
}

TEST_CASE("fourier round trip and Parseval") {
  auto sp = line_space(0.1, 6.0, 1.0);
  double worst_rt = 0.0, worst_parseval = 0.0;
  for (int k = 0; k < 50; ++k) {
    State a = random_state(sp, 500 + static_cast<std::uint64_t>(k));
    State pos = fourier(a, FourierDirection::to_position);
    State back = fourier(pos, FourierDirection::to_momentum);
    REQUIRE(back.space->id() == sp->id());
    for (std::size_t i = 0; i < a.size(); ++i) worst_rt = std::max(worst_rt, std::abs(back.amp[i] - a.amp[i]));
    worst_parseval = std::max(worst_parseval, std::abs(plain_norm(pos) - plain_norm(a)) / plain_norm(a));
  }
  CHECK(worst_rt < 1e-12);
  CHECK(worst_parseval < 1e-12);
}

TEST_CASE("Gaussian maps to a Gaussian under the unitary transform") {
  // e^{-p^2/2} is self-dual for the e^{+ipx} kernel with 1/sqrt(2 pi)
  auto sp = line_space(0.05, 12.0, 1.0);
  State g = gaussian_state(sp, std::array<double, 1>{0.0}, 1.0);
  State pos = fourier(g, FourierDirection::to_position);
  const Grid& dg = pos.space->grid();
  double ratio_min = 1e300, ratio_max = -1e300;
  double coords[1];
  for (std::size_t i = 0; i < pos.size(); ++i) {
    dg.coords_of(i, coords);
    const double x = coords[0];
    if (std::abs(x) > 3.0) continue;  // interior points only
    const double expected = std::exp(-x * x / 2.0);
    const double got = pos.amp[i].real();
    CHECK(std::abs(pos.amp[i].imag()) < 1e-10);
    const double r = got / expected;
    ratio_min = std::min(ratio_min, r);
    ratio_max = std::max(ratio_max, r);
  }
  CHECK(ratio_max - ratio_min < 1e-6);
}

TEST_CASE("plain embedding: r_norm <= plain_norm / sqrt(m)") {
  auto sp = line_space(0.25, 8.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    State a = embed_plain_into_r(random_state(sp, 600 + static_cast<std::uint64_t>(k)));
    CHECK(r_norm(a) <= plain_norm(a) * (1.0 + 1e-12));
  }
  auto sp2 = line_space(0.25, 8.0, 4.0);
  State d(sp2);
  d.amp[static_cast<std::size_t>(sp2->grid().half_count())] = cplx{1.0, 0.0};
  CHECK(r_norm(d) == doctest::Approx(plain_norm(d) / 2.0).epsilon(1e-14));
}

TEST_CASE("compactly supported states have the same support in both norms") {
  auto sp = line_space(0.5, 4.0, 1.0);
  State a(sp);
  a.amp[3] = cplx{0.7, 0.1};
  a.amp[4] = cplx{0.0, -0.2};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool in_r = std::abs(a.amp[i]) * sp->weight_at(i) > 0.0;
    const bool in_plain = std::abs(a.amp[i]) > 0.0;
    CHECK(in_r == in_plain);
  }
}

TEST_CASE("config block carries the documented keys") {
  auto sp = line_space(0.5, 4.0, 1.25);
  const std::string block = sp->config_block();
  CHECK(block.find("dim = 1") != std::string::npos);
  CHECK(block.find("spacing = 0.5") != std::string::npos);
  CHECK(block.find("radius = 4") != std::string::npos);
  CHECK(block.find("weight_kind = relativistic") != std::string::npos);
  CHECK(block.find("mass = 1.25") != std::string::npos);
}

TEST_CASE("state CSV export has the documented shape") {
  auto sp = line_space(1.0, 1.0, 1.0);
  State a(sp);
  a.amp[0] = cplx{1.5, -2.0};
  const std::string csv = state_to_csv(a);
  CHECK(csv.rfind("index,p1,re,im\n", 0) == 0);
  CHECK(csv.find("0,-1,1.5,-2\n") != std::string::npos);
}

TEST_CASE("2-D fourier round trip and Parseval") {
  auto sp = Space::make(Grid::box(2, 0.2, 3.0), WeightSpec::relativistic(1.0));
  State a = random_state(sp, 777);
  State pos = fourier(a, FourierDirection::to_position);
  State back = fourier(pos, FourierDirection::to_momentum);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(back.amp[i] - a.amp[i]));
  CHECK(worst < 1e-12);
  CHECK(std::abs(plain_norm(pos) - plain_norm(a)) < 1e-12 * plain_norm(a));
}
