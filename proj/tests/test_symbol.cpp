#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "kgop/kernels.hpp"
#include "kgop/spectral.hpp"
#include "kgop/symbol.hpp"

using namespace kgop;
using namespace kgop::symbol;

namespace {

SpacePtr line_space(double h, double r, double mass) {
  return Space::make(Grid::box(1, h, r), WeightSpec::relativistic(mass));
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("sigma(identity) = 1 and sigma(T_a) = e^{i a x}") {
  auto sp = line_space(0.1, 8.0, 1.0);
  SymbolFunction sid = symbol_of(identity(sp));
  for (const cplx& v : sid.samples) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-11);

  const std::array<double, 1> a{1.0};
  SymbolFunction st = symbol_of(translation(sp, a));
  CHECK(max_abs_diff(st.samples, translation_symbol(sp, a)) < 1e-10);
  CHECK(st.sup_norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sigma(K_f): Gaussian kernel against the analytic transform") {
  auto sp = line_space(0.05, 12.0, 1.0);
  // f = e^{-p^2/2}: multiplier is integral of f e^{ipx} = sqrt(2 pi) e^{-x^2/2}
  State f = gaussian_state(sp, std::array<double, 1>{0.0}, 1.0);
  SymbolFunction sym = symbol_of(convolution(sp, f.amp));
  const Grid& dg = sp->dual()->grid();
  double c[1];
  double worst = 0.0;
  for (std::size_t i = 0; i < sym.samples.size(); ++i) {
    dg.coords_of(i, c);
    const double expected = std::sqrt(2.0 * M_PI) * std::exp(-c[0] * c[0] / 2.0);
    worst = std::max(worst, std::abs(sym.samples[i] - cplx{expected, 0.0}));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("non-multipliers are rejected by probe consistency") {
  auto sp = line_space(0.25, 6.0, 1.0);
  // multiplication by p does not commute with translations
  std::vector<cplx> pmult(sp->size());
  const Grid& g = sp->grid();
  double c[1];
  for (std::size_t i = 0; i < pmult.size(); ++i) {
    g.coords_of(i, c);
    pmult[i] = c[0];
  }
  CHECK_THROWS_AS(symbol_of(multiplication(sp, pmult)), NotAMultiplier);
}

TEST_CASE("symbol map is a homomorphism and contractive on tested families") {
  auto sp = line_space(0.1, 10.0, 1.0);
  State f = gaussian_state(sp, std::array<double, 1>{0.0}, 0.8);
  Operator kf = convolution(sp, f.amp);
  Operator t1 = translation(sp, std::array<double, 1>{1.0});
  Operator prod = compose(kf, t1);

  SymbolFunction skf = symbol_of(kf);
  SymbolFunction st1 = symbol_of(t1);
  SymbolFunction sprod = symbol_of(prod);
  std::vector<cplx> pointwise(skf.samples.size());
  kernels::cmul(skf.samples.data(), st1.samples.data(), pointwise.data(), pointwise.size());
  CHECK(max_abs_diff(sprod.samples, pointwise) < 1e-8 * std::max(1.0, skf.sup_norm()));

  // contractivity: sup |sigma| <= ||A|| + tol
  const double tol = 1e-4;
  const double nkf = spectral::operator_norm(kf, 1e-6, 60000).value;
  CHECK(skf.sup_norm() <= nkf + tol * nkf);
  const double nt1 = spectral::translation_norm_exact(sp, std::array<double, 1>{1.0});
  CHECK(st1.sup_norm() <= nt1 + tol);
}

TEST_CASE("flip involution: sigma(F A F) = conj(sigma(A))") {
  auto sp = line_space(0.1, 8.0, 1.0);
  State f(sp);
  const Grid& g = sp->grid();
  double c[1];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords_of(i, c);
    f.amp[i] = std::polar(std::exp(-c[0] * c[0] / 2.0), 0.6 * c[0]);  // complex Gaussian
  }
  Operator kf = convolution(sp, f.amp);
  SymbolFunction direct = symbol_of(kf);
  SymbolFunction flipped = symbol_of(flip_conjugate(kf));
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.samples.size(); ++i)
    worst = std::max(worst, std::abs(flipped.samples[i] - std::conj(direct.samples[i])));
  CHECK(worst < 1e-8 * std::max(1.0, direct.sup_norm()));
}

TEST_CASE("inverse symbol: constant 1 gives the identity; round trip holds") {
  auto sp = line_space(0.25, 8.0, 1.0);
  const SpacePtr dual = sp->dual();
  SymbolFunction one;
  one.momentum_space = sp;
  one.samples.assign(dual->size(), cplx{1.0, 0.0});
  one.band_radius = 0.3;
  Operator op = inverse_symbol(one);
  State x = random_state(sp, 4);
  State y = op.apply(x);
  State d = y - x;
  CHECK(r_norm(d) < 1e-10 * r_norm(x));

  // band-limited random symbol: build from a kernel supported in [-1, 1]
  State ker(sp);
  double c[1];
  const Grid& g = sp->grid();
  std::mt19937_64 rng(12);
  for (std::size_t i = 0; i < ker.size(); ++i) {
    g.coords_of(i, c);
    if (std::abs(c[0]) <= 1.0)
      ker.amp[i] = cplx{static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5,
                        static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5};
  }
  SymbolFunction sym = symbol_of(convolution(sp, ker.amp));
  sym.band_radius = 1.0;
  Operator rebuilt = inverse_symbol(sym);
  SymbolFunction sym2 = symbol_of(rebuilt);
  CHECK(max_abs_diff(sym.samples, sym2.samples) < 1e-8 * std::max(1.0, sym.sup_norm()));

  // a symbol that is not band limited is rejected
  SymbolFunction bad = sym;
  bad.band_radius = 0.25;
  CHECK_THROWS_AS(inverse_symbol(bad), Error);
}

TEST_CASE("weighted convolution bound: delta kernel and Gaussian margin") {
  auto sp = line_space(0.05, 10.0, 1.0);
  // f = delta/h at 0: bound = 1 and ||K_f|| = 1
  std::vector<cplx> delta(sp->size(), cplx{0.0, 0.0});
  delta[static_cast<std::size_t>(sp->grid().half_count())] = cplx{1.0 / sp->grid().cell_volume(), 0.0};
  Lemma36Result res = lemma36_bound(sp, delta);
  CHECK(!res.diverged);
  CHECK(res.bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral::operator_norm(convolution(sp, delta), 1e-8, 1000).value == doctest::Approx(1.0).epsilon(1e-8));

  // Gaussian: bound dominates the estimated norm with positive margin
  State f(sp);
  const Grid& g = sp->grid();
  double c[1];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords_of(i, c);
    f.amp[i] = std::exp(-c[0] * c[0]);
  }
  Lemma36Result rg = lemma36_bound(sp, f.amp);
  CHECK(!rg.diverged);
  const double norm = spectral::operator_norm(convolution(sp, f.amp), 1e-6, 60000).value;
  CHECK(rg.bound > norm);

  // non-decaying integrand flags divergence
  std::vector<cplx> flat(sp->size(), cplx{1.0, 0.0});
  CHECK(lemma36_bound(sp, flat).diverged);
}

TEST_CASE("bound along the mollifier family tends to 1") {
  auto sp = Space::make(Grid::box(1, 1.0 / 32.0, 4.0), WeightSpec::relativistic(1.0));
  double prev = 1e300;
  for (double k : {1.0, 2.0, 4.0, 8.0}) {
    const double b = lemma36_bound(sp, kgop::summability::mollifier_kernel(sp, k)).bound;
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(5e-2));
}

TEST_CASE("support preservation: translations and positive-support convolutions") {
  auto sp = line_space(0.25, 8.0, 1.0);
  std::vector<State> probes;
  probes.push_back(gaussian_state(sp, std::array<double, 1>{0.0}, 0.4));
  probes.push_back(gaussian_state(sp, std::array<double, 1>{-1.0}, 0.3));
  // hard-truncate so supports are genuinely bounded below
  for (State& p : probes) {
    const Grid& g = sp->grid();
    double c[1];
    for (std::size_t i = 0; i < p.size(); ++i) {
      g.coords_of(i, c);
      if (std::abs(c[0] - (p.amp[static_cast<std::size_t>(g.half_count())].real() > 0.5 ? 0.0 : -1.0)) > 2.0)
        p.amp[i] = cplx{0.0, 0.0};
    }
  }

  CHECK(support_preservation_check(translation(sp, std::array<double, 1>{1.0}), probes).pass);
  CHECK(!support_preservation_check(translation(sp, std::array<double, 1>{-1.0}), probes).pass);
  CHECK(support_preservation_check(identity(sp), probes).pass);

  // K_f with supp f in [0, inf) passes; mirrored kernel fails
  State fpos(sp);
  const Grid& g = sp->grid();
  double c[1];
  for (std::size_t i = 0; i < fpos.size(); ++i) {
    g.coords_of(i, c);
    if (c[0] >= 0.25 && c[0] <= 2.0) fpos.amp[i] = std::exp(-(c[0] - 1.0) * (c[0] - 1.0));
  }
  CHECK(support_preservation_check(convolution(sp, fpos.amp), probes).pass);
  CHECK(!support_preservation_check(convolution(sp, kernel_star(g, fpos.amp)), probes).pass);

  // finite positive combinations of right translations pass
  Operator comb = lincomb({{cplx{0.7, 0.1}, translation(sp, std::array<double, 1>{1.0})},
                           {cplx{0.2, 0.0}, translation(sp, std::array<double, 1>{2.0})}});
  CHECK(support_preservation_check(comb, probes).pass);
}

TEST_CASE("ideal membership: vanishing symbols stay an ideal") {
  auto sp = line_space(0.1, 10.0, 1.0);
  const SpacePtr dual = sp->dual();
  const Grid& dg = dual->grid();
  spectral::Box s_box{{-2.0, 0, 0}, {2.0, 0, 0}};

  // A with symbol supported off S: bump in position on [4, 8]
  State sym(dual);
  double c[1];
  for (std::size_t i = 0; i < sym.size(); ++i) {
    dg.coords_of(i, c);
    const double u = (c[0] - 6.0) / 2.0;
    if (std::abs(u) < 1.0) sym.amp[i] = std::exp(1.0 / (u * u - 1.0));
  }
  Operator a = position_multiplier(sp, sym.amp);
  CHECK(ideal_membership(a, std::array<spectral::Box, 1>{s_box}, 1e-8));
  CHECK(!ideal_membership(identity(sp), std::array<spectral::Box, 1>{s_box}, 1e-8));

  // membership is stable under products with translations
  for (int k = 0; k < 10; ++k) {
    const double shift = 0.1 * (k + 1);
    Operator prod = compose(a, translation(sp, std::array<double, 1>{shift}));
    CHECK(ideal_membership(prod, std::array<spectral::Box, 1>{s_box}, 1e-7));
  }
}

TEST_CASE("gelfand evaluation on the torus model") {
  auto sp = Space::make(Grid::lattice(1, 16), WeightSpec::relativistic(1.0));
  using kgop::summability::LatticePolynomial;

  LatticePolynomial id(sp);
  id.add({0}, cplx{1.0, 0.0});
  CHECK(std::abs(gelfand_evaluation(id, std::array<double, 1>{0.7}) - cplx{1.0, 0.0}) < 1e-15);

  LatticePolynomial t2(sp);
  t2.add({2}, cplx{1.0, 0.0});
  const double x = 0.9;
  const cplx expect{std::cos(2.0 * x), std::sin(2.0 * x)};
  CHECK(std::abs(gelfand_evaluation(t2, std::array<double, 1>{x}) - expect) < 1e-14);
  // |omega(T_e)| = 1
  CHECK(std::abs(std::abs(gelfand_evaluation(t2, std::array<double, 1>{x})) - 1.0) < 1e-14);

  // multiplicativity on random finite combinations
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    LatticePolynomial p(sp), q(sp);
    for (long s = -2; s <= 2; ++s) {
      p.add({s}, cplx{static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5, 0.1 * s});
      q.add({s}, cplx{0.2, static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5});
    }
    const cplx wp = gelfand_evaluation(p, std::array<double, 1>{x});
    const cplx wq = gelfand_evaluation(q, std::array<double, 1>{x});
    const cplx wpq = gelfand_evaluation(p.product(q), std::array<double, 1>{x});
    CHECK(std::abs(wpq - wp * wq) < 1e-10);
  }

  // operator route at a dual grid point agrees with the exact formula
  const Grid& dg = sp->dual()->grid();
  const double xg = dg.spacing() * 3.0;
  const cplx via_op = gelfand_evaluation(t2.to_operator(), std::array<double, 1>{xg});
  const cplx exact = gelfand_evaluation(t2, std::array<double, 1>{xg});
  CHECK(std::abs(via_op - exact) < 1e-9);
}

TEST_CASE("norm gap: unit symbols, unbounded inverse") {
  auto sp = line_space(0.05, 450.0, 1.0);
  // sigma(T_a) has sup norm 1 while ||T_a|| grows; ratio exceeds 10 by 200 m
  const double norm = spectral::translation_norm_exact(sp, std::array<double, 1>{200.0});
  CHECK(norm > 10.0);
}

TEST_CASE("interval counterexample: single interval is a finite baseline") {
  IntervalParams params;
  params.ladder = {1};
  params.spacing = 1.0 / 16.0;
  IntervalGrowthTable table = interval_counterexample(params);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows.front().ratio > 0.0);
  CHECK(std::isfinite(table.rows.front().ratio));
}

TEST_CASE("interval counterexample: monotone growth with the harmonic exponent") {
  IntervalParams params;
  params.ladder = {16, 64, 256};
  params.spacing = 1.0 / 16.0;
  IntervalGrowthTable table = interval_counterexample(params);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].ratio > 0.0);
  CHECK(table.rows[1].ratio > table.rows[0].ratio);
  CHECK(table.rows[2].ratio > table.rows[1].ratio);
  CHECK(table.fitted_exponent == doctest::Approx(0.5).epsilon(0.6));

  IntervalParams bad = params;
  bad.a = 2.0 * M_PI;
  CHECK_THROWS_AS(interval_counterexample(bad), Error);
  bad = params;
  bad.b = 0.9;
  CHECK_THROWS_AS(interval_counterexample(bad), Error);
}

TEST_CASE("Fejer compatibility on the torus: sigma(tau_N(A)) = tau_N(sigma(A))") {
  auto sp = Space::make(Grid::lattice(1, 12), WeightSpec::relativistic(1.0));
  // matrix-free circular convolution operator, not a lattice polynomial
  State ker = random_state(sp, 61);
  Operator a = convolution(sp, ker.amp);
  const long n_order = 4;
  SymbolFunction tau_then_sigma = symbol_of(kgop::summability::cesaro_mean(a, n_order));

  // classical Fejer mean of the symbol: reweight its Fourier coefficients
  SymbolFunction sym = symbol_of(a);
  const long m = sp->grid().points_per_axis();
  std::vector<cplx> expected(sym.samples.size(), cplx{0.0, 0.0});
  const Grid& dg = sp->dual()->grid();
  for (long k = -sp->grid().half_count(); k <= sp->grid().half_count(); ++k) {
    // coefficient c_k = (1/M) sum_j sym(x_j) e^{-i k x_j}
    cplx ck{0.0, 0.0};
    double c[1];
    for (std::size_t j = 0; j < sym.samples.size(); ++j) {
      dg.coords_of(j, c);
      ck += sym.samples[j] * std::polar(1.0, -static_cast<double>(k) * c[0]);
    }
    ck /= static_cast<double>(m);
    const double w = kgop::summability::fejer_coefficient(n_order, k);
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < expected.size(); ++j) {
      dg.coords_of(j, c);
      expected[j] += w * ck * std::polar(1.0, static_cast<double>(k) * c[0]);
    }
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < expected.size(); ++j)
    worst = std::max(worst, std::abs(tau_then_sigma.samples[j] - expected[j]));
  CHECK(worst < 1e-8 * std::max(1.0, sym.sup_norm()));
}

TEST_CASE("norm inflation is uniform over a shared band and stable under refinement") {
  // family of random multipliers whose kernels share the support box [-1, 1]
  auto ratio_for = [&](double h) {
    auto sp = Space::make(Grid::box(1, h, 10.0), WeightSpec::relativistic(1.0));
    const Grid& g = sp->grid();
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::mt19937_64 rng(7000 + static_cast<std::uint64_t>(trial));
      State ker(sp);
      double c[1];
      for (std::size_t i = 0; i < ker.size(); ++i) {
        g.coords_of(i, c);
        if (std::abs(c[0]) <= 1.0)
          ker.amp[i] = cplx{static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5,
                            static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5};
      }
      Operator op = convolution(sp, ker.amp);
      const double norm = spectral::operator_norm(op, 1e-5, 30000).value;
      const double sup = symbol_of(op).sup_norm();
      worst = std::max(worst, norm / sup);
    }
    return worst;
  };
  const double coarse = ratio_for(0.25);
  const double fine = ratio_for(0.125);
  CHECK(std::isfinite(coarse));
  CHECK(std::abs(fine - coarse) < 0.05 * coarse);
}

TEST_CASE("ideal membership is closed under addition") {
  auto sp = Space::make(Grid::box(1, 0.1, 10.0), WeightSpec::relativistic(1.0));
  const SpacePtr dual = sp->dual();
  const Grid& dg = dual->grid();
  spectral::Box s_box{{-2.0, 0, 0}, {2.0, 0, 0}};
  auto off_bump = [&](double center) {
    State sym(dual);
    double c[1];
    for (std::size_t i = 0; i < sym.size(); ++i) {
      dg.coords_of(i, c);
      const double u = (c[0] - center) / 2.0;
      if (std::abs(u) < 1.0) sym.amp[i] = std::exp(1.0 / (u * u - 1.0));
    }
    return position_multiplier(sp, sym.amp);
  };
  Operator a = off_bump(6.0);
  Operator b = off_bump(-7.0);
  Operator sum = lincomb({{cplx{1.0, 0.0}, a}, {cplx{0.3, -0.4}, b}});
  CHECK(ideal_membership(sum, std::array<spectral::Box, 1>{s_box}, 1e-8));
}
