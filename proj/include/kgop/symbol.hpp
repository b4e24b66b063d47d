#pragma once

#include <optional>
#include <vector>

#include "kgop/operators.hpp"
#include "kgop/spectral.hpp"
#include "kgop/summability.hpp"

// The symbol map and its partial inverse. An operator commuting with the
// translations acts in the position picture as multiplication by a bounded
// function; symbol_of reads that multiplier off probe states and
// inverse_symbol realizes a band-limited multiplier as a convolution
// operator. The norm bound of the weighted convolution estimate and the
// interval counterexample both live here.

namespace kgop::symbol {

struct NotAMultiplier : Error {
  using Error::Error;
};

struct SymbolFunction {
  SpacePtr momentum_space;              // the space the operator acts on
  std::vector<cplx> samples;            // over momentum_space->dual()
  std::optional<double> band_radius;    // declared support radius of the kernel

  double sup_norm() const;
  cplx at_position_index(std::size_t i) const { return samples[i]; }
};

// Probe the multiplier with modulated delta states (unimodular in position).
// Inconsistent probes mean the operator is not in the translation commutant.
SymbolFunction symbol_of(const Operator& a, double consistency_tol = 1e-8, int probes = 5);

// sigma(T_a) = e^{i a.x} sampled on the dual grid, for reference tests
std::vector<cplx> translation_symbol(const SpacePtr& space, std::span<const double> shift);

// K_{g-hat} for a declared band-limited symbol: the kernel is the inverse
// transform with the 1/(2 pi)^n normalization; rejected when the declared
// band check fails.
Operator inverse_symbol(const SymbolFunction& g, double band_check_tol = 1e-10);

struct Lemma36Result {
  double bound = 0.0;
  bool diverged = false;  // integrand not decaying at the box edge
};

// quadrature of Int (1 + |p|/m + |p|^2/m^2)^{1/4} |f(p)| dp, an upper bound
// for the weighted convolution norm ||K_f||
Lemma36Result lemma36_bound(const SpacePtr& space, const std::vector<cplx>& kernel);

// growth experiment for the interval multiplier: phi_N = indicator of N
// intervals of length b at distances j*a from the origin, f = transform of
// the indicator of J = (0, j_len); returns the r-norm ratios of K_f phi_N
struct IntervalGrowthRow {
  long n_intervals;
  double ratio;
  double harmonic;
};
struct IntervalGrowthTable {
  std::vector<IntervalGrowthRow> rows;
  double fitted_exponent = 0.0;  // slope of log ratio vs log H_N
};
struct IntervalParams {
  double j_len = 1.0;
  double b = 0.25;
  double a = 3.0;
  double mass = 0.1;
  double spacing = 1.0 / 16.0;
  std::vector<long> ladder = {64, 256, 1024, 4096};
};
IntervalGrowthTable interval_counterexample(const IntervalParams& params);

struct SupportCheckReport {
  bool pass = true;
  std::vector<double> inf_shift;  // inf supp(A phi) - inf supp(phi), per probe
};

// verifies inf supp(A phi) >= inf supp(phi) - h on every probe (1-D)
SupportCheckReport support_preservation_check(const Operator& a, std::span<const State> probes,
                                              double amp_eps = 1e-11);

// true iff sigma(A) vanishes on S (boxes in position coordinates) below tol
bool ideal_membership(const Operator& a, std::span<const spectral::Box> region, double tol);

// evaluation homomorphism on the torus model: omega_x(A) = sigma(A)(x)
cplx gelfand_evaluation(const summability::LatticePolynomial& p, std::span<const double> x);
cplx gelfand_evaluation(const Operator& a, std::span<const double> x, double consistency_tol = 1e-8);

}  // namespace kgop::symbol
