#pragma once

#include <map>
#include <vector>

#include "kgop/operators.hpp"

// Mollifier families, the Fejer kernel and Cesaro means, operator
// derivatives along the modulation action, and the derived norms built from
// them (C^k norms, sampled Lipschitz seminorm).

namespace kgop::summability {

// the standard bump exp(1/(|p|^2 - 1)) inside the unit ball, sampled and
// normalized so the Riemann sum is exactly 1; index k rescales to
// k^n f(k p), supported in the ball of radius 1/k
std::vector<cplx> mollifier_kernel(const SpacePtr& space, double k);

double fejer_coefficient(long n_order, long m);
double fejer_kernel_value(long n_order, double t);

// finite combination sum_a c_a T_a on a circle-topology (torus) space;
// the exactly-representable span where Cesaro means act by coefficient
// reweighting
class LatticePolynomial {
 public:
  explicit LatticePolynomial(SpacePtr space) : space_(std::move(space)) {
    if (space_->grid().topology() != Topology::circle) throw Error("lattice polynomial needs the torus model");
  }
  void add(std::vector<long> shift, cplx coeff);
  const std::map<std::vector<long>, cplx>& coefficients() const { return coeffs_; }
  const SpacePtr& space() const { return space_; }
  Operator to_operator() const;
  LatticePolynomial product(const LatticePolynomial& other) const;
  // exact Cesaro mean: coefficient a picks up prod_i (1 - |a_i|/(N+1))
  LatticePolynomial cesaro_mean(long n_order) const;
  // symbol evaluation sum_a c_a e^{i a.x}; the Gelfand transform at x
  cplx evaluate(std::span<const double> x) const;

 private:
  SpacePtr space_;
  std::map<std::vector<long>, cplx> coeffs_;
};

// quadrature Cesaro mean for matrix-free operators on the torus model:
// tau_N(A) = (2 pi)^{-n} Int gamma_t(A) K_N^n(t) dt over a 2N+2-point
// rectangle rule per axis (exact on the T-span up to degree N+1)
Operator cesaro_mean(const Operator& a, long n_order);

// derivative of A along the modulation action, D_i A =
// lim (gamma_{t e_i}(A) - A)/t: central difference at the documented step,
// optionally Richardson extrapolated
Operator operator_derivative(const Operator& a, int axis, double step = 1.0 / 128.0,
                             bool richardson = true);

// exact derivatives on the families where the limit is closed-form
Operator convolution_derivative_exact(const SpacePtr& space, const std::vector<cplx>& kernel, int axis);
LatticePolynomial polynomial_derivative_exact(const LatticePolynomial& p, int axis);

// sampled Lipschitz seminorm: max over shifts of ||gamma_a(A) - A|| / |a|.
// A lower bound for the true supremum; norm_tol feeds the norm oracle.
struct LipschitzReport {
  double seminorm = 0.0;
  std::vector<double> per_shift;
};
LipschitzReport lipschitz_seminorm(const Operator& a, std::span<const std::vector<double>> shifts,
                                   double norm_tol = 1e-5, int max_iter = 20000);
std::vector<std::vector<double>> default_shift_set(int dim);

// ||A||_k = max(||A||, ||D_i A||_{k-1}) via the numeric derivative
double ck_norm(const Operator& a, int k, double norm_tol = 1e-5, int max_iter = 20000);

// A_j = Int f_j(p) gamma_p(K_{f_k} A) dp by quadrature over the grid points
// inside the mollifier support
Operator mollifier_approximation(const Operator& a, double j, double k);

}  // namespace kgop::summability
