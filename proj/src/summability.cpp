#include "kgop/summability.hpp"

#include <cmath>

#include "kgop/kernels.hpp"
#include "kgop/spectral.hpp"

namespace kgop::summability {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<cplx> mollifier_kernel(const SpacePtr& space, double k) {
  if (!(k >= 1.0)) throw Error("mollifier index must be >= 1");
  const Grid& g = space->grid();
  std::vector<cplx> f(space->size(), cplx{0.0, 0.0});
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(g.dim()));
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords_of(i, cs);
    double q = 0.0;
    for (int d = 0; d < g.dim(); ++d) q += coords[d] * coords[d] * k * k;
    if (q < 1.0) {
      const double v = std::exp(1.0 / (q - 1.0));
      f[i] = v;
      sum += v;
    }
  }
  if (sum == 0.0) throw Error("mollifier support misses the grid; refine the spacing");
  const double scale = 1.0 / (sum * g.cell_volume());
  for (auto& v : f) v *= scale;
  return f;
}

double fejer_coefficient(long n_order, long m) {
  const long am = std::labs(m);
  if (am > n_order) return 0.0;
  return 1.0 - static_cast<double>(am) / static_cast<double>(n_order + 1);
}

double fejer_kernel_value(long n_order, double t) {
  const double np1 = static_cast<double>(n_order + 1);
  const double s = std::sin(t / 2.0);
  if (std::abs(s) < 1e-12) return np1;
  const double num = std::sin(np1 * t / 2.0);
  return num * num / (np1 * s * s);
}

void LatticePolynomial::add(std::vector<long> shift, cplx coeff) {
  if (static_cast<int>(shift.size()) != space_->grid().dim()) throw DimensionMismatch("shift dimension mismatch");
  coeffs_[std::move(shift)] += coeff;
}

Operator LatticePolynomial::to_operator() const {
  std::vector<Term> terms;
  for (const auto& [shift, coeff] : coeffs_)
    terms.push_back({coeff, translation_steps(space_, shift)});
  if (terms.empty()) terms.push_back({cplx{0.0, 0.0}, identity(space_)});
  return lincomb(std::move(terms));
}

LatticePolynomial LatticePolynomial::product(const LatticePolynomial& other) const {
  LatticePolynomial out(space_);
  for (const auto& [a, ca] : coeffs_)
    for (const auto& [b, cb] : other.coeffs_) {
      std::vector<long> sum(a.size());
      for (std::size_t d = 0; d < a.size(); ++d) sum[d] = a[d] + b[d];
      out.add(std::move(sum), ca * cb);
    }
  return out;
}

LatticePolynomial LatticePolynomial::cesaro_mean(long n_order) const {
  if (n_order < 0) throw Error("Cesaro order must be nonnegative");
  LatticePolynomial out(space_);
  for (const auto& [shift, coeff] : coeffs_) {
    double w = 1.0;
    for (long s : shift) w *= fejer_coefficient(n_order, s);
    if (w != 0.0) out.add(shift, coeff * w);
  }
  return out;
}

cplx LatticePolynomial::evaluate(std::span<const double> x) const {
  cplx out{0.0, 0.0};
  for (const auto& [shift, coeff] : coeffs_) {
    double phase = 0.0;
    for (std::size_t d = 0; d < shift.size(); ++d) phase += static_cast<double>(shift[d]) * x[d];
    out += coeff * cplx{std::cos(phase), std::sin(phase)};
  }
  return out;
}

Operator cesaro_mean(const Operator& a, long n_order) {
  if (n_order < 0) throw Error("Cesaro order must be nonnegative");
  const SpacePtr& sp = a.space();
  if (sp->grid().topology() != Topology::circle) throw Error("Cesaro mean lives on the torus model");
  if (n_order > sp->grid().half_count()) throw Error("Cesaro order exceeds the lattice cutoff");
  const int dim = sp->grid().dim();
  // rectangle rule over the dual group of Z_M: the only t compatible with
  // the cyclic wrap (t M in 2 pi Z), and exact on the T-span since
  // frequencies m - b with |m| <= N, |b| <= cutoff cannot alias mod M
  const long m_t = sp->grid().points_per_axis();
  std::vector<Term> terms;
  std::vector<long> idx(static_cast<std::size_t>(dim), 0);
  const double cell = 1.0 / static_cast<double>(m_t);
  while (true) {
    double weight = 1.0;
    std::vector<double> t(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      t[static_cast<std::size_t>(d)] = kTwoPi * static_cast<double>(idx[static_cast<std::size_t>(d)]) / static_cast<double>(m_t);
      weight *= fejer_kernel_value(n_order, t[static_cast<std::size_t>(d)]) * cell;
    }
    terms.push_back({cplx{weight, 0.0}, modulation_conjugate(a, t)});
    int d = dim - 1;
    for (; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] < m_t) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d < 0) break;
  }
  return lincomb(std::move(terms));
}

Operator operator_derivative(const Operator& a, int axis, double step, bool richardson) {
  const Grid& g = a.space()->grid();
  const int dim = g.dim();
  double t1 = richardson ? step / 2.0 : step;
  if (g.topology() == Topology::circle) {
    // only dual-group steps commute with the cyclic wrap; snap to the
    // nearest positive multiple of 2 pi / M
    const double unit = kTwoPi / static_cast<double>(g.points_per_axis());
    t1 = unit * std::max(1.0, std::round(t1 / unit));
  }
  auto shifted = [&](double t) {
    std::vector<double> shift(static_cast<std::size_t>(dim), 0.0);
    shift[static_cast<std::size_t>(axis)] = t;
    return modulation_conjugate(a, shift);
  };
  auto central = [&](double t) {
    return std::vector<Term>{{cplx{1.0 / (2.0 * t), 0.0}, shifted(t)},
                             {cplx{-1.0 / (2.0 * t), 0.0}, shifted(-t)}};
  };
  if (!richardson) return lincomb(central(t1));
  // (4 C(t) - C(2t)) / 3 kills the O(t^2) term of the central difference
  std::vector<Term> terms;
  for (Term& t : central(t1)) terms.push_back({t.coeff * (4.0 / 3.0), t.op});
  for (Term& t : central(2.0 * t1)) terms.push_back({t.coeff * (-1.0 / 3.0), t.op});
  return lincomb(std::move(terms));
}

Operator convolution_derivative_exact(const SpacePtr& space, const std::vector<cplx>& kernel, int axis) {
  // gamma_t(K_f) = K_{e^{-i t p_axis} f}; differentiate at t = 0
  const Grid& g = space->grid();
  std::vector<cplx> dk(kernel.size());
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    g.coords_of(i, cs);
    dk[i] = cplx{0.0, -coords[axis]} * kernel[i];
  }
  return convolution(space, std::move(dk), "derivative_kernel");
}

LatticePolynomial polynomial_derivative_exact(const LatticePolynomial& p, int axis) {
  // gamma_t(T_b) = e^{-i t b_axis} T_b; derivative is -i b_axis T_b
  LatticePolynomial out(p.space());
  for (const auto& [shift, coeff] : p.coefficients())
    out.add(shift, coeff * cplx{0.0, -static_cast<double>(shift[static_cast<std::size_t>(axis)])});
  return out;
}

LipschitzReport lipschitz_seminorm(const Operator& a, std::span<const std::vector<double>> shifts,
                                   double norm_tol, int max_iter) {
  if (shifts.empty()) throw Error("lipschitz seminorm needs a nonempty shift sample");
  LipschitzReport rep;
  for (const auto& shift : shifts) {
    double len = 0.0;
    for (double s : shift) len += s * s;
    len = std::sqrt(len);
    if (len == 0.0) throw Error("lipschitz shifts must be nonzero");
    Operator diff = lincomb({{cplx{1.0, 0.0}, modulation_conjugate(a, shift)}, {cplx{-1.0, 0.0}, a}});
    const double n = spectral::operator_norm(diff, norm_tol, max_iter).value;
    rep.per_shift.push_back(n / len);
    rep.seminorm = std::max(rep.seminorm, n / len);
  }
  return rep;
}

std::vector<std::vector<double>> default_shift_set(int dim) {
  std::vector<std::vector<double>> shifts;
  for (int d = 0; d < dim; ++d)
    for (int e = -6; e <= 2; ++e)
      for (double sign : {1.0, -1.0}) {
        std::vector<double> s(static_cast<std::size_t>(dim), 0.0);
        s[static_cast<std::size_t>(d)] = sign * std::ldexp(1.0, e);
        shifts.push_back(std::move(s));
      }
  return shifts;
}

double ck_norm(const Operator& a, int k, double norm_tol, int max_iter) {
  const double base = spectral::operator_norm(a, norm_tol, max_iter).value;
  if (k == 0) return base;
  double worst = base;
  for (int axis = 0; axis < a.space()->grid().dim(); ++axis)
    worst = std::max(worst, ck_norm(operator_derivative(a, axis), k - 1, norm_tol, max_iter));
  return worst;
}

Operator mollifier_approximation(const Operator& a, double j, double k) {
  const SpacePtr& sp = a.space();
  const Grid& g = sp->grid();
  Operator inner = compose(convolution(sp, mollifier_kernel(sp, k), "mollifier"), a);
  std::vector<cplx> fj = mollifier_kernel(sp, j);
  std::vector<Term> terms;
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < fj.size(); ++i) {
    if (fj[i] == cplx{0.0, 0.0}) continue;
    g.coords_of(i, cs);
    std::vector<double> shift(cs.begin(), cs.end());
    terms.push_back({fj[i] * g.cell_volume(), modulation_conjugate(inner, shift)});
  }
  return lincomb(std::move(terms));
}

}  // namespace kgop::summability
