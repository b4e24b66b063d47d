#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"
#include "kgop/space.hpp"

// Matrix-free linear operators on a Space. Every operator provides apply and
// adjoint_apply, where the adjoint is taken in the inner product of the
// operator's own space (weighted for momentum-side spaces, plain for their
// flat twins). Operator equality is always probed through applications;
// nothing here ever materializes a matrix.

namespace kgop {

class Operator {
 public:
  struct Concept {
    virtual ~Concept() = default;
    virtual const SpacePtr& space() const = 0;
    virtual State apply(const State& x) const = 0;
    virtual State adjoint_apply(const State& x) const = 0;
    virtual nlohmann::json descriptor() const = 0;
  };

  Operator() = default;
  explicit Operator(std::shared_ptr<const Concept> impl) : impl_(std::move(impl)) {}

  const SpacePtr& space() const { return impl_->space(); }
  State apply(const State& x) const { return impl_->apply(x); }
  State adjoint_apply(const State& x) const { return impl_->adjoint_apply(x); }
  nlohmann::json descriptor() const { return impl_->descriptor(); }
  bool valid() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const Concept> impl_;
};

// --- concrete families ---------------------------------------------------

Operator identity(SpacePtr space);

// (T_a phi)(p) = phi(p - a); a must be grid-commensurate. Zero fill on the
// line topology, cyclic shift on the circle.
Operator translation(SpacePtr space, std::span<const double> shift);
Operator translation_steps(SpacePtr space, std::span<const long> steps);

// (K_f phi)(p) = sum_q f(q) phi(p - q) h^n; zero-padded linear convolution
// on the line, circular on the circle. FFT-backed; set direct_sum to use the
// O(N^2) reference path.
Operator convolution(SpacePtr space, std::vector<cplx> kernel, std::string tag = "kernel",
                     bool direct_sum = false);

// Q_i = i d/dp_i. difference: centered stencil (zero fill / cyclic wrap);
// spectral: transform, multiply by the dual coordinate, transform back.
enum class DerivativeBackend { difference, spectral };
Operator position_operator(SpacePtr space, int axis, DerivativeBackend backend = DerivativeBackend::difference);

// diagonal multiplication by g(p) in the momentum picture
Operator multiplication(SpacePtr space, std::vector<cplx> multiplier, std::string tag = "multiplier");

// multiplication by g(x) in the position picture: transform, multiply,
// transform back; diagonal in the position basis, so it preserves position
// support exactly.
Operator position_multiplier(SpacePtr space, std::vector<cplx> position_samples, std::string tag = "symbol");

// --- combinators ----------------------------------------------------------

Operator compose(Operator a, Operator b);  // a after b
struct Term {
  cplx coeff;
  Operator op;
};
Operator lincomb(std::vector<Term> terms);
Operator scaled(cplx c, Operator a);
Operator adjoint(Operator a);

// gamma action: M_{e^{-i a.p}} A M_{e^{+i a.p}}. Conjugates by unimodular
// diagonals, so norms are preserved; translates the symbol by a.
Operator modulation_conjugate(Operator a, std::span<const double> shift);

// conjugation by M_{sqrt(E)}: the unitary that carries the weighted space to
// its flat twin. Result acts on space->plain().
Operator conjugate_to_plain(Operator a);

// F A F with the antiunitary flip (F phi)(p) = conj(phi(-p)).
Operator flip_conjugate(Operator a);
State flip_state(const State& x);

// R_z phi(p) = i Int_0^inf e^{i t z} phi(p + t e_i) dt for Im z > 0 (the
// mirrored formula covers Im z < 0), composite trapezoid along grid lines,
// truncated at the box edge. Bounded inverse of Q_i - z.
Operator position_resolvent(SpacePtr space, int axis, cplx z);

// closed-form translation adjoint: (T_a* psi)(p) = [w(p+a)/w(p)] psi(p+a)
State translation_adjoint_closed_form(const SpacePtr& space, std::span<const long> steps, const State& x);

// kernel reflection f*(p) = conj(f(-p))
std::vector<cplx> kernel_star(const Grid& grid, const std::vector<cplx>& kernel);

// definitional adjoint check: max over pairs of
// |<A u, v>_r - <u, A* v>_r| / (r_norm(Au)*r_norm(v) + r_norm(u)*r_norm(A*v))
double adjoint_defect(const Operator& a, int pairs, std::uint64_t seed);

}  // namespace kgop
