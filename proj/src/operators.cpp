#include "kgop/operators.hpp"

#include <cmath>
#include <cstring>

#include "kgop/fft.hpp"
#include "kgop/kernels.hpp"

namespace kgop {

namespace {

using json = nlohmann::json;

// stored-index helpers: along each axis the stored digit t = k + K runs in
// [0, M); row-major, axis 0 slowest
struct Layout {
  int dim;
  long m;
  std::size_t size;
  std::size_t stride[3];

  explicit Layout(const Grid& g) : dim(g.dim()), m(g.points_per_axis()), size(g.size()) {
    std::size_t s = 1;
    for (int a = dim - 1; a >= 0; --a) {
      stride[a] = s;
      s *= static_cast<std::size_t>(m);
    }
  }
  void digits(std::size_t idx, long* t) const {
    for (int a = dim - 1; a >= 0; --a) {
      t[a] = static_cast<long>(idx % static_cast<std::size_t>(m));
      idx /= static_cast<std::size_t>(m);
    }
  }
};

// per-axis source map for shifts: src[t] = stored source digit or -1 if the
// source falls outside the box (line topology)
std::vector<long> shift_source_map(long m, long step, Topology topo) {
  std::vector<long> src(static_cast<std::size_t>(m));
  for (long t = 0; t < m; ++t) {
    long s = t - step;
    if (topo == Topology::circle) {
      s %= m;
      if (s < 0) s += m;
    } else if (s < 0 || s >= m) {
      s = -1;
    }
    src[static_cast<std::size_t>(t)] = s;
  }
  return src;
}

State map_by_sources(const State& x, const std::vector<std::vector<long>>& src) {
  const Layout lay(x.space->grid());
  State out(x.space);
  long t[3];
  for (std::size_t i = 0; i < x.size(); ++i) {
    lay.digits(i, t);
    std::size_t j = 0;
    bool ok = true;
    for (int a = 0; a < lay.dim; ++a) {
      const long s = src[static_cast<std::size_t>(a)][static_cast<std::size_t>(t[a])];
      if (s < 0) {
        ok = false;
        break;
      }
      j += static_cast<std::size_t>(s) * lay.stride[a];
    }
    out.amp[i] = ok ? x.amp[j] : cplx{0.0, 0.0};
  }
  return out;
}

struct IdentityOp final : Operator::Concept {
  SpacePtr sp;
  explicit IdentityOp(SpacePtr s) : sp(std::move(s)) {}
  const SpacePtr& space() const override { return sp; }
  State apply(const State& x) const override { return x; }
  State adjoint_apply(const State& x) const override { return x; }
  json descriptor() const override { return {{"family", "identity"}, {"grid", sp->id()}}; }
};

struct TranslationOp final : Operator::Concept {
  SpacePtr sp;
  std::vector<long> steps;
  std::vector<std::vector<long>> fwd, bwd;  // source maps for T and for p -> p+a lookup

  TranslationOp(SpacePtr s, std::vector<long> st) : sp(std::move(s)), steps(std::move(st)) {
    const Grid& g = sp->grid();
    for (int a = 0; a < g.dim(); ++a) {
      fwd.push_back(shift_source_map(g.points_per_axis(), steps[static_cast<std::size_t>(a)], g.topology()));
      bwd.push_back(shift_source_map(g.points_per_axis(), -steps[static_cast<std::size_t>(a)], g.topology()));
    }
  }
  const SpacePtr& space() const override { return sp; }
  State apply(const State& x) const override {
    check_space(x, sp);
    return map_by_sources(x, fwd);
  }
  State adjoint_apply(const State& x) const override {
    // (T_a* psi)(p) = [w(p+a)/w(p)] psi(p+a)
    check_space(x, sp);
    const Layout lay(sp->grid());
    State out(sp);
    const auto& w = sp->weights();
    long t[3];
    for (std::size_t i = 0; i < x.size(); ++i) {
      lay.digits(i, t);
      std::size_t j = 0;
      bool ok = true;
      for (int a = 0; a < lay.dim; ++a) {
        const long s = bwd[static_cast<std::size_t>(a)][static_cast<std::size_t>(t[a])];
        if (s < 0) {
          ok = false;
          break;
        }
        j += static_cast<std::size_t>(s) * lay.stride[a];
      }
      out.amp[i] = ok ? x.amp[j] * (w[j] / w[i]) : cplx{0.0, 0.0};
    }
    return out;
  }
  json descriptor() const override {
    std::vector<double> shift;
    for (long s : steps) shift.push_back(static_cast<double>(s) * sp->grid().spacing());
    return {{"family", "translation"}, {"shift", shift}, {"grid", sp->id()}};
  }
};

// n-dim FFT over a cube with equal side, row-major
void fftn_cube(std::vector<cplx>& cube, int dim, std::size_t side, int sign) {
  std::size_t stride = 1;
  for (int a = dim - 1; a >= 0; --a) {
    const std::size_t block = stride * side;
    for (std::size_t base = 0; base < cube.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off)
        fft::transform_strided(cube.data() + base + off, side, stride, sign);
    stride *= side;
  }
}

void scatter_to_cube(const std::vector<cplx>& in, std::vector<cplx>& cube, const Layout& lay,
                     std::size_t side) {
  long t[3];
  for (std::size_t i = 0; i < in.size(); ++i) {
    lay.digits(i, t);
    std::size_t j = 0;
    for (int a = 0; a < lay.dim; ++a) j = j * side + static_cast<std::size_t>(t[a]);
    cube[j] = in[i];
  }
}

struct ConvolutionOp final : Operator::Concept {
  SpacePtr sp;
  std::vector<cplx> kernel;
  std::vector<cplx> kstar;  // conj-reflected kernel, drives the adjoint
  std::string tag;
  bool direct;
  std::size_t side = 0;            // FFT cube side
  std::vector<cplx> kspec, kspec_star;  // cached kernel spectra

  ConvolutionOp(SpacePtr s, std::vector<cplx> f, std::string tg, bool direct_sum)
      : sp(std::move(s)), kernel(std::move(f)), tag(std::move(tg)), direct(direct_sum) {
    if (kernel.size() != sp->size()) throw DimensionMismatch("kernel size does not match grid");
    kstar = kernel_star(sp->grid(), kernel);
    if (!direct) {
      const Grid& g = sp->grid();
      const std::size_t m = static_cast<std::size_t>(g.points_per_axis());
      side = (g.topology() == Topology::circle) ? m : fft::next_pow2(2 * m - 1);
      kspec = spectrum_of(kernel);
      kspec_star = spectrum_of(kstar);
    }
  }

  std::vector<cplx> spectrum_of(const std::vector<cplx>& f) const {
    const Layout lay(sp->grid());
    std::size_t total = 1;
    for (int a = 0; a < lay.dim; ++a) total *= side;
    std::vector<cplx> cube(total, cplx{0.0, 0.0});
    scatter_to_cube(f, cube, lay, side);
    fftn_cube(cube, lay.dim, side, -1);
    return cube;
  }

  State convolve(const State& x, const std::vector<cplx>& spec, const std::vector<cplx>& ker) const {
    check_space(x, sp);
    const Grid& g = sp->grid();
    const Layout lay(g);
    State out(sp);
    if (direct) {
      // reference path: literal sum over kernel support
      long tp[3], tq[3];
      const long m = lay.m;
      for (std::size_t ip = 0; ip < x.size(); ++ip) {
        lay.digits(ip, tp);
        cplx acc{0.0, 0.0};
        for (std::size_t iq = 0; iq < x.size(); ++iq) {
          lay.digits(iq, tq);
          std::size_t j = 0;
          bool ok = true;
          for (int a = 0; a < lay.dim; ++a) {
            long d = tp[a] - tq[a] + (m - 1) / 2;  // stored digit of p - q
            if (g.topology() == Topology::circle) {
              d %= m;
              if (d < 0) d += m;
            } else if (d < 0 || d >= m) {
              ok = false;
              break;
            }
            j += static_cast<std::size_t>(d) * lay.stride[a];
          }
          if (ok) acc += ker[iq] * x.amp[j];
        }
        out.amp[ip] = acc * g.cell_volume();
      }
      return out;
    }
    std::size_t total = 1;
    for (int a = 0; a < lay.dim; ++a) total *= side;
    std::vector<cplx> cube(total, cplx{0.0, 0.0});
    scatter_to_cube(x.amp, cube, lay, side);
    fftn_cube(cube, lay.dim, side, -1);
    kernels::cmul(cube.data(), spec.data(), cube.data(), total);
    fftn_cube(cube, lay.dim, side, +1);
    const double scale = g.cell_volume() / static_cast<double>(total);
    // gather window: stored digit t reads cube digit (t + K) (mod side on circle)
    const long k_half = sp->grid().half_count();
    long t[3];
    for (std::size_t i = 0; i < out.size(); ++i) {
      lay.digits(i, t);
      std::size_t j = 0;
      for (int a = 0; a < lay.dim; ++a) {
        std::size_t d = static_cast<std::size_t>(t[a] + k_half);
        if (g.topology() == Topology::circle) d %= side;
        j = j * side + d;
      }
      out.amp[i] = cube[j] * scale;
    }
    return out;
  }

  const SpacePtr& space() const override { return sp; }
  State apply(const State& x) const override { return convolve(x, kspec, kernel); }
  State adjoint_apply(const State& x) const override {
    // K_f* = M_{1/w} K_{f*} M_w in the weighted inner product
    State wx(sp);
    kernels::rmul(x.amp.data(), sp->weights().data(), wx.amp.data(), x.size());
    State y = convolve(wx, kspec_star, kstar);
    State out(sp);
    kernels::rmul(y.amp.data(), sp->energies().data(), out.amp.data(), y.size());
    return out;
  }
  json descriptor() const override {
    return {{"family", "convolution"}, {"tag", tag}, {"grid", sp->id()}, {"direct", direct}};
  }
};

struct MultiplicationOp final : Operator::Concept {
  SpacePtr sp;
  std::vector<cplx> g;
  std::vector<cplx> gconj;
  std::string tag;
  MultiplicationOp(SpacePtr s, std::vector<cplx> mult, std::string tg)
      : sp(std::move(s)), g(std::move(mult)), tag(std::move(tg)) {
    if (g.size() != sp->size()) throw DimensionMismatch("multiplier size does not match grid");
    gconj.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gconj[i] = std::conj(g[i]);
  }
  const SpacePtr& space() const override { return sp; }
  State apply(const State& x) const override {
    check_space(x, sp);
    State out(sp);
    kernels::cmul(x.amp.data(), g.data(), out.amp.data(), x.size());
    return out;
  }
  State adjoint_apply(const State& x) const override {
    check_space(x, sp);
    State out(sp);
    kernels::cmul(x.amp.data(), gconj.data(), out.amp.data(), x.size());
    return out;
  }
  json descriptor() const override {
    return {{"family", "multiplication"}, {"tag", tag}, {"grid", sp->id()}};
  }
};

struct PositionMultiplierOp final : Operator::Concept {
  SpacePtr sp;
  std::vector<cplx> g, gconj;
  std::string tag;
  PositionMultiplierOp(SpacePtr s, std::vector<cplx> samples, std::string tg)
      : sp(std::move(s)), g(std::move(samples)), tag(std::move(tg)) {
    if (g.size() != sp->size()) throw DimensionMismatch("symbol size does not match grid");
    gconj.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gconj[i] = std::conj(g[i]);
  }
  State sandwich(const State& x, const std::vector<cplx>& mult) const {
    State pos = fourier(x, FourierDirection::to_position);
    kernels::cmul(pos.amp.data(), mult.data(), pos.amp.data(), pos.size());
    State back = fourier(pos, FourierDirection::to_momentum);
    return State(sp, std::move(back.amp));
  }
  const SpacePtr& space() const override { return sp; }
  State apply(const State& x) const override {
    check_space(x, sp);
    return sandwich(x, g);
  }
  State adjoint_apply(const State& x) const override {
    check_space(x, sp);
    // plain adjoint is the conjugate multiplier; weight the sandwich for the r-adjoint
    State wx(sp);
    kernels::rmul(x.amp.data(), sp->weights().data(), wx.amp.data(), x.size());
    State y = sandwich(wx, gconj);
    State out(sp);
    kernels::rmul(y.amp.data(), sp->energies().data(), out.amp.data(), y.size());
    return out;
  }
  json descriptor() const override {
    return {{"family", "position_multiplier"}, {"tag", tag}, {"grid", sp->id()}};
  }
};

struct PositionDiffOp final : Operator::Concept {
  SpacePtr sp;
  int axis;
  PositionDiffOp(SpacePtr s, int ax) : sp(std::move(s)), axis(ax) {}
  const SpacePtr& space() const override { return sp; }

  template <typename F>
  State stencil(const State& x, F&& fetch) const {
    const Grid& g = sp->grid();
    const Layout lay(g);
    State out(sp);
    const double inv2h = 1.0 / (2.0 * g.spacing());
    const cplx iunit{0.0, 1.0};
    long t[3];
    for (std::size_t i = 0; i < x.size(); ++i) {
      lay.digits(i, t);
      const long ta = t[axis];
      cplx up{0.0, 0.0}, dn{0.0, 0.0};
      if (g.topology() == Topology::circle) {
        const long su = (ta + 1) % lay.m;
        const long sd = (ta - 1 + lay.m) % lay.m;
        const std::size_t row = i - static_cast<std::size_t>(ta) * lay.stride[axis];
        up = fetch(row + static_cast<std::size_t>(su) * lay.stride[axis]);
        dn = fetch(row + static_cast<std::size_t>(sd) * lay.stride[axis]);
      } else {
        if (ta + 1 < lay.m) up = fetch(i + lay.stride[axis]);
        if (ta - 1 >= 0) dn = fetch(i - lay.stride[axis]);
      }
      out.amp[i] = iunit * (up - dn) * inv2h;
    }
    return out;
  }

  State apply(const State& x) const override {
    check_space(x, sp);
    return stencil(x, [&](std::size_t j) { return x.amp[j]; });
  }
  State adjoint_apply(const State& x) const override {
    // transpose of the stencil in the weighted inner product:
    // (Q* psi)(p) = (i/2h) [w(p+h) psi(p+h) - w(p-h) psi(p-h)] / w(p)
    check_space(x, sp);
    const auto& w = sp->weights();
    State y = stencil(x, [&](std::size_t j) { return x.amp[j] * w[j]; });
    State out(sp);
    kernels::rmul(y.amp.data(), sp->energies().data(), out.amp.data(), y.size());
    return out;
  }
  json descriptor() const override {
    return {{"family", "position"}, {"axis", axis}, {"backend", "difference"}, {"grid", sp->id()}};
  }
};

struct PositionSpectralOp final : Operator::Concept {
  SpacePtr sp;
  int axis;
  std::vector<cplx> xcoord;  // dual coordinate along axis, sampled over the dual grid
  PositionSpectralOp(SpacePtr s, int ax) : sp(std::move(s)), axis(ax) {
    const SpacePtr dual = sp->dual();
    const Grid& dg = dual->grid();
    xcoord.resize(dg.size());
    double coords[3];
    std::span<double> cs(coords, static_cast<std::size_t>(dg.dim()));
    for (std::size_t i = 0; i < xcoord.size(); ++i) {
      dg.coords_of(i, cs);
      xcoord[i] = coords[axis];
    }
  }
  State sandwich(const State& x) const {
    State pos = fourier(x, FourierDirection::to_position);
    kernels::cmul(pos.amp.data(), xcoord.data(), pos.amp.data(), pos.size());
    State back = fourier(pos, FourierDirection::to_momentum);
    return State(sp, std::move(back.amp));
  }
  const SpacePtr& space() const override { return sp; }
  State apply(const State& x) const override {
    check_space(x, sp);
    return sandwich(x);
  }
  State adjoint_apply(const State& x) const override {
    // plain-self-adjoint core; weight sandwich gives the r-adjoint M_E Q M_{1/E}
    check_space(x, sp);
    State wx(sp);
    kernels::rmul(x.amp.data(), sp->weights().data(), wx.amp.data(), x.size());
    State y = sandwich(wx);
    State out(sp);
    kernels::rmul(y.amp.data(), sp->energies().data(), out.amp.data(), y.size());
    return out;
  }
  json descriptor() const override {
    return {{"family", "position"}, {"axis", axis}, {"backend", "spectral"}, {"grid", sp->id()}};
  }
};

struct ComposeOp final : Operator::Concept {
  Operator a, b;
  ComposeOp(Operator a_, Operator b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a.space()->id() != b.space()->id()) throw DimensionMismatch("composed operators live on different spaces");
  }
  const SpacePtr& space() const override { return a.space(); }
  State apply(const State& x) const override { return a.apply(b.apply(x)); }
  State adjoint_apply(const State& x) const override { return b.adjoint_apply(a.adjoint_apply(x)); }
  json descriptor() const override {
    return {{"family", "compose"}, {"outer", a.descriptor()}, {"inner", b.descriptor()}};
  }
};

struct LincombOp final : Operator::Concept {
  std::vector<Term> terms;
  explicit LincombOp(std::vector<Term> t) : terms(std::move(t)) {
    if (terms.empty()) throw Error("lincomb needs at least one term");
    for (const Term& t2 : terms)
      if (t2.op.space()->id() != terms.front().op.space()->id())
        throw DimensionMismatch("lincomb terms live on different spaces");
  }
  const SpacePtr& space() const override { return terms.front().op.space(); }
  State apply(const State& x) const override {
    State acc(space());
    for (const Term& t : terms) {
      State y = t.op.apply(x);
      kernels::axpy(t.coeff, y.amp.data(), acc.amp.data(), acc.size());
    }
    return acc;
  }
  State adjoint_apply(const State& x) const override {
    State acc(space());
    for (const Term& t : terms) {
      State y = t.op.adjoint_apply(x);
      kernels::axpy(std::conj(t.coeff), y.amp.data(), acc.amp.data(), acc.size());
    }
    return acc;
  }
  json descriptor() const override {
    json arr = json::array();
    for (const Term& t : terms)
      arr.push_back({{"coeff_re", t.coeff.real()}, {"coeff_im", t.coeff.imag()}, {"op", t.op.descriptor()}});
    return {{"family", "lincomb"}, {"terms", arr}};
  }
};

struct AdjointOp final : Operator::Concept {
  Operator a;
  explicit AdjointOp(Operator a_) : a(std::move(a_)) {}
  const SpacePtr& space() const override { return a.space(); }
  State apply(const State& x) const override { return a.adjoint_apply(x); }
  State adjoint_apply(const State& x) const override { return a.apply(x); }
  json descriptor() const override { return {{"family", "adjoint"}, {"of", a.descriptor()}}; }
};

struct ModulationConjugateOp final : Operator::Concept {
  Operator a;
  std::vector<double> shift;
  std::vector<cplx> left, right;  // e^{-i a.p}, e^{+i a.p}
  ModulationConjugateOp(Operator a_, std::span<const double> sh) : a(std::move(a_)), shift(sh.begin(), sh.end()) {
    const Grid& g = a.space()->grid();
    left.resize(g.size());
    right.resize(g.size());
    double coords[3];
    std::span<double> cs(coords, static_cast<std::size_t>(g.dim()));
    for (std::size_t i = 0; i < left.size(); ++i) {
      g.coords_of(i, cs);
      double phase = 0.0;
      for (int d = 0; d < g.dim(); ++d) phase += shift[static_cast<std::size_t>(d)] * coords[d];
      left[i] = {std::cos(phase), -std::sin(phase)};
      right[i] = {std::cos(phase), std::sin(phase)};
    }
  }
  const SpacePtr& space() const override { return a.space(); }
  State apply(const State& x) const override {
    State u(space());
    kernels::cmul(x.amp.data(), right.data(), u.amp.data(), u.size());
    State v = a.apply(u);
    kernels::cmul(v.amp.data(), left.data(), v.amp.data(), v.size());
    return v;
  }
  State adjoint_apply(const State& x) const override {
    State u(space());
    kernels::cmul(x.amp.data(), right.data(), u.amp.data(), u.size());
    State v = a.adjoint_apply(u);
    kernels::cmul(v.amp.data(), left.data(), v.amp.data(), v.size());
    return v;
  }
  json descriptor() const override {
    return {{"family", "modulation_conjugate"}, {"shift", shift}, {"of", a.descriptor()}};
  }
};

struct ToPlainOp final : Operator::Concept {
  Operator a;
  SpacePtr plain;
  std::vector<double> sqrt_e, inv_sqrt_e;
  explicit ToPlainOp(Operator a_) : a(std::move(a_)), plain(a.space()->plain()) {
    const auto& e = a.space()->energies();
    sqrt_e.resize(e.size());
    inv_sqrt_e.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      sqrt_e[i] = std::sqrt(e[i]);
      inv_sqrt_e[i] = 1.0 / sqrt_e[i];
    }
  }
  const SpacePtr& space() const override { return plain; }
  State sandwich(const State& x, bool adj) const {
    State u(a.space());
    kernels::rmul(x.amp.data(), sqrt_e.data(), u.amp.data(), u.size());
    State v = adj ? a.adjoint_apply(u) : a.apply(u);
    State out(plain);
    kernels::rmul(v.amp.data(), inv_sqrt_e.data(), out.amp.data(), out.size());
    return out;
  }
  State apply(const State& x) const override {
    check_space(x, plain);
    return sandwich(x, false);
  }
  State adjoint_apply(const State& x) const override {
    check_space(x, plain);
    return sandwich(x, true);
  }
  json descriptor() const override { return {{"family", "conjugate_to_plain"}, {"of", a.descriptor()}}; }
};

struct FlipConjugateOp final : Operator::Concept {
  Operator a;
  explicit FlipConjugateOp(Operator a_) : a(std::move(a_)) {}
  const SpacePtr& space() const override { return a.space(); }
  State apply(const State& x) const override { return flip_state(a.apply(flip_state(x))); }
  State adjoint_apply(const State& x) const override { return flip_state(a.adjoint_apply(flip_state(x))); }
  json descriptor() const override { return {{"family", "flip_conjugate"}, {"of", a.descriptor()}}; }
};

struct ResolventOp final : Operator::Concept {
  SpacePtr sp;
  int axis;
  cplx z;
  ResolventOp(SpacePtr s, int ax, cplx z_) : sp(std::move(s)), axis(ax), z(z_) {
    if (z.imag() == 0.0) throw Error("resolvent requires Im z != 0: the spectrum is the real line");
    if (sp->grid().topology() != Topology::line) throw Error("resolvent only on line-topology grids");
  }
  const SpacePtr& space() const override { return sp; }

  // Composite trapezoid along the axis, truncated at the box edge:
  //   up:   out(u) = S(u) - L(u)/2 - q^{K-u} L(K)/2,   S(u) = L(u) + q S(u+1)
  //   down: out(u) = P(u) - L(u)/2 - q^{u+K} L(-K)/2,  P(u) = L(u) + q P(u-1)
  // The transpose forms are the exact adjoints of these sums (endpoint
  // weights land differently: half weight at the start, half only on the
  // terminal row), so the definitional adjoint check holds to round-off.
  enum class Form { up, down, up_transpose, down_transpose };

  State line_sum(const State& x, Form form, cplx q, cplx prefactor, bool weighted) const {
    const Grid& g = sp->grid();
    const Layout lay(g);
    State out(sp);
    const auto& w = sp->weights();
    const std::size_t stride = lay.stride[axis];
    const std::size_t block = stride * static_cast<std::size_t>(lay.m);
    const long m = lay.m;
    std::vector<cplx> line(static_cast<std::size_t>(m));
    std::vector<cplx> run(static_cast<std::size_t>(m));
    for (std::size_t base = 0; base < x.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const cplx* px = x.amp.data() + base + off;
        for (long t = 0; t < m; ++t) {
          const std::size_t idx = static_cast<std::size_t>(t) * stride;
          line[static_cast<std::size_t>(t)] = weighted ? px[idx] * w[base + off + idx] : px[idx];
        }
        const bool upward = (form == Form::up || form == Form::up_transpose);
        if (upward) {
          cplx s{0.0, 0.0};
          for (long t = m - 1; t >= 0; --t) {
            s = line[static_cast<std::size_t>(t)] + q * s;
            run[static_cast<std::size_t>(t)] = s;
          }
        } else {
          cplx s{0.0, 0.0};
          for (long t = 0; t < m; ++t) {
            s = line[static_cast<std::size_t>(t)] + q * s;
            run[static_cast<std::size_t>(t)] = s;
          }
        }
        cplx* po = out.amp.data() + base + off;
        switch (form) {
          case Form::up: {
            const cplx end = line[static_cast<std::size_t>(m - 1)];
            cplx qpow{1.0, 0.0};
            for (long t = m - 1; t >= 0; --t) {
              po[static_cast<std::size_t>(t) * stride] =
                  prefactor * (run[static_cast<std::size_t>(t)] - 0.5 * line[static_cast<std::size_t>(t)] - 0.5 * qpow * end);
              qpow *= q;
            }
            break;
          }
          case Form::down: {
            const cplx end = line[0];
            cplx qpow{1.0, 0.0};
            for (long t = 0; t < m; ++t) {
              po[static_cast<std::size_t>(t) * stride] =
                  prefactor * (run[static_cast<std::size_t>(t)] - 0.5 * line[static_cast<std::size_t>(t)] - 0.5 * qpow * end);
              qpow *= q;
            }
            break;
          }
          case Form::up_transpose: {
            for (long t = 1; t < m; ++t)
              po[static_cast<std::size_t>(t) * stride] =
                  prefactor * (run[static_cast<std::size_t>(t)] - 0.5 * line[static_cast<std::size_t>(t)]);
            po[0] = prefactor * 0.5 * (run[0] - line[0]);
            break;
          }
          case Form::down_transpose: {
            for (long t = 0; t < m - 1; ++t)
              po[static_cast<std::size_t>(t) * stride] =
                  prefactor * (run[static_cast<std::size_t>(t)] - 0.5 * line[static_cast<std::size_t>(t)]);
            po[static_cast<std::size_t>(m - 1) * stride] =
                prefactor * 0.5 * (run[static_cast<std::size_t>(m - 1)] - line[static_cast<std::size_t>(m - 1)]);
            break;
          }
        }
      }
    }
    return out;
  }

  State apply(const State& x) const override {
    check_space(x, sp);
    const double h = sp->grid().spacing();
    const cplx iunit{0.0, 1.0};
    if (z.imag() > 0.0) return line_sum(x, Form::up, std::exp(iunit * h * z), iunit * h, false);
    return line_sum(x, Form::down, std::exp(-iunit * h * z), -iunit * h, false);
  }
  State adjoint_apply(const State& x) const override {
    check_space(x, sp);
    const double h = sp->grid().spacing();
    const cplx iunit{0.0, 1.0};
    const cplx zc = std::conj(z);
    State y = (z.imag() > 0.0)
                  ? line_sum(x, Form::down_transpose, std::exp(-iunit * h * zc), -iunit * h, true)
                  : line_sum(x, Form::up_transpose, std::exp(iunit * h * zc), iunit * h, true);
    State out(sp);
    kernels::rmul(y.amp.data(), sp->energies().data(), out.amp.data(), y.size());
    return out;
  }
  json descriptor() const override {
    return {{"family", "resolvent"}, {"axis", axis}, {"z_re", z.real()}, {"z_im", z.imag()}, {"grid", sp->id()}};
  }
};

}  // namespace

Operator identity(SpacePtr space) { return Operator(std::make_shared<IdentityOp>(std::move(space))); }

Operator translation(SpacePtr space, std::span<const double> shift) {
  const Grid& g = space->grid();
  if (static_cast<int>(shift.size()) != g.dim()) throw DimensionMismatch("shift dimension mismatch");
  std::vector<long> steps(shift.size());
  for (std::size_t d = 0; d < shift.size(); ++d) {
    const double ratio = shift[d] / g.spacing();
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
      throw CommensurabilityError("translation shift must be a grid multiple; no interpolation");
    steps[d] = static_cast<long>(rounded);
  }
  return Operator(std::make_shared<TranslationOp>(std::move(space), std::move(steps)));
}

Operator translation_steps(SpacePtr space, std::span<const long> steps) {
  return Operator(std::make_shared<TranslationOp>(std::move(space), std::vector<long>(steps.begin(), steps.end())));
}

Operator convolution(SpacePtr space, std::vector<cplx> kernel, std::string tag, bool direct_sum) {
  return Operator(std::make_shared<ConvolutionOp>(std::move(space), std::move(kernel), std::move(tag), direct_sum));
}

Operator position_operator(SpacePtr space, int axis, DerivativeBackend backend) {
  if (axis < 0 || axis >= space->grid().dim()) throw Error("position axis out of range");
  if (backend == DerivativeBackend::difference)
    return Operator(std::make_shared<PositionDiffOp>(std::move(space), axis));
  return Operator(std::make_shared<PositionSpectralOp>(std::move(space), axis));
}

Operator multiplication(SpacePtr space, std::vector<cplx> multiplier, std::string tag) {
  return Operator(std::make_shared<MultiplicationOp>(std::move(space), std::move(multiplier), std::move(tag)));
}

Operator position_multiplier(SpacePtr space, std::vector<cplx> position_samples, std::string tag) {
  return Operator(std::make_shared<PositionMultiplierOp>(std::move(space), std::move(position_samples), std::move(tag)));
}

Operator compose(Operator a, Operator b) { return Operator(std::make_shared<ComposeOp>(std::move(a), std::move(b))); }

Operator lincomb(std::vector<Term> terms) { return Operator(std::make_shared<LincombOp>(std::move(terms))); }

Operator scaled(cplx c, Operator a) { return lincomb({{c, std::move(a)}}); }

Operator adjoint(Operator a) { return Operator(std::make_shared<AdjointOp>(std::move(a))); }

Operator modulation_conjugate(Operator a, std::span<const double> shift) {
  if (static_cast<int>(shift.size()) != a.space()->grid().dim())
    throw DimensionMismatch("modulation shift dimension mismatch");
  return Operator(std::make_shared<ModulationConjugateOp>(std::move(a), shift));
}

Operator conjugate_to_plain(Operator a) { return Operator(std::make_shared<ToPlainOp>(std::move(a))); }

Operator flip_conjugate(Operator a) { return Operator(std::make_shared<FlipConjugateOp>(std::move(a))); }

State flip_state(const State& x) {
  const Grid& g = x.space->grid();
  const Layout lay(g);
  State out(x.space);
  long t[3];
  for (std::size_t i = 0; i < x.size(); ++i) {
    lay.digits(i, t);
    std::size_t j = 0;
    for (int a = 0; a < lay.dim; ++a)
      j += static_cast<std::size_t>(lay.m - 1 - t[a]) * lay.stride[a];
    out.amp[j] = std::conj(x.amp[i]);
  }
  return out;
}

Operator position_resolvent(SpacePtr space, int axis, cplx z) {
  return Operator(std::make_shared<ResolventOp>(std::move(space), axis, z));
}

State translation_adjoint_closed_form(const SpacePtr& space, std::span<const long> steps, const State& x) {
  TranslationOp op(space, std::vector<long>(steps.begin(), steps.end()));
  return op.adjoint_apply(x);
}

std::vector<cplx> kernel_star(const Grid& grid, const std::vector<cplx>& kernel) {
  const Layout lay(grid);
  std::vector<cplx> out(kernel.size());
  long t[3];
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    lay.digits(i, t);
    std::size_t j = 0;
    for (int a = 0; a < lay.dim; ++a)
      j += static_cast<std::size_t>(lay.m - 1 - t[a]) * lay.stride[a];
    out[j] = std::conj(kernel[i]);
  }
  return out;
}

double adjoint_defect(const Operator& a, int pairs, std::uint64_t seed) {
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    State u = random_state(a.space(), seed + 2 * static_cast<std::uint64_t>(k));
    State v = random_state(a.space(), seed + 2 * static_cast<std::uint64_t>(k) + 1);
    State au = a.apply(u);
    State av = a.adjoint_apply(v);
    const cplx lhs = r_inner(au, v);
    const cplx rhs = r_inner(u, av);
    const double scale = r_norm(au) * r_norm(v) + r_norm(u) * r_norm(av) + 1e-300;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace kgop
