#include "kgop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "kgop/kernels.hpp"

namespace kgop::spectral {

NormEstimate operator_norm(const Operator& a, double tol, int max_iter) {
  NormEstimate est;
  State q = random_state(a.space(), kNormSeed);
  double nq = r_norm(q);
  if (nq == 0.0) return est;
  q = cplx{1.0 / nq, 0.0} * q;

  double lambda = 0.0;
  std::deque<double> window;
  const int window_len = 8;
  State bq(a.space());
  for (int it = 1; it <= max_iter; ++it) {
    State aq = a.apply(q);
    bq = a.adjoint_apply(aq);
    const cplx ray = r_inner(bq, q);  // <A*A q, q>_r, real nonnegative up to round-off
    lambda = std::max(0.0, ray.real());
    est.iterations = it;
    const double nbq = r_norm(bq);
    if (nbq == 0.0) {
      // A*A q = 0: the operator annihilates the probe; norm estimate 0
      est.value = est.lower = est.upper = 0.0;
      est.converged = true;
      return est;
    }
    window.push_back(std::sqrt(lambda));
    if (static_cast<int>(window.size()) > window_len) window.pop_front();
    if (static_cast<int>(window.size()) == window_len) {
      const double lo = *std::min_element(window.begin(), window.end());
      const double hi = *std::max_element(window.begin(), window.end());
      if (hi - lo <= tol * std::max(hi, 1e-300)) {
        est.converged = true;
        break;
      }
    }
    q = cplx{1.0 / nbq, 0.0} * bq;
  }
  // residual bracket: |lambda_max - rayleigh| <= ||B q - rayleigh q||_r
  State resid = bq - cplx{lambda, 0.0} * q;
  const double r = r_norm(resid);
  est.lower = std::sqrt(std::max(0.0, lambda));
  est.upper = std::sqrt(lambda + r);
  est.value = est.lower;
  return est;
}

namespace {

// cyclic Jacobi for a Hermitian matrix held row-major, in place
void jacobi_hermitian(std::vector<cplx>& h, std::size_t n) {
  auto at = [&](std::size_t r, std::size_t c) -> cplx& { return h[r * n + c]; };
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += std::abs(at(i, i));
      for (std::size_t j = i + 1; j < n; ++j) off += std::abs(at(i, j));
    }
    if (off <= 1e-14 * std::max(diag, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx hpq = at(p, q);
        if (std::abs(hpq) == 0.0) continue;
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        // unitary 2x2 diagonalization: G = [c, -conj(s); s, c]
        const double phase = std::arg(hpq);
        const double apq = std::abs(hpq);
        const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        const double c = std::cos(theta);
        const cplx s = std::polar(std::sin(theta), phase);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx hkp = at(k, p), hkq = at(k, q);
          at(k, p) = c * hkp - std::conj(s) * hkq;
          at(k, q) = s * hkp + c * hkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx hpk = at(p, k), hqk = at(q, k);
          at(p, k) = c * hpk - s * hqk;
          at(q, k) = std::conj(s) * hpk + c * hqk;
        }
        at(p, q) = cplx{0.0, 0.0};
        at(q, p) = cplx{0.0, 0.0};
        at(p, p) = cplx{at(p, p).real(), 0.0};
        at(q, q) = cplx{at(q, q).real(), 0.0};
      }
    }
  }
}

}  // namespace

std::vector<double> hermitian_eigenvalues(std::vector<cplx> matrix, std::size_t n) {
  jacobi_hermitian(matrix, n);
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = matrix[i * n + i].real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> singular_values(const std::vector<cplx>& matrix, std::size_t rows, std::size_t cols) {
  // Gram of the smaller side
  const bool fat = cols > rows;
  const std::size_t n = fat ? rows : cols;
  std::vector<cplx> gram(n * n, cplx{0.0, 0.0});
  if (!fat) {
    for (std::size_t i = 0; i < cols; ++i)
      for (std::size_t j = i; j < cols; ++j) {
        cplx s{0.0, 0.0};
        for (std::size_t r = 0; r < rows; ++r) s += std::conj(matrix[r * cols + i]) * matrix[r * cols + j];
        gram[i * n + j] = s;
        gram[j * n + i] = std::conj(s);
      }
  } else {
    // M M^H on the row side; dot conjugates its second argument
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = i; j < rows; ++j) {
        const cplx s = kernels::dot(&matrix[i * cols], &matrix[j * cols], cols);
        gram[i * n + j] = s;
        gram[j * n + i] = std::conj(s);
      }
  }
  std::vector<double> ev = hermitian_eigenvalues(std::move(gram), n);
  std::vector<double> sv(n);
  for (std::size_t i = 0; i < n; ++i) sv[i] = std::sqrt(std::max(0.0, ev[n - 1 - i]));
  return sv;
}

double operator_norm_dense(const Operator& a) {
  const SpacePtr& sp = a.space();
  const std::size_t n = sp->size();
  if (n > 2000) throw Error("dense norm limited to dimension 2000");
  const auto& w = sp->weights();
  // columns of A in the orthonormal basis e_j = delta_j / sqrt(w_j h^n):
  // M(i,j) = (A delta_j)(i) * sqrt(w_i / w_j)
  std::vector<cplx> mat(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    State ej(sp);
    ej.amp[j] = cplx{1.0, 0.0};
    State col = a.apply(ej);
    for (std::size_t i = 0; i < n; ++i) mat[i * n + j] = col.amp[i] * std::sqrt(w[i] / w[j]);
  }
  return singular_values(mat, n, n).front();
}

double translation_norm_exact(const SpacePtr& space, std::span<const double> shift) {
  const Grid& g = space->grid();
  if (static_cast<int>(shift.size()) != g.dim()) throw DimensionMismatch("shift dimension mismatch");
  long steps[3];
  for (int d = 0; d < g.dim(); ++d) {
    const double ratio = shift[static_cast<std::size_t>(d)] / g.spacing();
    steps[d] = static_cast<long>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps[d])) > 1e-9 * std::max(1.0, std::abs(ratio)))
      throw CommensurabilityError("translation shift must be a grid multiple");
  }
  const long m = g.points_per_axis();
  const auto& w = space->weights();
  // max over p with p and p+a admissible of w(p+a)/w(p) = E(p)/E(p+a)
  double best = 0.0;
  long t[3];
  for (std::size_t i = 0; i < space->size(); ++i) {
    std::size_t j = 0;
    bool ok = true;
    std::size_t rest = i;
    for (int d = g.dim() - 1; d >= 0; --d) {
      t[d] = static_cast<long>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    std::size_t mul = 1;
    for (int d = g.dim() - 1; d >= 0; --d) {
      long s = t[d] + steps[d];
      if (g.topology() == Topology::circle) {
        s %= m;
        if (s < 0) s += m;
      } else if (s < 0 || s >= m) {
        ok = false;
        break;
      }
      j += static_cast<std::size_t>(s) * mul;
      mul *= static_cast<std::size_t>(m);
    }
    if (!ok) continue;
    best = std::max(best, w[j] / w[i]);
  }
  return std::sqrt(best);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double d = static_cast<double>(n);
  return (d * sxy - sx * sy) / (d * sxx - sx * sx);
}

namespace {

// weighted modified Gram-Schmidt with one reorthogonalization pass
std::vector<State> orthonormalize(const std::vector<State>& cols) {
  std::vector<State> q;
  q.reserve(cols.size());
  for (const State& c : cols) {
    State v = c;
    for (int pass = 0; pass < 2; ++pass) {
      for (const State& u : q) {
        const cplx proj = r_inner(v, u);
        kernels::axpy(-proj, u.amp.data(), v.amp.data(), v.size());
      }
    }
    const double nv = r_norm(v);
    if (nv < 1e-13) throw RankDeficientBasis(std::numeric_limits<double>::infinity());
    q.push_back(cplx{1.0 / nv, 0.0} * v);
  }
  return q;
}

}  // namespace

SubspaceBasis build_subspace(const SpacePtr& space, std::span<const Box> region) {
  const SpacePtr dual = space->dual();
  const Grid& dg = dual->grid();
  SubspaceBasis basis;
  basis.space = space;
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(dg.dim()));
  for (std::size_t i = 0; i < dg.size(); ++i) {
    dg.coords_of(i, cs);
    bool inside = false;
    for (const Box& b : region) {
      bool in_b = true;
      for (int d = 0; d < dg.dim(); ++d)
        if (coords[d] < b.lo[d] || coords[d] > b.hi[d]) {
          in_b = false;
          break;
        }
      if (in_b) {
        inside = true;
        break;
      }
    }
    if (inside) basis.position_indices.push_back(i);
  }
  if (basis.position_indices.empty()) throw EmptySubspace("region does not intersect the position grid");

  for (std::size_t idx : basis.position_indices) {
    State col(dual);
    col.amp[idx] = cplx{1.0, 0.0};
    State mom = fourier(col, FourierDirection::to_momentum);
    basis.columns.emplace_back(space, std::move(mom.amp));
  }
  const std::size_t d = basis.columns.size();
  basis.gram.assign(d * d, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) basis.gram[i * d + j] = r_inner(basis.columns[i], basis.columns[j]);
  std::vector<double> ev = hermitian_eigenvalues(basis.gram, d);
  const double lmin = ev.front(), lmax = ev.back();
  basis.gram_condition = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmin > 1e-12 * lmax)) throw RankDeficientBasis(basis.gram_condition);
  basis.orthonormal = orthonormalize(basis.columns);
  return basis;
}

PrincipalAngleReport principal_angles(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.space->id() != b.space->id()) throw DimensionMismatch("subspaces live on different spaces");
  PrincipalAngleReport rep;
  rep.gram_condition_a = a.gram_condition;
  rep.gram_condition_b = b.gram_condition;
  const std::size_t da = a.orthonormal.size(), db = b.orthonormal.size();
  std::vector<cplx> cross(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) cross[i * db + j] = r_inner(a.orthonormal[i], b.orthonormal[j]);
  rep.cosines = singular_values(cross, da, db);
  for (double& c : rep.cosines) c = std::min(c, 1.0);
  return rep;
}

double projection_residual(const SubspaceBasis& basis, const State& x) {
  State v = x;
  for (const State& u : basis.orthonormal) {
    const cplx proj = r_inner(v, u);
    kernels::axpy(-proj, u.amp.data(), v.amp.data(), v.size());
  }
  const double nx = r_norm(x);
  return nx > 0.0 ? r_norm(v) / nx : 0.0;
}

std::vector<double> compactness_probe(const SpacePtr& space, const std::vector<cplx>& kernel,
                                      std::size_t count) {
  Operator kf = conjugate_to_plain(convolution(space, kernel));
  Operator kfs = conjugate_to_plain(convolution(space, kernel_star(space->grid(), kernel)));
  Operator diff = lincomb({{cplx{1.0, 0.0}, kf}, {cplx{-1.0, 0.0}, adjoint(kfs)}});
  const SpacePtr plain = diff.space();
  const std::size_t n = plain->size();
  if (n > 2000) throw Error("compactness probe limited to dimension 2000");
  // flat weight: the delta basis is orthogonal with equal norms, so the
  // cell-volume scaling cancels in the singular values
  std::vector<cplx> mat(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    State ej(plain);
    ej.amp[j] = cplx{1.0, 0.0};
    State col = diff.apply(ej);
    for (std::size_t i = 0; i < n; ++i) mat[i * n + j] = col.amp[i];
  }
  std::vector<double> sv = singular_values(mat, n, n);
  if (sv.size() > count) sv.resize(count);
  return sv;
}

}  // namespace kgop::spectral
