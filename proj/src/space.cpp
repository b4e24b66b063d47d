#include "kgop/space.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>

#include "kgop/fft.hpp"
#include "kgop/kernels.hpp"

namespace kgop {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;
}  // namespace

Grid::Grid(int dim, double spacing, long half_count, Topology topology)
    : dim_(dim), spacing_(spacing), half_count_(half_count), topology_(topology) {
  if (dim < 1 || dim > 3) throw Error("grid dim must be 1..3");
  if (spacing <= 0.0) throw Error("grid spacing must be positive");
  if (half_count < 1) throw Error("grid must have at least 3 points per axis");
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(points_per_axis());
  size_ = s;
  cell_volume_ = std::pow(spacing, dim);
}

Grid Grid::box(int dim, double spacing, double radius, Topology topology) {
  const double ratio = radius / spacing;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw Error("radius must be an integer multiple of spacing");
  return Grid(dim, spacing, static_cast<long>(rounded), topology);
}

Grid Grid::lattice(int dim, long cutoff) { return Grid(dim, 1.0, cutoff, Topology::circle); }

double Grid::dual_spacing() const {
  return kTwoPi / (static_cast<double>(points_per_axis()) * spacing_);
}

std::size_t Grid::index_of(std::span<const long> multi) const {
  const long m = points_per_axis();
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    const long k = multi[i];
    if (k < -half_count_ || k > half_count_) throw Error("grid multi-index out of range");
    idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(k + half_count_);
  }
  return idx;
}

void Grid::multi_of(std::size_t index, std::span<long> multi) const {
  const long m = points_per_axis();
  for (int i = dim_ - 1; i >= 0; --i) {
    multi[i] = static_cast<long>(index % static_cast<std::size_t>(m)) - half_count_;
    index /= static_cast<std::size_t>(m);
  }
}

void Grid::coords_of(std::size_t index, std::span<double> coords) const {
  long multi[3];
  multi_of(index, std::span<long>(multi, static_cast<std::size_t>(dim_)));
  for (int i = 0; i < dim_; ++i) coords[i] = spacing_ * static_cast<double>(multi[i]);
}

WeightSpec WeightSpec::relativistic(double mass) {
  if (!(mass > 0.0)) throw Error("mass must be positive");
  WeightSpec w;
  w.kind = Kind::relativistic;
  w.mass = mass;
  w.name = "relativistic";
  return w;
}

WeightSpec WeightSpec::flat() {
  WeightSpec w;
  w.kind = Kind::custom;
  w.name = "flat";
  w.fn = [](std::span<const double>) { return 1.0; };
  return w;
}

WeightSpec WeightSpec::cauchy() {
  WeightSpec w;
  w.kind = Kind::custom;
  w.name = "cauchy";
  w.fn = [](std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x * x;
    return 1.0 / (1.0 + s);
  };
  return w;
}

WeightSpec WeightSpec::custom(std::string name, std::function<double(std::span<const double>)> fn) {
  WeightSpec w;
  w.kind = Kind::custom;
  w.name = std::move(name);
  w.fn = std::move(fn);
  return w;
}

Space::Space(Grid grid, WeightSpec weight) : grid_(grid), weight_(std::move(weight)) {
  const std::size_t n = grid_.size();
  w_.resize(n);
  energy_.resize(n);
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(grid_.dim()));
  for (std::size_t i = 0; i < n; ++i) {
    grid_.coords_of(i, cs);
    double w;
    if (weight_.kind == WeightSpec::Kind::relativistic) {
      double s = weight_.mass * weight_.mass;
      for (int d = 0; d < grid_.dim(); ++d) s += coords[d] * coords[d];
      w = 1.0 / std::sqrt(s);
    } else {
      w = weight_.fn(cs);
    }
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("weight must be positive and finite on the grid");
    w_[i] = w;
    energy_[i] = 1.0 / w;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "n%d_h%.17g_K%ld_%s_%s_m%.17g", grid_.dim(), grid_.spacing(),
                grid_.half_count(), grid_.topology() == Topology::line ? "line" : "circle",
                weight_.name.c_str(), weight_.mass);
  id_ = buf;
}

std::shared_ptr<const Space> Space::make(Grid grid, WeightSpec weight) {
  return std::shared_ptr<const Space>(new Space(grid, std::move(weight)));
}

std::shared_ptr<const Space> Space::plain() const {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (!plain_) {
    if (weight_.name == "flat")
      plain_ = shared_from_this();
    else
      plain_ = make(grid_, WeightSpec::flat());
  }
  return plain_;
}

std::shared_ptr<const Space> Space::dual() const {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (auto back = dual_back_.lock()) return back;
  if (!dual_) {
    Grid dual_grid(grid_.dim(), grid_.dual_spacing(), grid_.half_count(), grid_.topology());
    dual_ = make(dual_grid, WeightSpec::flat());
    dual_->dual_back_ = shared_from_this();
  }
  return dual_;
}

std::string Space::config_block() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "dim = %d\nspacing = %.17g\nradius = %.17g\nweight_kind = %s\nmass = %.17g\n",
                grid_.dim(), grid_.spacing(), grid_.radius(), weight_.name.c_str(), weight_.mass);
  return buf;
}

SpacePtr make_relativistic_space(const Grid& grid, double mass) {
  return Space::make(grid, WeightSpec::relativistic(mass));
}

void check_same_space(const State& a, const State& b) {
  if (a.space->id() != b.space->id() || a.amp.size() != b.amp.size())
    throw DimensionMismatch("states live on different grids");
}

void check_space(const State& a, const SpacePtr& expected) {
  if (a.space->id() != expected->id() || a.amp.size() != expected->size())
    throw DimensionMismatch("state does not live on the operator's grid");
}

cplx r_inner(const State& a, const State& b) {
  check_same_space(a, b);
  const cplx s = kernels::dot_weighted(a.amp.data(), b.amp.data(), a.space->weights().data(), a.size());
  return s * a.space->grid().cell_volume();
}

cplx plain_inner(const State& a, const State& b) {
  check_same_space(a, b);
  return kernels::dot(a.amp.data(), b.amp.data(), a.size()) * a.space->grid().cell_volume();
}

double r_norm(const State& a) {
  return std::sqrt(kernels::norm2_weighted(a.amp.data(), a.space->weights().data(), a.size()) *
                   a.space->grid().cell_volume());
}

double plain_norm(const State& a) {
  return std::sqrt(kernels::norm2(a.amp.data(), a.size()) * a.space->grid().cell_volume());
}

State operator+(const State& a, const State& b) {
  check_same_space(a, b);
  State out = a;
  kernels::axpy(cplx{1.0, 0.0}, b.amp.data(), out.amp.data(), out.size());
  return out;
}

State operator-(const State& a, const State& b) {
  check_same_space(a, b);
  State out = a;
  kernels::axpy(cplx{-1.0, 0.0}, b.amp.data(), out.amp.data(), out.size());
  return out;
}

State operator*(cplx c, const State& a) {
  State out(a.space);
  kernels::scale(c, a.amp.data(), out.amp.data(), a.size());
  return out;
}

State embed_plain_into_r(const State& a) { return a; }

namespace {

// Centered DFT along one axis. With k, j in [-K, K] and M = 2K+1,
//   v[j] = c * sum_k u[k] e^{sign*2*pi*i*k*j/M}
// via (k-K)(j-K) = kj - K(k+j) + K^2 twists around a standard transform.
// Twist angles are reduced mod M in integers.
void centered_transform_axis(std::vector<cplx>& data, const Grid& grid, int axis, int sign, double scale) {
  const long m = grid.points_per_axis();
  const long k_half = grid.half_count();
  const std::size_t n = data.size();
  std::size_t stride = 1;
  for (int d = grid.dim() - 1; d > axis; --d) stride *= static_cast<std::size_t>(m);
  const std::size_t block = stride * static_cast<std::size_t>(m);

  std::vector<cplx> twist(static_cast<std::size_t>(m));
  std::vector<cplx> line(static_cast<std::size_t>(m));
  for (long t = 0; t < m; ++t) {
    // angle = sign * 2*pi * (-K * t mod M) / M
    const long r = ((m - (k_half % m)) * t) % m;
    const double ang = sign * kTwoPi * static_cast<double>(r) / static_cast<double>(m);
    twist[static_cast<std::size_t>(t)] = {std::cos(ang), std::sin(ang)};
  }
  // global phase e^{sign*2*pi*i*K^2/M}
  const long k2 = ((k_half % m) * (k_half % m)) % m;
  const double gang = sign * kTwoPi * static_cast<double>(k2) / static_cast<double>(m);
  const cplx global = cplx{std::cos(gang), std::sin(gang)} * scale;

  for (std::size_t base = 0; base < n; base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      cplx* p = data.data() + base + off;
      for (long t = 0; t < m; ++t) line[static_cast<std::size_t>(t)] = p[static_cast<std::size_t>(t) * stride] * twist[static_cast<std::size_t>(t)];
      fft::transform(line, sign);
      for (long t = 0; t < m; ++t) p[static_cast<std::size_t>(t) * stride] = line[static_cast<std::size_t>(t)] * twist[static_cast<std::size_t>(t)] * global;
    }
  }
}

}  // namespace

State fourier(const State& a, FourierDirection dir) {
  const Grid& g = a.space->grid();
  const int sign = (dir == FourierDirection::to_position) ? +1 : -1;
  // per-axis scale (h_in / sqrt(2*pi)); the dual grid picks up the rest
  const double axis_scale = g.spacing() / kSqrtTwoPi;
  State out(a.space->dual(), a.amp);
  std::vector<cplx> buf = std::move(out.amp);
  for (int axis = 0; axis < g.dim(); ++axis) centered_transform_axis(buf, g, axis, sign, axis_scale);
  out.amp = std::move(buf);
  return out;
}

State random_state(const SpacePtr& space, std::uint64_t seed) {
  State out(space);
  std::mt19937_64 rng(seed);
  const double inv = 1.0 / 18446744073709551616.0;  // 2^-64
  auto uniform = [&]() { return (static_cast<double>(rng()) + 0.5) * inv; };
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Box-Muller, pinned algorithm for cross-platform reproducibility
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out.amp[i] = {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
  }
  return out;
}

State gaussian_state(const SpacePtr& space, std::span<const double> center, double width,
                     std::span<const double> modulation) {
  State out(space);
  const Grid& g = space->grid();
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    g.coords_of(i, cs);
    double q = 0.0, phase = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const double dx = coords[d] - (d < static_cast<int>(center.size()) ? center[d] : 0.0);
      q += dx * dx;
      if (d < static_cast<int>(modulation.size())) phase += modulation[d] * coords[d];
    }
    const double mag = std::exp(-q / (2.0 * width * width));
    out.amp[i] = {mag * std::cos(phase), mag * std::sin(phase)};
  }
  return out;
}

std::string state_to_csv(const State& a) {
  const Grid& g = a.space->grid();
  std::string out = "index";
  for (int d = 0; d < g.dim(); ++d) {
    out += ",p";
    out += static_cast<char>('1' + d);
  }
  out += ",re,im\n";
  char buf[160];
  double coords[3];
  std::span<double> cs(coords, static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    g.coords_of(i, cs);
    std::snprintf(buf, sizeof(buf), "%zu", i);
    out += buf;
    for (int d = 0; d < g.dim(); ++d) {
      std::snprintf(buf, sizeof(buf), ",%.17g", coords[d]);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", a.amp[i].real(), a.amp[i].imag());
    out += buf;
  }
  return out;
}

}  // namespace kgop
