#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Discretized models of the weighted momentum space L^2(R^n, w(p) dp) and of
// the weighted sequence space over Z^n. A Grid is a uniform box of points
// h*Z^n intersected with [-R, R]^n, enumerated row-major; the circle
// topology turns it into the 2K+1 point cyclic lattice used by the torus
// model. A Space pairs a grid with a weight and caches the sampled weight
// and energy arrays; states are complex amplitude vectors over the grid.

namespace kgop {

using cplx = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct CommensurabilityError : Error {
  using Error::Error;
};

enum class Topology { line, circle };

class Grid {
 public:
  Grid(int dim, double spacing, long half_count, Topology topology);

  // Checks that radius/spacing is integral (no partial cells).
  static Grid box(int dim, double spacing, double radius, Topology topology = Topology::line);
  static Grid lattice(int dim, long cutoff);  // h = 1, circle topology

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  long half_count() const { return half_count_; }
  double radius() const { return spacing_ * static_cast<double>(half_count_); }
  Topology topology() const { return topology_; }
  long points_per_axis() const { return 2 * half_count_ + 1; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  // spacing of the dual (position-side) grid: 2*pi / (M*h)
  double dual_spacing() const;

  // row-major enumeration, axis 0 slowest
  std::size_t index_of(std::span<const long> multi) const;
  void multi_of(std::size_t index, std::span<long> multi) const;
  void coords_of(std::size_t index, std::span<double> coords) const;
  double coord(long k) const { return spacing_ * static_cast<double>(k); }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && spacing_ == o.spacing_ && half_count_ == o.half_count_ && topology_ == o.topology_;
  }

 private:
  int dim_;
  double spacing_;
  long half_count_;
  Topology topology_;
  std::size_t size_;
  double cell_volume_;
};

struct WeightSpec {
  enum class Kind { relativistic, custom };
  Kind kind = Kind::relativistic;
  double mass = 1.0;  // relativistic only
  std::string name = "relativistic";
  std::function<double(std::span<const double>)> fn;  // custom only, returns w(p) > 0

  static WeightSpec relativistic(double mass);
  static WeightSpec flat();
  // w(p) = 1/(1+|p|^2), the E(p) = 1+p^2 alternative
  static WeightSpec cauchy();
  static WeightSpec custom(std::string name, std::function<double(std::span<const double>)> fn);
};

class Space : public std::enable_shared_from_this<Space> {
 public:
  static std::shared_ptr<const Space> make(Grid grid, WeightSpec weight);

  const Grid& grid() const { return grid_; }
  const WeightSpec& weight_spec() const { return weight_; }
  std::size_t size() const { return grid_.size(); }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& energies() const { return energy_; }  // 1/w
  double weight_at(std::size_t i) const { return w_[i]; }
  double energy_at(std::size_t i) const { return energy_[i]; }
  const std::string& id() const { return id_; }
  bool is_relativistic() const { return weight_.kind == WeightSpec::Kind::relativistic; }
  double mass() const { return weight_.mass; }

  // Same grid, weight identically 1.
  std::shared_ptr<const Space> plain() const;
  // The Fourier-dual space: grid with dual spacing, flat weight. dual() of
  // the dual returns this object, so transform round trips stay on one pair.
  std::shared_ptr<const Space> dual() const;

  // key-value config block (documented keys: dim, spacing, radius, mass, weight_kind)
  std::string config_block() const;

 private:
  Space(Grid grid, WeightSpec weight);
  Grid grid_;
  WeightSpec weight_;
  std::vector<double> w_;
  std::vector<double> energy_;
  std::string id_;
  mutable std::shared_ptr<const Space> plain_;
  mutable std::shared_ptr<const Space> dual_;
  mutable std::weak_ptr<const Space> dual_back_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_relativistic_space(const Grid& grid, double mass);

struct State {
  SpacePtr space;
  std::vector<cplx> amp;

  State() = default;
  explicit State(SpacePtr s) : space(std::move(s)), amp(space->size(), cplx{0.0, 0.0}) {}
  State(SpacePtr s, std::vector<cplx> a) : space(std::move(s)), amp(std::move(a)) {
    if (amp.size() != space->size()) throw DimensionMismatch("state size does not match grid");
  }
  std::size_t size() const { return amp.size(); }
};

// weighted and plain inner products / norms (Riemann weight h^n)
cplx r_inner(const State& a, const State& b);
cplx plain_inner(const State& a, const State& b);
double r_norm(const State& a);
double plain_norm(const State& a);

State operator+(const State& a, const State& b);
State operator-(const State& a, const State& b);
State operator*(cplx c, const State& a);

// Amplitudes reinterpreted in the weighted space; identity on data. Requires
// a bounded weight so the containment makes sense.
State embed_plain_into_r(const State& a);

enum class FourierDirection { to_position, to_momentum };

// Unitary (plain inner products) discrete Fourier transform between the grid
// and its dual. to_position uses kernel e^{+i p.x}; to_momentum is its
// inverse. The result lives on space->dual().
State fourier(const State& a, FourierDirection dir);

// Fixed-seed complex Gaussian states (Box-Muller over mt19937_64; portable).
State random_state(const SpacePtr& space, std::uint64_t seed);
// Gaussian bump exp(-|p - center|^2 / (2 width^2)), optionally modulated by
// exp(i k.p).
State gaussian_state(const SpacePtr& space, std::span<const double> center, double width,
                     std::span<const double> modulation = {});

// CSV export: index, p-coordinates, re, im
std::string state_to_csv(const State& a);

void check_same_space(const State& a, const State& b);
void check_space(const State& a, const SpacePtr& expected);

}  // namespace kgop
