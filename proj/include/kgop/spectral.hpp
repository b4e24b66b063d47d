#pragma once

#include <vector>

#include "kgop/operators.hpp"

// Norm estimation and spectral probes. The norm oracle is power iteration on
// A*A in the space's own inner product; a dense decomposition (cyclic Jacobi
// on the Hermitian Gram) backs it up at small dimension and drives the
// principal-angle and compactness studies.

namespace kgop::spectral {

inline constexpr std::uint64_t kNormSeed = 0x4B47;

struct NormEstimate {
  double value = 0.0;      // estimated operator norm
  double lower = 0.0;      // Rayleigh quotient, always a lower bound
  double upper = 0.0;      // residual-based upper end of the bracket
  int iterations = 0;
  bool converged = false;
};

// Power iteration on A*A from a seeded random start, Rayleigh-quotient
// stopping over a trailing window. Non-convergence is flagged, not thrown;
// the estimate carries the last bracket.
NormEstimate operator_norm(const Operator& a, double tol = 1e-6, int max_iter = 20000);

// Dense route for dimension <= 2000: materialize A in the orthonormal basis
// of the weighted space and take the largest singular value.
double operator_norm_dense(const Operator& a);

// Hermitian eigenvalues (ascending) by cyclic Jacobi; optionally vectors.
std::vector<double> hermitian_eigenvalues(std::vector<cplx> matrix, std::size_t n);

// Singular values (descending) of a dense rectangular matrix, rows x cols,
// row-major, via the Hermitian Gram.
std::vector<double> singular_values(const std::vector<cplx>& matrix, std::size_t rows, std::size_t cols);

// sup over admissible grid points of sqrt(E(p)/E(p+a)); the exact norm of
// the translation by a on the discretized space.
double translation_norm_exact(const SpacePtr& space, std::span<const double> shift);

// least-squares slope of log(y) against log(x)
double loglog_slope(std::span<const double> x, std::span<const double> y);

// --- spectral subspaces ----------------------------------------------------

struct Box {
  double lo[3];
  double hi[3];
};

struct SubspaceBasis {
  SpacePtr space;
  std::vector<State> columns;       // momentum-side transforms of position columns
  std::vector<State> orthonormal;   // weighted-orthonormalized copy
  std::vector<cplx> gram;           // weighted Gram of the raw columns
  double gram_condition = 0.0;
  std::vector<std::size_t> position_indices;
};

struct EmptySubspace : Error {
  using Error::Error;
};
struct RankDeficientBasis : Error {
  explicit RankDeficientBasis(double cond)
      : Error("subspace basis is numerically rank deficient"), condition(cond) {}
  double condition;
};

// H_S: momentum-side span of position-space delta columns supported in S
// (a finite union of axis-aligned boxes on the dual grid).
SubspaceBasis build_subspace(const SpacePtr& space, std::span<const Box> region);

struct PrincipalAngleReport {
  std::vector<double> cosines;  // nonincreasing, in [0,1]
  double gram_condition_a = 0.0;
  double gram_condition_b = 0.0;
};

PrincipalAngleReport principal_angles(const SubspaceBasis& a, const SubspaceBasis& b);

// residual of projecting x onto the subspace, relative to r_norm(x)
double projection_residual(const SubspaceBasis& basis, const State& x);

// Leading singular values (descending) of conjugate_to_plain(K_f) -
// adjoint(conjugate_to_plain(K_{f*})), the compactness signature operator.
std::vector<double> compactness_probe(const SpacePtr& space, const std::vector<cplx>& kernel,
                                      std::size_t count);

}  // namespace kgop::spectral
