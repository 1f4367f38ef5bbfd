#pragma once
// Explicit orthonormal eigenbases and finite spectral-subspace functions:
// mode enumeration below an energy cutoff, random sampling, and exact
// real/complex/derivative evaluation.
//
// Two bases are supported.
//  - RectangleTrig: trigonometric eigenfunctions of the (optionally scaled)
//    Laplacian on a bounded box with Dirichlet or Neumann boundary
//    conditions.  Eigenvalues are sum_j sigma_j (pi k_j / L_j)^2 with
//    k_j >= 1 for Dirichlet and k_j >= 0 for Neumann.
//  - HermiteTensor: tensor Hermite functions, the eigenfunctions of the
//    harmonic oscillator -Laplacian + |x|^2 on R^d with eigenvalues
//    2|beta| + d.
//
// Both families consist of entire functions, so evaluation extends to
// complex arguments; derivatives are computed exactly (phase-shift rule for
// trig modes, the ladder identity phi_k' = sqrt(k/2) phi_{k-1}
// - sqrt((k+1)/2) phi_{k+1} for Hermite modes).

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lsverify/common.hpp"
#include "lsverify/geometry.hpp"

namespace lsv {

enum class BoundaryCondition { Dirichlet, Neumann };

// One eigenmode: an integer index per axis (frequency k for rectangles,
// Hermite degree beta) plus its eigenvalue.
struct Mode {
  std::vector<int> index;
  double eigenvalue = 0.0;
};

// Trigonometric eigenbasis on a bounded box.  `scale` holds the diagonal
// coefficients sigma_j of the operator -div(A grad .), A = diag(sigma);
// empty means the plain Laplacian (all sigma_j = 1).
struct RectangleTrig {
  Box box;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  Vec scale;  // empty = identity
};

// Tensor Hermite basis on R^d.
struct HermiteTensor {
  int dim = 1;
};

using SpectralBasis = std::variant<RectangleTrig, HermiteTensor>;

struct SpectralTerm {
  Mode mode;
  Cplx coeff;
};

// Finite expansion in one of the bases; every term's eigenvalue is at most
// lambda_cap, and the full-domain norm is sum |c|^2 by orthonormality.
struct SpectralFunction {
  SpectralBasis basis;
  std::vector<SpectralTerm> terms;
  double lambda_cap = 0.0;
};

enum class CoefficientLaw { ComplexNormal };

int basis_dim(const SpectralBasis& basis);

// All modes with eigenvalue <= lambda (up to a 1e-12 relative tolerance so
// that exact-boundary examples are kept), sorted by eigenvalue and then
// lexicographically by index.  Throws EmptySpectrum when no mode qualifies
// and InvalidArgument for unbounded or degenerate rectangles.
std::vector<Mode> enumerate_modes(const SpectralBasis& basis, double lambda);

// Random element of the spectral subspace below lambda: i.i.d. coefficients
// drawn from `law` (complex standard normal), then normalized so that
// sum |c|^2 = 1.  Deterministic in `seed`.
SpectralFunction random_function(const SpectralBasis& basis, double lambda,
                                 std::uint64_t seed,
                                 CoefficientLaw law = CoefficientLaw::ComplexNormal);

// Exact termwise evaluation of the analytic extension at a complex point.
// `alpha` selects a partial derivative; empty means the function itself.
Cplx evaluate(const SpectralFunction& f, const std::vector<Cplx>& z,
              const std::vector<int>& alpha = {});

// Convenience overload for real points.
Cplx evaluate(const SpectralFunction& f, const Vec& x,
              const std::vector<int>& alpha = {});

// Multi-indices alpha with |alpha| <= m_max, grouped by total order
// (group m occupies [order_begin[m], order_begin[m+1])) and ordered
// lexicographically within each group; inv_factorial[i] = 1/alpha_i!.
struct MultiIndexSet {
  int dim = 0;
  int m_max = 0;
  std::vector<std::vector<int>> indices;
  std::vector<std::size_t> order_begin;
  std::vector<double> inv_factorial;
};

MultiIndexSet multi_index_set(int dim, int m_max);

// All partial derivatives d^alpha f(x) for |alpha| <= set.m_max in one pass;
// out[i] corresponds to set.indices[i].  Per-axis derivative tables are
// shared across multi-indices, so one call costs one trig/Hermite ladder per
// term and axis instead of one per multi-index.
void evaluate_all_derivatives(const SpectralFunction& f, const Vec& x,
                              const MultiIndexSet& set, std::vector<Cplx>& out);

// Full-domain squared norm: exactly sum |c|^2 (orthonormal basis).
double norm_sq(const SpectralFunction& f);

// Squared L2 norm over a bounded region, optionally restricted to a
// measurable mask, via adaptive quadrature of |f|^2.
IntegralResult norm_sq_region(const SpectralFunction& f, const ConvexShape& region,
                              const ThickSet* mask, const QuadratureSpec& spec);

// JSON form: {"basis": {...}, "terms": [{"index": [...], "re": r, "im": i}],
// "lambda": lambda_cap}.
Json spectral_to_json(const SpectralFunction& f);
SpectralFunction spectral_from_json(const Json& j, const std::string& path);
Json basis_to_json(const SpectralBasis& basis);
SpectralBasis basis_from_json(const Json& j, const std::string& path);

}  // namespace lsv
