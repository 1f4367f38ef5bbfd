#pragma once

// End-to-end numerical verifications built on the lower layers:
//  - a Remez-type growth check for complex polynomials on subsets of [0,1];
//  - the local estimate comparing the mass of a spectral function on
//    (element intersect omega) against an explicit power of the density;
//  - the full spectral-inequality experiment on bounded rectangles, with a
//    CSV writer for its per-trial rows;
//  - the band-limited optimality example showing the observed norm on a
//    periodic observation set shrinks polynomially with its density.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsverify/bernstein.hpp"
#include "lsverify/common.hpp"
#include "lsverify/constants.hpp"
#include "lsverify/covering.hpp"
#include "lsverify/geometry.hpp"
#include "lsverify/spectral.hpp"

namespace lsv {

// ---------------------------------------------------------------------------
// Remez-type growth check
// ---------------------------------------------------------------------------

struct RemezResult {
  double lhs = 0.0;        // sup over [0,1] of |phi|
  double rhs = 0.0;        // (12/|E|)^{2 log M / log 2} * sup over E of |phi|
  double rhs_log = 0.0;    // log of rhs (rhs itself can overflow)
  double m_phi = 0.0;      // sup over the closed disc |z| <= 4 of |phi|
  double measure_e = 0.0;  // Lebesgue measure of the union E
  bool holds = false;      // lhs <= rhs up to a 1e-9 log-space tolerance
};

// Checks sup_{[0,1]} |phi| <= (12/|E|)^{2 log M_phi / log 2} * sup_E |phi| for
// a polynomial phi(t) = sum c_k t^k of degree <= 64 with |phi(0)| >= 1
// (PreconditionViolated otherwise) and E a finite union of subintervals of
// [0,1] of positive measure.  Suprema are evaluated on grids of about `grid`
// points with one refinement stage around each maximizer; M_phi is taken on
// the circle |z| = 4 (maximum modulus) and floored at |phi(0)|.  All grid
// suprema are under-approximations, which can only lower rhs, so `holds`
// is conservative.
RemezResult remez_check(const std::vector<Cplx>& coeffs,
                        const std::vector<std::array<double, 2>>& set_e, int grid);

// ---------------------------------------------------------------------------
// Local estimate on a covering element
// ---------------------------------------------------------------------------

struct LocalEstimateRecord {
  int element_index = 0;
  double lhs = 0.0;      // ||f||^2 over (element intersect omega)
  double rhs = 0.0;      // 12 * B^{4 log M / log 2 + 1} * ||f||^2 over element
  double rhs_log = 0.0;  // log of rhs (often far below the smallest double)
  double m_value = 1.0;  // M = max(1, sqrt(|Q|)/||f||_Q * sup_{Q + D_{4l}} |F|)
  double nu = 0.0;       // |psi(Q intersect omega)| / diam(psi(Q))^d
  bool holds = false;    // lhs >= rhs * (1 - 1e-6), decided in log space
};

// Verifies the local estimate on one covering element Q: with
// B = |psi(Q intersect omega)| / (24 d tau_d diam(psi(Q))^d) and M the sup of
// the analytic extension of f over Q + D_{4l} (distinguished boundary
// |z_j - x_j| = 4 l_j, x in closed Q) normalized by sqrt(|Q|)/||f||_{L2(Q)},
// checks  ||f||^2_{Q cap omega} >= 12 B^{4 log M / log 2 + 1} ||f||^2_Q.
// The sup defining M is grid-evaluated with one refinement stage; an
// under-approximation of M only raises the right-hand side, so `holds` is
// conservative.  Throws ZeroMass when ||f||^2_Q < 1e-14.
LocalEstimateRecord local_estimate_check(const SpectralFunction& f,
                                         const CoveringElement& element,
                                         int element_index, const ThickSet& omega,
                                         const Vec& l, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Spectral-inequality experiment
// ---------------------------------------------------------------------------

struct LsExperimentInput {
  Domain domain;  // bounded rectangle (possibly a product of rectangles)
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  BernsteinModel model = PureLaplacian{};
  double lambda = 0.0;
  ThickSet omega;
  double rho = 1.0;  // covering / thickness scale
  int trials = 1;
  std::uint64_t seed = 0;
  int m_max = 8;  // derivative orders used for the goodness classification
  QuadratureSpec spec;
};

struct TrialRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double norm_full = 0.0;   // ||f||^2 over the domain (1 by normalization)
  double norm_omega = 0.0;  // ||f||^2 over (domain intersect omega)
  double ratio_log = 0.0;   // log(norm_full / norm_omega)
  double const_log = 0.0;   // log of the theorem constant
  double slack_log = 0.0;   // const_log - ratio_log (>= 0 when the bound holds)
  double good_mass = 0.0;   // mass fraction carried by good covering elements
};

struct ExperimentReport {
  int d = 0;
  int mode_count = 0;      // dimension of the sampled spectral subspace
  double gamma = 0.0;      // measured thickness of omega at scale rho
  double rho = 0.0;
  double kappa = 0.0;      // covering overlap bound
  Vec l;                   // covering element sides
  double eta = 0.0;        // covering eccentricity parameter
  double log_h = 0.0;      // log of the Bernstein series sum h(lambda)
  double const_log = 0.0;  // log of the spectral-inequality constant
  std::vector<TrialRow> rows;
  double min_slack_log = 0.0;
  int pass_count = 0;  // trials with slack_log > 0
  bool pass = false;   // every trial has slack_log > 0
};

// Samples `trials` random normalized elements of the spectral subspace below
// lambda on the rectangular domain (per-trial seed = seed + trial), measures
// their mass on omega, and compares the observed ratio against the explicit
// constant assembled from the measured thickness gamma, the reference
// covering at scale rho, and the Bernstein model.  Throws NotThick when
// omega has zero density at scale rho, NoCubeFits when no rho-cube fits the
// domain, EmptySpectrum when the subspace is trivial, and InvalidArgument
// for non-rectangular domains or models without a confined spectrum.
ExperimentReport ls_empirical(const LsExperimentInput& input);

// CSV form of the per-trial rows: header
//   trial,seed,lambda,norm_full,norm_omega,ratio_log,const_log,slack_log,good_mass
// then one line per trial in trial order, doubles with 17 significant digits
// and '.' as the decimal separator, '\n' line endings.
std::string experiment_csv(const ExperimentReport& report);

// ---------------------------------------------------------------------------
// Band-limited optimality example
// ---------------------------------------------------------------------------

struct OptimalityResult {
  int alpha = 2;
  double gamma = 0.0;
  double norm_sq_omega = 0.0;  // ||g||^2 over the 1-periodic window pattern
  double norm_sq_full = 0.0;   // ||g||^2 over R (truncated at |t| <= 200)
  double bound = 0.0;          // 2 pi^2 (3 pi gamma)^{2 alpha - 2}
  bool bound_holds = false;    // norm_sq_omega <= bound
  bool norm_at_least_one = false;            // norm_sq_full >= 1
  std::optional<double> fourier_leak;        // out-of-band energy fraction
  bool fourier_ok = false;                   // leak < 1e-6 (when computed)
};

// Evaluates g(t) = (sin(2 pi t) / t)^alpha, whose Fourier transform is
// supported in [-2 pi alpha, 2 pi alpha], against the observation set
// omega_1 = union over integers k of (k + (1-gamma)/2, k + (1+gamma)/2):
// a gamma-dense 1-periodic pattern.  Checks the polynomial smallness bound
// ||g||^2_{omega_1} <= 2 pi^2 (3 pi gamma)^{2 alpha - 2}, that the full-line
// norm stays >= 1, and (optionally) that the discrete Fourier energy of g
// outside the band is below 1e-6 of the total.  Requires integer alpha >= 2
// and gamma in (0,1).  Integrals are truncated at |t| <= 200, where the tail
// of g^2 is below 2 * 200^{1-2 alpha} / (2 alpha - 1).
OptimalityResult optimality_example(int alpha, double gamma, const QuadratureSpec& spec,
                                    bool check_fourier = true);

// Least-squares slope of log ||g||^2_{omega_1} against log gamma over the
// given densities (at least two), with the same truncation as above.
double optimality_slope(int alpha, const std::vector<double>& gammas,
                        const QuadratureSpec& spec);

}  // namespace lsv
