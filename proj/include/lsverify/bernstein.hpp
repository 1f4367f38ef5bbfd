#pragma once
// Bernstein-type inequality machinery: the constants C_B(m, lambda) for the
// four supported operator families, the weighted series
//   h(lambda) = sum_m sqrt(C_B(m, lambda)) (10 ||l||_1)^m / m!,
// Bernstein sums of concrete spectral functions, and the good/bad
// classification of covering elements.
//
// The inequality being quantified is
//   sum_{|alpha|=m} (1/alpha!) ||d^alpha f||^2  <=  (C_B(m, lambda)/m!) ||f||^2
// for f in the spectral subspace below lambda.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsverify/common.hpp"
#include "lsverify/covering.hpp"
#include "lsverify/geometry.hpp"
#include "lsverify/spectral.hpp"

namespace lsv {

// Operator families and their Bernstein constants.
struct PureLaplacian {};  // C_B = lambda^m
struct FractionalLaplacian {
  double s = 1.0;  // C_B = lambda^{m/s}
};
struct DivergenceConstant {
  double sigma_min = 1.0;  // C_B = (lambda/sigma_min)^m
};
struct HarmonicOscillator {
  // C_B = (2 delta)^{2m} e^{e/delta^2} (m!)^2 e^{2 sqrt(lambda)/delta}.
  // An unset delta means "canonical": resolved to 1/(40 ||l||_1) wherever a
  // side-length vector l is available.
  std::optional<double> delta;
};

using BernsteinModel =
    std::variant<PureLaplacian, FractionalLaplacian, DivergenceConstant, HarmonicOscillator>;

struct CbValue {
  double log_value = 0.0;
  std::optional<double> value;  // emitted iff log_value < 700
};

// C_B(m, lambda) in log space.  lambda is clamped to max(lambda, 0) before
// use and C_B(0, .) is floored at 1.  A harmonic model must have delta
// resolved (see resolve_model).
CbValue c_b(const BernsteinModel& model, int m, double lambda);

// The canonical harmonic-oscillator window delta = 1/(40 ||l||_1).
double canonical_delta(const Vec& l);

// Replaces an unset harmonic delta by the canonical one for the given l.
BernsteinModel resolve_model(const BernsteinModel& model, const Vec& l);

// log h(lambda).  Closed forms: pure/fractional/divergence give
// 10 ||l||_1 sqrt(lambda_eff) with lambda_eff in {lambda, lambda^{1/s},
// lambda/sigma_min}; the harmonic model with canonical delta gives
// log 2 + 800 e ||l||_1^2 + 40 ||l||_1 sqrt(lambda).  A non-canonical
// harmonic delta is summed directly and must satisfy 20 delta ||l||_1 < 1
// (throws Divergent otherwise).
double log_h(const BernsteinModel& model, const Vec& l, double lambda);

// Direct log-space summation of the h series, stopping once a term falls
// below 1e-16 of the partial sum.  Same Divergent rule as log_h.
double log_h_series(const BernsteinModel& model, const Vec& l, double lambda);

struct BernsteinSumResult {
  double value = 0.0;  // the order-m derivative sum
  double abs_error = 0.0;
  bool converged = true;
  // (1/m!) sum_k mu_k^m |c_k|^2 with mu_k the plain-Laplacian eigenvalue;
  // emitted for full-domain rectangle sums as the functional-calculus
  // cross-check value.
  std::optional<double> spectral_value;
};

// sum_{|alpha|=m} (1/alpha!) ||d^alpha f||^2 over `region`; an empty region
// means the natural full domain (the basis box for rectangles — where the
// spectral cross-check value is also emitted — or all of R^d for Hermite
// functions, computed exactly in coefficient space by the derivative
// ladder).
BernsteinSumResult bernstein_sum(const SpectralFunction& f, int m,
                                 const std::optional<ConvexShape>& region,
                                 const QuadratureSpec& spec);

struct ElementClassification {
  int element_index = 0;
  std::vector<double> bernstein_sums;  // order m = 0..m_max; entry 0 is the local norm
  double norm_sq_local = 0.0;
  bool good = false;
  double worst_margin = 0.0;  // min over m >= 1 of RHS - LHS of the goodness test
};

struct ClassificationReport {
  std::vector<ElementClassification> elements;
  double norm_sq_domain = 0.0;
  double good_mass_fraction = 0.0;  // sum over good elements of local norm, / domain norm
};

// Element j is good iff for every 1 <= m <= m_max
//   sum_{|alpha|=m} (1/alpha!) ||d^alpha f||^2_{Q_j}
//     <= 2^{m+1} kappa (C_B(m, lambda)/m!) ||f||^2_{Q_j}.
// Elements with local norm below 1e-14 are classified bad by convention
// (the test is vacuous at zero mass) with worst_margin = -infinity.
ClassificationReport classify_elements(const SpectralFunction& f, const Covering& cov,
                                       const BernsteinModel& model, double lambda,
                                       int m_max, const QuadratureSpec& spec);

struct GoodPointResult {
  Vec x;
  std::vector<double> margins;  // RHS - LHS per order m = 1..m_max, all >= 0
};

// First point of a deterministic refining grid over the element satisfying
//   sum_{|alpha|=m} (1/alpha!) |d^alpha f(x0)|^2
//     <= 4^{m+1} kappa (C_B(m, lambda)/m!) ||f||^2_{Q_j} / |Q_j|
// for every 1 <= m <= m_max.  Throws NotFound (with the best margin seen)
// after the deepest grid level, and ZeroMass for elements carrying no mass.
GoodPointResult good_point(const SpectralFunction& f, const CoveringElement& element,
                           const BernsteinModel& model, double lambda, double kappa,
                           int m_max, const QuadratureSpec& spec);

// JSON form: {"type": "pure-laplacian" | "fractional-laplacian" |
// "divergence-constant" | "harmonic-oscillator", ...parameters}.
Json model_to_json(const BernsteinModel& model);
BernsteinModel model_from_json(const Json& j, const std::string& path);

}  // namespace lsv
