#pragma once
// Explicit constants of the spectral inequality:
//  - tau_d, the volume of the d-dimensional Euclidean unit ball;
//  - the theorem constant (kappa/6) * (24 d tau_d l_1...l_d /
//    (gamma eta rho^d))^{2 log2(kappa) + 4 log2(h) + 5}, evaluated in
//    log space because it overflows quickly;
//  - the corollary exponent templates, parameterized by a caller-supplied
//    universal constant K that the statements leave unspecified;
//  - the fractional lift lambda -> lambda^{1/s}.

#include <optional>

#include "lsverify/common.hpp"

namespace lsv {

// tau_d = pi^{d/2} / Gamma(d/2 + 1), via log-Gamma.
double unit_ball_volume(int d);

struct LSConstantInput {
  double kappa = 1.0;  // >= 1
  int d = 1;           // >= 1
  Vec l;               // d sides, each >= rho
  double gamma = 1.0;  // in (0, 1]
  double eta = 1.0;    // in (0, 1]
  double rho = 1.0;    // > 0
  double log_h = 0.0;  // >= 0 (h >= 1 always)
};

struct LSConstantResult {
  double log_base = 0.0;        // log(24 d tau_d l_1...l_d / (gamma eta rho^d))
  double exponent = 0.0;        // 2 log2(kappa) + 4 log_h / log 2 + 5
  double log_value = 0.0;       // log(kappa/6) + exponent * log_base
  std::optional<double> value;  // emitted iff log_value < 700
};

LSConstantResult theorem_constant(const LSConstantInput& input);

enum class CorollaryFamily { Pure, Divergence, Harmonic };

struct CorollaryExponent {
  double log_base = 0.0;  // d log K - log gamma
  double exponent = 0.0;
};

// Exponent templates: pure -> K d rho sqrt(lambda) + 2d + 6;
// divergence -> K d rho sqrt(lambda/sigma_min) + 2d + 6;
// harmonic -> K d rho sqrt(lambda) + K^2 d^2 rho^2 + 2d + 10.
// These are templates only: K is not derivable from the theory.
CorollaryExponent corollary_exponent(CorollaryFamily family, int d, double rho,
                                     double lambda, std::optional<double> sigma_min,
                                     double K, double gamma = 1.0);

// Effective spectral parameter of the fractional power: lambda^{1/s}, so
// that sqrt(lambda_eff) = lambda^{1/(2s)}.
double fractional_lift(double s, double lambda);

}  // namespace lsv
