#include "lsverify/constants.hpp"

#include <cmath>

namespace lsv {

double unit_ball_volume(int d) {
  if (d < 1) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  return std::exp(0.5 * d * std::log(kPi) - std::lgamma(0.5 * d + 1.0));
}

LSConstantResult theorem_constant(const LSConstantInput& input) {
  if (!(input.kappa >= 1.0)) throw Error(Errc::InvalidArgument, "kappa must be >= 1");
  if (input.d < 1) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  if (static_cast<int>(input.l.size()) != input.d) {
    throw Error(Errc::InvalidArgument, "side-length vector must have d entries");
  }
  if (!(input.rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be positive");
  for (double lj : input.l) {
    if (!(lj >= input.rho * (1.0 - 1e-12))) {
      throw Error(Errc::InvalidArgument, "each side length must be >= rho");
    }
  }
  if (!(input.gamma > 0.0 && input.gamma <= 1.0)) {
    throw Error(Errc::InvalidArgument, "gamma must lie in (0, 1]");
  }
  if (!(input.eta > 0.0 && input.eta <= 1.0)) {
    throw Error(Errc::InvalidArgument, "eta must lie in (0, 1]");
  }
  if (!(input.log_h >= 0.0)) {
    throw Error(Errc::InvalidArgument, "log h must be >= 0 (h >= 1 always)");
  }

  LSConstantResult out;
  double log_l_product = 0.0;
  for (double lj : input.l) log_l_product += std::log(lj);
  out.log_base = std::log(24.0 * input.d * unit_ball_volume(input.d)) + log_l_product -
                 std::log(input.gamma) - std::log(input.eta) - input.d * std::log(input.rho);
  const double log2 = std::log(2.0);
  out.exponent = 2.0 * std::log(input.kappa) / log2 + 4.0 * input.log_h / log2 + 5.0;
  out.log_value = std::log(input.kappa / 6.0) + out.exponent * out.log_base;
  if (out.log_value < 700.0) out.value = std::exp(out.log_value);
  return out;
}

CorollaryExponent corollary_exponent(CorollaryFamily family, int d, double rho,
                                     double lambda, std::optional<double> sigma_min,
                                     double K, double gamma) {
  if (d < 1) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be positive");
  if (!(K > 0.0)) throw Error(Errc::InvalidArgument, "K must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(Errc::InvalidArgument, "gamma must lie in (0, 1]");
  }
  const double lc = std::max(lambda, 0.0);
  CorollaryExponent out;
  out.log_base = d * std::log(K) - std::log(gamma);
  switch (family) {
    case CorollaryFamily::Pure:
      out.exponent = K * d * rho * std::sqrt(lc) + 2.0 * d + 6.0;
      break;
    case CorollaryFamily::Divergence: {
      if (!sigma_min || !(*sigma_min > 0.0)) {
        throw Error(Errc::InvalidArgument, "divergence family needs a positive sigma_min");
      }
      out.exponent = K * d * rho * std::sqrt(lc / *sigma_min) + 2.0 * d + 6.0;
      break;
    }
    case CorollaryFamily::Harmonic:
      out.exponent = K * d * rho * std::sqrt(lc) + K * K * d * d * rho * rho + 2.0 * d + 10.0;
      break;
  }
  return out;
}

double fractional_lift(double s, double lambda) {
  if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "fractional order must be positive");
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be nonnegative");
  return std::pow(lambda, 1.0 / s);
}

}  // namespace lsv
