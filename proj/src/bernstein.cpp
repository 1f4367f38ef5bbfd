#include "lsverify/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lsv {

namespace {

constexpr double kZeroMassFloor = 1e-14;
constexpr double kLinearCap = 700.0;  // log threshold for emitting linear values

double l1_norm(const Vec& l) {
  double sum = 0.0;
  for (double v : l) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(Errc::InvalidArgument, "side lengths must be positive");
    }
    sum += v;
  }
  if (sum <= 0.0) throw Error(Errc::InvalidArgument, "empty side-length vector");
  return sum;
}

double harmonic_delta_of(const BernsteinModel& model) {
  const auto& ho = std::get<HarmonicOscillator>(model);
  if (!ho.delta) {
    throw Error(Errc::InvalidArgument,
                "harmonic-oscillator delta unresolved; resolve against l first");
  }
  if (!(*ho.delta > 0.0) || !std::isfinite(*ho.delta)) {
    throw Error(Errc::InvalidArgument, "harmonic-oscillator delta must be positive");
  }
  return *ho.delta;
}

std::optional<double> linear_if_small(double log_value) {
  if (log_value < kLinearCap) return std::exp(log_value);
  return std::nullopt;
}

// log of the rescaled spectral parameter entering the closed forms:
// lambda_eff = lambda, lambda^{1/s}, or lambda/sigma_min.
double effective_lambda(const BernsteinModel& model, double lambda) {
  const double lc = std::max(lambda, 0.0);
  if (std::holds_alternative<PureLaplacian>(model)) return lc;
  if (const auto* fl = std::get_if<FractionalLaplacian>(&model)) {
    if (!(fl->s > 0.0)) throw Error(Errc::InvalidArgument, "fractional order must be positive");
    return std::pow(lc, 1.0 / fl->s);
  }
  if (const auto* dc = std::get_if<DivergenceConstant>(&model)) {
    if (!(dc->sigma_min > 0.0)) {
      throw Error(Errc::InvalidArgument, "sigma_min must be positive");
    }
    return lc / dc->sigma_min;
  }
  throw Error(Errc::InvalidArgument, "effective lambda undefined for this model");
}

}  // namespace

CbValue c_b(const BernsteinModel& model, int m, double lambda) {
  if (m < 0) throw Error(Errc::InvalidArgument, "derivative order must be nonnegative");
  const double lc = std::max(lambda, 0.0);
  double log_value;
  if (std::holds_alternative<HarmonicOscillator>(model)) {
    const double delta = harmonic_delta_of(model);
    log_value = 2.0 * m * std::log(2.0 * delta) + std::exp(1.0) / (delta * delta) +
                2.0 * std::lgamma(m + 1.0) + 2.0 * std::sqrt(lc) / delta;
  } else {
    const double leff = effective_lambda(model, lambda);
    // leff^m, with the convention leff^0 = 1 even at leff = 0.
    log_value = m == 0 ? 0.0 : m * std::log(leff);
  }
  if (m == 0) log_value = std::max(log_value, 0.0);  // C_B(0) >= 1
  CbValue out;
  out.log_value = log_value;
  out.value = linear_if_small(log_value);
  return out;
}

double canonical_delta(const Vec& l) { return 1.0 / (40.0 * l1_norm(l)); }

BernsteinModel resolve_model(const BernsteinModel& model, const Vec& l) {
  if (const auto* ho = std::get_if<HarmonicOscillator>(&model)) {
    if (!ho->delta) {
      HarmonicOscillator resolved;
      resolved.delta = canonical_delta(l);
      return resolved;
    }
  }
  return model;
}

double log_h(const BernsteinModel& model, const Vec& l, double lambda) {
  const double l1 = l1_norm(l);
  const double lc = std::max(lambda, 0.0);
  if (const auto* ho = std::get_if<HarmonicOscillator>(&model)) {
    const double dcan = canonical_delta(l);
    const double delta = ho->delta ? *ho->delta : dcan;
    if (std::fabs(delta - dcan) <= 1e-12 * dcan) {
      // log 2 + 800 e ||l||_1^2 + 40 ||l||_1 sqrt(lambda)
      return std::log(2.0) + 800.0 * std::exp(1.0) * l1 * l1 + 40.0 * l1 * std::sqrt(lc);
    }
    return log_h_series(model, l, lambda);
  }
  return 10.0 * l1 * std::sqrt(effective_lambda(model, lambda));
}

double log_h_series(const BernsteinModel& model, const Vec& l, double lambda) {
  const double l1 = l1_norm(l);
  const BernsteinModel resolved = resolve_model(model, l);
  if (const auto* ho = std::get_if<HarmonicOscillator>(&resolved)) {
    const double ratio = 20.0 * *ho->delta * l1;
    if (ratio >= 1.0) {
      throw Error(Errc::Divergent, "h series diverges: 20 delta ||l||_1 >= 1");
    }
  }
  const double log10l = std::log(10.0 * l1);
  LogSum sum;
  double prev_partial = -kInf;
  for (int m = 0; m <= 100000; ++m) {
    const double log_term =
        0.5 * c_b(resolved, m, lambda).log_value + m * log10l - std::lgamma(m + 1.0);
    sum.add(log_term);
    const double partial = sum.log();
    // Terms added until they stop moving the partial sum at 1e-16 relative.
    if (m >= 4 && log_term < partial + std::log(1e-16) &&
        partial - prev_partial < 1e-16) {
      return partial;
    }
    prev_partial = partial;
  }
  throw Error(Errc::ToleranceNotReached, "h series did not settle within the term budget");
}

namespace {

// Exact full-space Bernstein sum for Hermite expansions: the derivative
// ladder phi_k' = sqrt(k/2) phi_{k-1} - sqrt((k+1)/2) phi_{k+1} maps
// coefficient vectors to coefficient vectors, and Parseval turns the
// resulting expansion into the exact squared norm.
using HermiteCoeffs = std::map<std::vector<int>, Cplx>;

HermiteCoeffs hermite_axis_derivative(const HermiteCoeffs& in, int axis) {
  HermiteCoeffs out;
  for (const auto& [beta, c] : in) {
    const int b = beta[static_cast<std::size_t>(axis)];
    if (b >= 1) {
      std::vector<int> down = beta;
      --down[static_cast<std::size_t>(axis)];
      out[down] += std::sqrt(b / 2.0) * c;
    }
    std::vector<int> up = beta;
    ++up[static_cast<std::size_t>(axis)];
    out[up] -= std::sqrt((b + 1) / 2.0) * c;
  }
  return out;
}

double hermite_full_bernstein_sum(const SpectralFunction& f, int m) {
  const int d = basis_dim(f.basis);
  MultiIndexSet set = multi_index_set(d, m);
  Kahan total;
  for (std::size_t i = set.order_begin[static_cast<std::size_t>(m)];
       i < set.order_begin[static_cast<std::size_t>(m) + 1]; ++i) {
    HermiteCoeffs coeffs;
    for (const auto& term : f.terms) coeffs[term.mode.index] += term.coeff;
    for (int axis = 0; axis < d; ++axis) {
      for (int rep = 0; rep < set.indices[i][static_cast<std::size_t>(axis)]; ++rep) {
        coeffs = hermite_axis_derivative(coeffs, axis);
      }
    }
    double norm2 = 0.0;
    for (const auto& [beta, c] : coeffs) norm2 += std::norm(c);
    total.add(set.inv_factorial[i] * norm2);
  }
  return total.value();
}

double plain_rectangle_eigenvalue(const RectangleTrig& rt, const std::vector<int>& index) {
  double sum = 0.0;
  for (int j = 0; j < rt.box.dim(); ++j) {
    const double w = kPi * index[static_cast<std::size_t>(j)] /
                     rt.box.sides[static_cast<std::size_t>(j)];
    sum += w * w;
  }
  return sum;
}

}  // namespace

BernsteinSumResult bernstein_sum(const SpectralFunction& f, int m,
                                 const std::optional<ConvexShape>& region,
                                 const QuadratureSpec& spec) {
  if (m < 0) throw Error(Errc::InvalidArgument, "derivative order must be nonnegative");
  BernsteinSumResult out;
  const auto* rt = std::get_if<RectangleTrig>(&f.basis);

  if (!region && rt == nullptr) {
    out.value = hermite_full_bernstein_sum(f, m);
    return out;
  }

  ConvexShape shape = region ? *region : ConvexShape(rt->box);
  const int d = basis_dim(f.basis);
  MultiIndexSet set = multi_index_set(d, m);
  const std::size_t lo = set.order_begin[static_cast<std::size_t>(m)];
  const std::size_t hi = set.order_begin[static_cast<std::size_t>(m) + 1];
  std::vector<Cplx> derivs;
  IntegralResult r = integrate_on(
      shape, nullptr,
      [&](const Vec& x) -> Cplx {
        evaluate_all_derivatives(f, x, set, derivs);
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += set.inv_factorial[i] * std::norm(derivs[i]);
        return Cplx(sum, 0.0);
      },
      spec);
  out.value = r.value.real();
  out.abs_error = r.abs_error;
  out.converged = r.converged;

  if (!region && rt != nullptr) {
    // Functional-calculus cross-check on the full rectangle:
    // (1/m!) sum_k mu_k^m |c_k|^2 with the plain-Laplacian eigenvalue mu_k.
    Kahan spectral;
    for (const auto& term : f.terms) {
      spectral.add(std::pow(plain_rectangle_eigenvalue(*rt, term.mode.index), m) *
                   std::norm(term.coeff));
    }
    double invfact = 1.0;
    for (int i = 2; i <= m; ++i) invfact /= i;
    out.spectral_value = spectral.value() * invfact;
  }
  return out;
}

ClassificationReport classify_elements(const SpectralFunction& f, const Covering& cov,
                                       const BernsteinModel& model, double lambda,
                                       int m_max, const QuadratureSpec& spec) {
  if (m_max < 1) throw Error(Errc::InvalidArgument, "m_max must be >= 1");
  const int d = basis_dim(f.basis);
  const BernsteinModel resolved = resolve_model(model, cov.l);
  MultiIndexSet set = multi_index_set(d, m_max);

  // log of 2^{m+1} kappa C_B(m, lambda) / m!
  std::vector<double> log_bound(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (int m = 1; m <= m_max; ++m) {
    log_bound[static_cast<std::size_t>(m)] = (m + 1) * std::log(2.0) + std::log(cov.kappa) +
                                             c_b(resolved, m, lambda).log_value -
                                             std::lgamma(m + 1.0);
  }

  ClassificationReport report;
  report.norm_sq_domain = norm_sq(f);
  report.elements.reserve(cov.elements.size());
  Kahan good_mass;

  std::vector<Cplx> derivs;
  for (std::size_t j = 0; j < cov.elements.size(); ++j) {
    const CoveringElement& el = cov.elements[j];
    VecIntegralResult sums = integrate_on_vec(
        el.shape, nullptr, m_max + 1,
        [&](const Vec& x, double* out) {
          evaluate_all_derivatives(f, x, set, derivs);
          for (int m = 0; m <= m_max; ++m) {
            double sum = 0.0;
            for (std::size_t i = set.order_begin[static_cast<std::size_t>(m)];
                 i < set.order_begin[static_cast<std::size_t>(m) + 1]; ++i) {
              sum += set.inv_factorial[i] * std::norm(derivs[i]);
            }
            out[m] = sum;
          }
        },
        spec);

    ElementClassification ec;
    ec.element_index = static_cast<int>(j);
    ec.bernstein_sums.assign(sums.value.begin(), sums.value.end());
    ec.norm_sq_local = sums.value[0];

    if (ec.norm_sq_local < kZeroMassFloor) {
      ec.good = false;
      ec.worst_margin = -kInf;
    } else {
      ec.good = true;
      ec.worst_margin = kInf;
      const double log_norm = std::log(ec.norm_sq_local);
      for (int m = 1; m <= m_max; ++m) {
        const double log_rhs = log_bound[static_cast<std::size_t>(m)] + log_norm;
        const double rhs = log_rhs < kLinearCap ? std::exp(log_rhs) : kInf;
        const double lhs = sums.value[static_cast<std::size_t>(m)];
        const double margin = rhs - lhs;
        ec.worst_margin = std::min(ec.worst_margin, margin);
        if (lhs > rhs * (1.0 + 1e-9)) ec.good = false;
      }
    }
    if (ec.good) good_mass.add(ec.norm_sq_local);
    report.elements.push_back(std::move(ec));
  }

  report.good_mass_fraction =
      report.norm_sq_domain > 0.0 ? good_mass.value() / report.norm_sq_domain : 0.0;
  return report;
}

GoodPointResult good_point(const SpectralFunction& f, const CoveringElement& element,
                           const BernsteinModel& model, double lambda, double kappa,
                           int m_max, const QuadratureSpec& spec) {
  if (m_max < 1) throw Error(Errc::InvalidArgument, "m_max must be >= 1");
  if (!(kappa > 0.0)) throw Error(Errc::InvalidArgument, "kappa must be positive");
  const int d = basis_dim(f.basis);

  IntegralResult nr = integrate_on(
      element.shape, nullptr,
      [&](const Vec& x) -> Cplx { return Cplx(std::norm(evaluate(f, x)), 0.0); }, spec);
  const double norm_local = nr.value.real();
  if (norm_local < kZeroMassFloor) {
    throw Error(Errc::ZeroMass, "element carries no mass; no good point is defined");
  }
  const double volume = shape_volume(element.shape);

  // rhs_m = 4^{m+1} kappa (C_B(m, lambda)/m!) ||f||^2_Q / |Q|
  std::vector<double> rhs(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (int m = 1; m <= m_max; ++m) {
    const double log_rhs = (m + 1) * std::log(4.0) + std::log(kappa) +
                           c_b(model, m, lambda).log_value - std::lgamma(m + 1.0) +
                           std::log(norm_local) - std::log(volume);
    rhs[static_cast<std::size_t>(m)] = log_rhs < kLinearCap ? std::exp(log_rhs) : kInf;
  }

  MultiIndexSet set = multi_index_set(d, m_max);
  std::vector<Cplx> derivs;
  const Box bbox = shape_bbox(element.shape);
  const int max_level = std::max(3, 18 / d);

  double best_worst = -kInf;
  for (int level = 0; level <= max_level; ++level) {
    const long n = 1L << level;  // n^d cell centers, lexicographic order
    std::vector<long> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      Vec x(static_cast<std::size_t>(d));
      for (int jj = 0; jj < d; ++jj) {
        x[static_cast<std::size_t>(jj)] =
            bbox.lo(jj) + (idx[static_cast<std::size_t>(jj)] + 0.5) *
                              bbox.sides[static_cast<std::size_t>(jj)] / n;
      }
      if (shape_contains(element.shape, x, /*closed=*/false)) {
        evaluate_all_derivatives(f, x, set, derivs);
        double worst = kInf;
        bool ok = true;
        GoodPointResult result;
        result.margins.assign(static_cast<std::size_t>(m_max), 0.0);
        for (int m = 1; m <= m_max; ++m) {
          double lhs = 0.0;
          for (std::size_t i = set.order_begin[static_cast<std::size_t>(m)];
               i < set.order_begin[static_cast<std::size_t>(m) + 1]; ++i) {
            lhs += set.inv_factorial[i] * std::norm(derivs[i]);
          }
          const double margin = rhs[static_cast<std::size_t>(m)] - lhs;
          result.margins[static_cast<std::size_t>(m) - 1] = margin;
          worst = std::min(worst, margin);
          if (margin < 0.0) ok = false;
        }
        best_worst = std::max(best_worst, worst);
        if (ok) {
          result.x = std::move(x);
          return result;
        }
      }
      int jj = d - 1;
      while (jj >= 0) {
        if (++idx[static_cast<std::size_t>(jj)] < n) break;
        idx[static_cast<std::size_t>(jj)] = 0;
        --jj;
      }
      if (jj < 0) break;
    }
  }
  throw Error(Errc::NotFound, "no grid point satisfied the pointwise bounds (best margin " +
                                  format_g17(best_worst) + ")");
}

Json model_to_json(const BernsteinModel& model) {
  Json j;
  if (std::holds_alternative<PureLaplacian>(model)) {
    j["type"] = "pure-laplacian";
  } else if (const auto* fl = std::get_if<FractionalLaplacian>(&model)) {
    j["type"] = "fractional-laplacian";
    j["s"] = fl->s;
  } else if (const auto* dc = std::get_if<DivergenceConstant>(&model)) {
    j["type"] = "divergence-constant";
    j["sigma_min"] = dc->sigma_min;
  } else {
    const auto& ho = std::get<HarmonicOscillator>(model);
    j["type"] = "harmonic-oscillator";
    if (ho.delta) j["delta"] = *ho.delta;
  }
  return j;
}

BernsteinModel model_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw Error(Errc::SchemaError, path + ": expected an object");
  const std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "pure-laplacian") {
    reject_unknown_keys(j, {"type"}, path);
    return PureLaplacian{};
  }
  if (type == "fractional-laplacian") {
    reject_unknown_keys(j, {"type", "s"}, path);
    FractionalLaplacian fl;
    fl.s = number_field(require_field(j, "s", path), path + ".s");
    if (!(fl.s > 0.0)) throw Error(Errc::SchemaError, path + ".s: must be positive");
    return fl;
  }
  if (type == "divergence-constant") {
    reject_unknown_keys(j, {"type", "sigma_min"}, path);
    DivergenceConstant dc;
    dc.sigma_min = number_field(require_field(j, "sigma_min", path), path + ".sigma_min");
    if (!(dc.sigma_min > 0.0)) {
      throw Error(Errc::SchemaError, path + ".sigma_min: must be positive");
    }
    return dc;
  }
  if (type == "harmonic-oscillator") {
    reject_unknown_keys(j, {"type", "delta"}, path);
    HarmonicOscillator ho;
    if (j.contains("delta")) {
      ho.delta = number_field(j["delta"], path + ".delta");
      if (!(*ho.delta > 0.0)) throw Error(Errc::SchemaError, path + ".delta: must be positive");
    }
    return ho;
  }
  throw Error(Errc::SchemaError, path + ".type: unknown model type \"" + type + "\"");
}

}  // namespace lsv
