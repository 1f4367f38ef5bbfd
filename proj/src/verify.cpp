#include "lsverify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <variant>

namespace lsv {

namespace {

constexpr double kLog2 = 0.69314718055994530941723212145817657;
constexpr double kZeroMassFloor = 1e-14;

// ---------------------------------------------------------------------------
// Remez-type growth check
// ---------------------------------------------------------------------------

Cplx poly_eval(const std::vector<Cplx>& coeffs, Cplx z) {
  Cplx acc(0.0, 0.0);
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

struct GridMax {
  double arg = 0.0;
  double value = 0.0;
};

// Max of `fn` over [a, b] on n+1 uniform points (both endpoints included)
// plus one refinement stage of the same resolution around the maximizer.
GridMax grid_max(const std::function<double(double)>& fn, double a, double b, int n) {
  n = std::max(n, 2);
  GridMax best{a, fn(a)};
  auto scan = [&](double lo, double hi) {
    for (int i = 0; i <= n; ++i) {
      const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
      const double v = fn(t);
      if (v > best.value) best = {t, v};
    }
  };
  scan(a, b);
  const double h = (b - a) / static_cast<double>(n);
  scan(std::max(a, best.arg - h), std::min(b, best.arg + h));
  return best;
}

std::vector<std::array<double, 2>> merge_intervals(std::vector<std::array<double, 2>> iv) {
  std::sort(iv.begin(), iv.end(),
            [](const auto& x, const auto& y) { return x[0] < y[0]; });
  std::vector<std::array<double, 2>> merged;
  for (const auto& seg : iv) {
    if (!merged.empty() && seg[0] <= merged.back()[1]) {
      merged.back()[1] = std::max(merged.back()[1], seg[1]);
    } else {
      merged.push_back(seg);
    }
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Analytic sup over Q + D_{4l} for the local estimate
// ---------------------------------------------------------------------------

// Sup of |F(x + w)| over x in the closed element and |w_j| = 4 l_j.  By the
// maximum principle in each w_j this equals the sup over the whole closed
// polydisc.  Grid search (nx points per axis for x, ntheta angles per axis
// for w) with one refinement stage around the best point; the result is an
// under-approximation of the true sup.
double sup_on_polydisc(const SpectralFunction& f, const ConvexShape& shape,
                       const Vec& radii, int nx, int ntheta) {
  const int d = shape_dim(shape);
  const Box bbox = shape_bbox(shape);
  const double two_pi = 2.0 * kPi;

  struct Best {
    Vec x;
    Vec theta;
    double value = -1.0;
  } best;
  best.x.assign(static_cast<std::size_t>(d), 0.0);
  best.theta.assign(static_cast<std::size_t>(d), 0.0);

  std::vector<Cplx> z(static_cast<std::size_t>(d));
  Vec x(static_cast<std::size_t>(d)), theta(static_cast<std::size_t>(d));

  // Scans the product grid x_j in [xlo_j, xhi_j] (nx points, endpoints
  // included), theta_j in [tlo_j, thi_j) (ntheta points).
  auto scan = [&](const Vec& xlo, const Vec& xhi, const Vec& tlo, const Vec& thi,
                  bool half_open_theta) {
    const long npts_x = static_cast<long>(std::pow(static_cast<double>(nx), d) + 0.5);
    const long npts_t = static_cast<long>(std::pow(static_cast<double>(ntheta), d) + 0.5);
    for (long ix = 0; ix < npts_x; ++ix) {
      long rem = ix;
      for (int j = 0; j < d; ++j) {
        const int i = static_cast<int>(rem % nx);
        rem /= nx;
        const std::size_t ju = static_cast<std::size_t>(j);
        x[ju] = nx == 1 ? xlo[ju]
                        : xlo[ju] + (xhi[ju] - xlo[ju]) * static_cast<double>(i) /
                                        static_cast<double>(nx - 1);
      }
      if (!shape_contains(shape, x, /*closed=*/true)) continue;
      for (long it = 0; it < npts_t; ++it) {
        long trem = it;
        for (int j = 0; j < d; ++j) {
          const int i = static_cast<int>(trem % ntheta);
          trem /= ntheta;
          const std::size_t ju = static_cast<std::size_t>(j);
          const double denom =
              half_open_theta ? static_cast<double>(ntheta) : static_cast<double>(ntheta - 1);
          theta[ju] = tlo[ju] + (thi[ju] - tlo[ju]) * static_cast<double>(i) /
                                    std::max(denom, 1.0);
        }
        for (int j = 0; j < d; ++j) {
          const std::size_t ju = static_cast<std::size_t>(j);
          z[ju] = Cplx(x[ju] + radii[ju] * std::cos(theta[ju]),
                       radii[ju] * std::sin(theta[ju]));
        }
        const double v = std::abs(evaluate(f, z));
        if (v > best.value) best = {x, theta, v};
      }
    }
  };

  Vec xlo(bbox.corner), xhi(static_cast<std::size_t>(d));
  Vec tlo(static_cast<std::size_t>(d), 0.0), thi(static_cast<std::size_t>(d), two_pi);
  for (int j = 0; j < d; ++j) xhi[static_cast<std::size_t>(j)] = bbox.hi(j);
  scan(xlo, xhi, tlo, thi, /*half_open_theta=*/true);

  if (best.value < 0.0) return 0.0;  // no grid point inside the closed shape

  // Refinement: one grid spacing around the best point, clamped to the box.
  Vec rxlo(static_cast<std::size_t>(d)), rxhi(static_cast<std::size_t>(d));
  Vec rtlo(static_cast<std::size_t>(d)), rthi(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    const double hx = (xhi[ju] - xlo[ju]) / static_cast<double>(std::max(nx - 1, 1));
    rxlo[ju] = std::max(xlo[ju], best.x[ju] - hx);
    rxhi[ju] = std::min(xhi[ju], best.x[ju] + hx);
    const double ht = two_pi / static_cast<double>(ntheta);
    rtlo[ju] = best.theta[ju] - ht;
    rthi[ju] = best.theta[ju] + ht;
  }
  scan(rxlo, rxhi, rtlo, rthi, /*half_open_theta=*/false);
  return best.value;
}

// ---------------------------------------------------------------------------
// Experiment setup
// ---------------------------------------------------------------------------

Box rectangle_of(const Domain& domain) {
  Vec corner, sides;
  auto absorb = [&](const GeneralizedRectangle& gr) {
    for (const auto& iv : gr.intervals) {
      if (!iv.bounded())
        throw Error(Errc::UnboundedDomain,
                    "spectral sampling requires a bounded domain");
      corner.push_back(iv.lo);
      sides.push_back(iv.length());
    }
  };
  if (const auto* gr = std::get_if<GeneralizedRectangle>(&domain)) {
    absorb(*gr);
  } else if (const auto* prod = std::get_if<Product>(&domain)) {
    for (const auto& factor : prod->factors) {
      const auto* g = std::get_if<GeneralizedRectangle>(&factor);
      if (g == nullptr)
        throw Error(Errc::InvalidArgument,
                    "spectral sampling supports rectangular domains only");
      absorb(*g);
    }
  } else {
    throw Error(Errc::InvalidArgument,
                "spectral sampling supports rectangular domains only");
  }
  return Box{std::move(corner), std::move(sides)};
}

struct SamplingSetup {
  SpectralBasis basis;
  double cutoff = 0.0;  // eigenvalue threshold for the basis above
};

SamplingSetup sampling_setup(const BernsteinModel& model, const Box& box,
                             BoundaryCondition bc, double lambda) {
  if (std::holds_alternative<PureLaplacian>(model))
    return {RectangleTrig{box, bc, {}}, lambda};
  if (const auto* frac = std::get_if<FractionalLaplacian>(&model))
    return {RectangleTrig{box, bc, {}}, fractional_lift(frac->s, lambda)};
  if (const auto* dv = std::get_if<DivergenceConstant>(&model))
    return {RectangleTrig{box, bc,
                          Vec(static_cast<std::size_t>(box.dim()), dv->sigma_min)},
            lambda};
  throw Error(Errc::InvalidArgument,
              "the harmonic-oscillator model has no confined subspace on a "
              "bounded rectangle; use a rectangle-based model");
}

// ---------------------------------------------------------------------------
// Optimality example
// ---------------------------------------------------------------------------

// sin(2 pi t) / t, with the removable singularity filled by the power series
// 2 pi (1 - u^2/6 + u^4/120), u = 2 pi t, near t = 0.
double sinc_two_pi(double t) {
  const double u = 2.0 * kPi * t;
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 2.0 * kPi * (1.0 - u2 / 6.0 * (1.0 - u2 / 20.0));
  }
  return std::sin(u) / t;
}

double int_pow(double base, int exponent) {
  double acc = 1.0;
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

// Fraction of the discrete Fourier energy of g outside [-2 pi alpha,
// 2 pi alpha], sampled at t_n = -64 + n/64 (8192 samples).  The frequency of
// bin k is pi k / 64 for |k| <= 4096, so the band edge lies exactly at bin
// 128 alpha (kept in-band); real input makes negative bins mirror positive
// ones.
double fourier_band_leak(int alpha) {
  const int n_samples = 8192;
  const double step = 1.0 / 64.0;
  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i)
    samples[static_cast<std::size_t>(i)] =
        int_pow(sinc_two_pi(-64.0 + step * static_cast<double>(i)), alpha);

  const int k_edge = 128 * alpha;
  Kahan total, outside;
  for (int k = 0; k <= n_samples / 2; ++k) {
    const Cplx w = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) /
                                       static_cast<double>(n_samples));
    Cplx acc(0.0, 0.0), phase(1.0, 0.0);
    for (int i = 0; i < n_samples; ++i) {
      acc += samples[static_cast<std::size_t>(i)] * phase;
      phase *= w;
    }
    const double weight = (k == 0 || k == n_samples / 2) ? 1.0 : 2.0;
    const double energy = weight * std::norm(acc);
    total.add(energy);
    if (k > k_edge) outside.add(energy);
  }
  return outside.value() / total.value();
}

}  // namespace

// ---------------------------------------------------------------------------
// Remez-type growth check
// ---------------------------------------------------------------------------

RemezResult remez_check(const std::vector<Cplx>& coeffs,
                        const std::vector<std::array<double, 2>>& set_e, int grid) {
  if (coeffs.empty() || coeffs.size() > 65)
    throw Error(Errc::InvalidArgument, "polynomial degree must be between 0 and 64");
  if (grid < 8) throw Error(Errc::InvalidArgument, "grid must have at least 8 points");
  const double at_zero = std::abs(coeffs[0]);
  if (!(at_zero >= 1.0))
    throw Error(Errc::PreconditionViolated, "|phi(0)| >= 1 is required");
  if (set_e.empty()) throw Error(Errc::InvalidArgument, "E must be nonempty");
  for (const auto& seg : set_e) {
    if (!(seg[0] >= 0.0 && seg[1] <= 1.0 && seg[0] < seg[1]))
      throw Error(Errc::InvalidArgument,
                  "E must be a union of nondegenerate subintervals of [0,1]");
  }

  const auto merged = merge_intervals(set_e);
  double measure = 0.0;
  for (const auto& seg : merged) measure += seg[1] - seg[0];

  const auto abs_phi = [&](double t) { return std::abs(poly_eval(coeffs, Cplx(t, 0.0))); };

  RemezResult result;
  result.measure_e = measure;
  result.lhs = grid_max(abs_phi, 0.0, 1.0, grid).value;

  double sup_e = 0.0;
  for (const auto& seg : merged) {
    const int n = std::max(16, static_cast<int>(std::ceil((seg[1] - seg[0]) *
                                                          static_cast<double>(grid))));
    sup_e = std::max(sup_e, grid_max(abs_phi, seg[0], seg[1], n).value);
  }

  const auto abs_on_circle = [&](double theta) {
    return std::abs(poly_eval(coeffs, std::polar(4.0, theta)));
  };
  const int n_circle = std::max(grid, 64);
  // sup over |z| = 4 bounds |phi(0)| from below by the maximum principle.
  result.m_phi = std::max(grid_max(abs_on_circle, 0.0, 2.0 * kPi, n_circle).value, at_zero);

  result.rhs_log = (2.0 * std::log(result.m_phi) / kLog2) * std::log(12.0 / measure) +
                   std::log(sup_e);
  result.rhs = std::exp(result.rhs_log);
  result.holds = std::log(result.lhs) <= result.rhs_log + 1e-9;
  return result;
}

// ---------------------------------------------------------------------------
// Local estimate
// ---------------------------------------------------------------------------

LocalEstimateRecord local_estimate_check(const SpectralFunction& f,
                                         const CoveringElement& element,
                                         int element_index, const ThickSet& omega,
                                         const Vec& l, const QuadratureSpec& spec) {
  const ConvexShape& shape = element.shape;
  const int d = shape_dim(shape);
  if (static_cast<int>(l.size()) != d)
    throw Error(Errc::InvalidArgument, "l must have one side per axis");

  const double norm_q = norm_sq_region(f, shape, nullptr, spec).value.real();
  if (norm_q < kZeroMassFloor)
    throw Error(Errc::ZeroMass, "the function carries no mass on the element");

  LocalEstimateRecord rec;
  rec.element_index = element_index;
  rec.lhs = std::max(0.0, norm_sq_region(f, shape, &omega, spec).value.real());

  // |psi(Q cap omega)| = |det psi| * |Q cap omega|; the intersection measure
  // comes from the exact clipped-cell quadrature of the constant 1.
  const auto one = [](const Vec&) { return Cplx(1.0, 0.0); };
  const double inter_measure =
      std::max(0.0, integrate_on(shape, &omega, one, spec).value.real());
  const double psi_volume = std::abs(element.psi.det()) * inter_measure;
  const double psi_diam = psi_image_diam(shape, element.psi);
  rec.nu = psi_volume / int_pow(psi_diam, d);

  Vec radii(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    radii[static_cast<std::size_t>(j)] = 4.0 * l[static_cast<std::size_t>(j)];
  const int nx = d == 1 ? 17 : 5;
  const int ntheta = d == 1 ? 16 : 8;
  const double sup_f = sup_on_polydisc(f, shape, radii, nx, ntheta);
  rec.m_value = std::max(1.0, std::sqrt(shape_volume(shape) / norm_q) * sup_f);

  // B <= 1/(24 d) < 1, so the exponent never multiplies a positive log.
  const double log_b =
      std::log(rec.nu) - std::log(24.0 * d * unit_ball_volume(d));
  const double exponent = 4.0 * std::log(rec.m_value) / kLog2 + 1.0;
  rec.rhs_log = std::log(12.0) + exponent * log_b + std::log(norm_q);
  rec.rhs = std::exp(rec.rhs_log);

  if (rec.rhs_log == -kInf) {
    rec.holds = true;  // degenerate intersection: rhs = 0 <= lhs
  } else {
    rec.holds = std::log(rec.lhs) >= rec.rhs_log + std::log1p(-1e-6);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Spectral-inequality experiment
// ---------------------------------------------------------------------------

ExperimentReport ls_empirical(const LsExperimentInput& input) {
  if (input.trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
  if (!(input.rho > 0.0)) throw Error(Errc::InvalidArgument, "rho must be positive");
  if (input.m_max < 1) throw Error(Errc::InvalidArgument, "m_max must be >= 1");

  const Box box = rectangle_of(input.domain);
  const int d = box.dim();

  const ThicknessResult thickness =
      thickness_of(input.domain, input.omega, input.rho, input.spec);
  if (!thickness.thick)
    throw Error(Errc::NotThick,
                "the observation set has zero density at scale rho");

  const Covering cov = build_covering(input.domain, input.rho, std::nullopt);
  const BernsteinModel model = resolve_model(input.model, cov.l);
  const double log_h_value = log_h(model, cov.l, input.lambda);

  LSConstantInput cinput;
  cinput.kappa = cov.kappa;
  cinput.d = d;
  cinput.l = cov.l;
  cinput.gamma = thickness.gamma;
  cinput.eta = cov.eta;
  cinput.rho = cov.rho;
  cinput.log_h = log_h_value;
  const LSConstantResult constant = theorem_constant(cinput);

  const SamplingSetup setup = sampling_setup(model, box, input.bc, input.lambda);
  const int mode_count =
      static_cast<int>(enumerate_modes(setup.basis, setup.cutoff).size());

  const ConvexShape domain_shape = domain_to_shape(input.domain);

  ExperimentReport report;
  report.d = d;
  report.mode_count = mode_count;
  report.gamma = thickness.gamma;
  report.rho = cov.rho;
  report.kappa = cov.kappa;
  report.l = cov.l;
  report.eta = cov.eta;
  report.log_h = log_h_value;
  report.const_log = constant.log_value;
  report.min_slack_log = kInf;

  for (int trial = 0; trial < input.trials; ++trial) {
    const std::uint64_t trial_seed = input.seed + static_cast<std::uint64_t>(trial);
    const SpectralFunction f = random_function(setup.basis, setup.cutoff, trial_seed);

    TrialRow row;
    row.trial = trial;
    row.seed = trial_seed;
    row.lambda = input.lambda;
    row.norm_full = norm_sq(f);
    row.norm_omega =
        std::max(0.0, norm_sq_region(f, domain_shape, &input.omega, input.spec).value.real());
    row.ratio_log = std::log(row.norm_full) - std::log(row.norm_omega);
    row.const_log = constant.log_value;
    row.slack_log = row.const_log - row.ratio_log;
    row.good_mass = classify_elements(f, cov, model, input.lambda, input.m_max, input.spec)
                        .good_mass_fraction;

    report.min_slack_log = std::min(report.min_slack_log, row.slack_log);
    if (row.slack_log > 0.0) ++report.pass_count;
    report.rows.push_back(row);
  }
  report.pass = report.pass_count == input.trials;
  return report;
}

std::string experiment_csv(const ExperimentReport& report) {
  std::string out =
      "trial,seed,lambda,norm_full,norm_omega,ratio_log,const_log,slack_log,good_mass\n";
  for (const TrialRow& row : report.rows) {
    out += std::to_string(row.trial);
    out += ',';
    out += std::to_string(row.seed);
    for (const double v : {row.lambda, row.norm_full, row.norm_omega, row.ratio_log,
                           row.const_log, row.slack_log, row.good_mass}) {
      out += ',';
      out += format_g17(v);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Band-limited optimality example
// ---------------------------------------------------------------------------

OptimalityResult optimality_example(int alpha, double gamma, const QuadratureSpec& spec,
                                    bool check_fourier) {
  if (alpha < 2) throw Error(Errc::InvalidArgument, "alpha must be an integer >= 2");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(Errc::InvalidArgument, "gamma must lie in (0,1)");

  const double truncation = 200.0;
  const ConvexShape line = ConvexShape{Box{{-truncation}, {2.0 * truncation}}};
  const auto g_sq = [alpha](const Vec& x) {
    const double g = int_pow(sinc_two_pi(x[0]), alpha);
    return Cplx(g * g, 0.0);
  };

  OptimalityResult result;
  result.alpha = alpha;
  result.gamma = gamma;
  result.norm_sq_full = integrate_on(line, nullptr, g_sq, spec).value.real();

  const ThickSet omega =
      PeriodicBoxUnion{{1.0}, {Box{{(1.0 - gamma) / 2.0}, {gamma}}}};
  result.norm_sq_omega = integrate_on(line, &omega, g_sq, spec).value.real();

  result.bound =
      2.0 * kPi * kPi * std::pow(3.0 * kPi * gamma, 2.0 * alpha - 2.0);
  result.bound_holds = result.norm_sq_omega <= result.bound * (1.0 + 1e-9);
  result.norm_at_least_one = result.norm_sq_full >= 1.0;

  if (check_fourier) {
    result.fourier_leak = fourier_band_leak(alpha);
    result.fourier_ok = *result.fourier_leak < 1e-6;
  }
  return result;
}

double optimality_slope(int alpha, const std::vector<double>& gammas,
                        const QuadratureSpec& spec) {
  if (gammas.size() < 2)
    throw Error(Errc::InvalidArgument, "slope needs at least two densities");
  std::vector<double> xs, ys;
  for (const double gamma : gammas) {
    const OptimalityResult r =
        optimality_example(alpha, gamma, spec, /*check_fourier=*/false);
    xs.push_back(std::log(gamma));
    ys.push_back(std::log(r.norm_sq_omega));
  }
  const double n = static_cast<double>(xs.size());
  double x_bar = 0.0, y_bar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_bar += xs[i] / n;
    y_bar += ys[i] / n;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - x_bar) * (ys[i] - y_bar);
    den += (xs[i] - x_bar) * (xs[i] - x_bar);
  }
  return num / den;
}

}  // namespace lsv
