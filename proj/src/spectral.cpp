#include "lsverify/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace lsv {

namespace {

constexpr double kEnumerationSlack = 1e-12;  // keeps exact-boundary eigenvalues
constexpr std::size_t kModeBudget = 5000000;

void validate_rectangle(const RectangleTrig& rt) {
  const int d = rt.box.dim();
  if (d <= 0) throw Error(Errc::InvalidArgument, "rectangle basis needs dimension >= 1");
  for (int j = 0; j < d; ++j) {
    if (!(rt.box.sides[static_cast<std::size_t>(j)] > 0.0) ||
        !std::isfinite(rt.box.sides[static_cast<std::size_t>(j)])) {
      throw Error(Errc::InvalidArgument, "rectangle basis needs finite positive sides");
    }
  }
  if (!rt.scale.empty()) {
    if (static_cast<int>(rt.scale.size()) != d) {
      throw Error(Errc::InvalidArgument, "scale dimension mismatch");
    }
    for (double s : rt.scale) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(Errc::InvalidArgument, "scale entries must be positive");
      }
    }
  }
}

double rect_sigma(const RectangleTrig& rt, int j) {
  return rt.scale.empty() ? 1.0 : rt.scale[static_cast<std::size_t>(j)];
}

double mode_eigenvalue(const SpectralBasis& basis, const std::vector<int>& index) {
  if (const auto* rt = std::get_if<RectangleTrig>(&basis)) {
    double sum = 0.0;
    for (int j = 0; j < rt->box.dim(); ++j) {
      const double w = kPi * index[static_cast<std::size_t>(j)] /
                       rt->box.sides[static_cast<std::size_t>(j)];
      sum += rect_sigma(*rt, j) * w * w;
    }
    return sum;
  }
  const auto& ht = std::get<HermiteTensor>(basis);
  long total = 0;
  for (int b : index) total += b;
  return 2.0 * static_cast<double>(total) + static_cast<double>(ht.dim);
}

bool index_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ---------------------------------------------------------------------------
// Per-axis factors and their derivatives.
// ---------------------------------------------------------------------------

// Value of the n-th derivative of the one-dimensional trigonometric factor at
// a complex argument.  Dirichlet: sqrt(2/L) sin(k pi (z-a)/L); Neumann k=0:
// sqrt(1/L); Neumann k>=1: sqrt(2/L) cos(k pi (z-a)/L).  Derivatives follow
// the phase-shift rule: each one multiplies by the frequency and advances the
// phase by pi/2 (sin -> cos -> -sin -> -cos).
Cplx trig_factor(const RectangleTrig& rt, int axis, int k, Cplx z, int n) {
  const double L = rt.box.sides[static_cast<std::size_t>(axis)];
  const double a = rt.box.corner[static_cast<std::size_t>(axis)];
  if (rt.bc == BoundaryCondition::Neumann && k == 0) {
    return n == 0 ? Cplx(1.0 / std::sqrt(L), 0.0) : Cplx(0.0, 0.0);
  }
  const double w = kPi * k / L;
  const Cplx arg = w * (z - a);
  const Cplx s = std::sin(arg);
  const Cplx c = std::cos(arg);
  const double amp = std::sqrt(2.0 / L) * std::pow(w, n);
  const int phase = (rt.bc == BoundaryCondition::Dirichlet ? n : n + 1) & 3;
  switch (phase) {
    case 0: return amp * s;
    case 1: return amp * c;
    case 2: return -amp * s;
    default: return -amp * c;
  }
}

// Hermite functions phi_0..phi_kmax at a complex argument via the stable
// normalized three-term recurrence.
void hermite_values(Cplx t, int kmax, std::vector<Cplx>& phi) {
  phi.assign(static_cast<std::size_t>(kmax) + 1, Cplx(0.0, 0.0));
  const Cplx phi0 = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
  phi[0] = phi0;
  if (kmax >= 1) phi[1] = std::sqrt(2.0) * t * phi0;
  for (int k = 1; k < kmax; ++k) {
    phi[static_cast<std::size_t>(k) + 1] =
        std::sqrt(2.0 / (k + 1)) * t * phi[static_cast<std::size_t>(k)] -
        std::sqrt(static_cast<double>(k) / (k + 1)) * phi[static_cast<std::size_t>(k) - 1];
  }
}

void hermite_values_real(double t, int kmax, std::vector<double>& phi) {
  phi.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  const double phi0 = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
  phi[0] = phi0;
  if (kmax >= 1) phi[1] = std::sqrt(2.0) * t * phi0;
  for (int k = 1; k < kmax; ++k) {
    phi[static_cast<std::size_t>(k) + 1] =
        std::sqrt(2.0 / (k + 1)) * t * phi[static_cast<std::size_t>(k)] -
        std::sqrt(static_cast<double>(k) / (k + 1)) * phi[static_cast<std::size_t>(k) - 1];
  }
}

// Coefficients of d^n phi_k over the Hermite basis, from the ladder identity
// phi' = sqrt(k/2) phi_{k-1} - sqrt((k+1)/2) phi_{k+1} applied n times.  The
// result spans indices 0..k+n.
std::vector<double> hermite_derivative_coeffs(int k, int n) {
  std::vector<double> c(static_cast<std::size_t>(k + n) + 1, 0.0);
  c[static_cast<std::size_t>(k)] = 1.0;
  std::vector<double> next(c.size(), 0.0);
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i <= k + step; ++i) {
      const double ci = c[static_cast<std::size_t>(i)];
      if (ci == 0.0) continue;
      if (i >= 1) next[static_cast<std::size_t>(i) - 1] += std::sqrt(i / 2.0) * ci;
      next[static_cast<std::size_t>(i) + 1] -= std::sqrt((i + 1) / 2.0) * ci;
    }
    std::swap(c, next);
  }
  return c;
}

Cplx hermite_factor(int k, Cplx z, int n) {
  std::vector<Cplx> phi;
  hermite_values(z, k + n, phi);
  if (n == 0) return phi[static_cast<std::size_t>(k)];
  const std::vector<double> c = hermite_derivative_coeffs(k, n);
  Cplx sum(0.0, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0.0) sum += c[i] * phi[i];
  }
  return sum;
}

}  // namespace

int basis_dim(const SpectralBasis& basis) {
  if (const auto* rt = std::get_if<RectangleTrig>(&basis)) return rt->box.dim();
  return std::get<HermiteTensor>(basis).dim;
}

std::vector<Mode> enumerate_modes(const SpectralBasis& basis, double lambda) {
  if (!std::isfinite(lambda)) throw Error(Errc::InvalidArgument, "lambda must be finite");
  std::vector<Mode> modes;
  const double cutoff = lambda + kEnumerationSlack * std::max(1.0, std::fabs(lambda));

  if (const auto* rt = std::get_if<RectangleTrig>(&basis)) {
    validate_rectangle(*rt);
    const int d = rt->box.dim();
    const int kmin = rt->bc == BoundaryCondition::Dirichlet ? 1 : 0;
    std::vector<int> kmax(static_cast<std::size_t>(d), 0);
    std::size_t budget = 1;
    for (int j = 0; j < d; ++j) {
      const double L = rt->box.sides[static_cast<std::size_t>(j)];
      const double s = rect_sigma(*rt, j);
      // sigma (pi k / L)^2 <= cutoff  =>  k <= L sqrt(cutoff/sigma) / pi
      int hi = cutoff >= 0.0
                   ? static_cast<int>(std::floor(L * std::sqrt(cutoff / s) / kPi + 1e-12))
                   : -1;
      if (hi < kmin) {
        throw Error(Errc::EmptySpectrum, "no eigenvalue at or below the requested cutoff");
      }
      kmax[static_cast<std::size_t>(j)] = hi;
      budget *= static_cast<std::size_t>(hi - kmin + 1);
      if (budget > kModeBudget) {
        throw Error(Errc::InvalidArgument, "mode enumeration exceeds the budget");
      }
    }
    std::vector<int> k(static_cast<std::size_t>(d), kmin);
    while (true) {
      const double eig = mode_eigenvalue(basis, k);
      if (eig <= cutoff) modes.push_back(Mode{k, eig});
      int j = d - 1;
      while (j >= 0) {
        if (++k[static_cast<std::size_t>(j)] <= kmax[static_cast<std::size_t>(j)]) break;
        k[static_cast<std::size_t>(j)] = kmin;
        --j;
      }
      if (j < 0) break;
    }
  } else {
    const auto& ht = std::get<HermiteTensor>(basis);
    if (ht.dim <= 0) throw Error(Errc::InvalidArgument, "Hermite basis needs dimension >= 1");
    const int d = ht.dim;
    // 2|beta| + d <= cutoff
    const double nmax_real = (cutoff - d) / 2.0;
    if (nmax_real < 0.0) {
      throw Error(Errc::EmptySpectrum, "no eigenvalue at or below the requested cutoff");
    }
    const int nmax = static_cast<int>(std::floor(nmax_real + 1e-12));
    std::vector<int> beta(static_cast<std::size_t>(d), 0);
    while (true) {
      long total = 0;
      for (int b : beta) total += b;
      if (total <= nmax) {
        modes.push_back(Mode{beta, mode_eigenvalue(basis, beta)});
        if (modes.size() > kModeBudget) {
          throw Error(Errc::InvalidArgument, "mode enumeration exceeds the budget");
        }
      }
      int j = d - 1;
      while (j >= 0) {
        if (++beta[static_cast<std::size_t>(j)] <= nmax) break;
        beta[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }

  if (modes.empty()) {
    throw Error(Errc::EmptySpectrum, "no eigenvalue at or below the requested cutoff");
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
    return index_less(a.index, b.index);
  });
  return modes;
}

SpectralFunction random_function(const SpectralBasis& basis, double lambda,
                                 std::uint64_t seed, CoefficientLaw law) {
  (void)law;  // single supported law: complex standard normal
  std::vector<Mode> modes = enumerate_modes(basis, lambda);
  Rng rng(seed);
  SpectralFunction f;
  f.basis = basis;
  f.lambda_cap = lambda;
  f.terms.reserve(modes.size());
  double total = 0.0;
  for (const Mode& m : modes) {
    const Cplx c = rng.complex_normal();
    total += std::norm(c);
    f.terms.push_back(SpectralTerm{m, c});
  }
  if (total <= 0.0) throw Error(Errc::ZeroMass, "degenerate random coefficients");
  const double inv = 1.0 / std::sqrt(total);
  for (auto& t : f.terms) t.coeff *= inv;
  return f;
}

Cplx evaluate(const SpectralFunction& f, const std::vector<Cplx>& z,
              const std::vector<int>& alpha) {
  const int d = basis_dim(f.basis);
  if (static_cast<int>(z.size()) != d) {
    throw Error(Errc::InvalidArgument, "evaluation point dimension mismatch");
  }
  if (!alpha.empty() && static_cast<int>(alpha.size()) != d) {
    throw Error(Errc::InvalidArgument, "derivative multi-index dimension mismatch");
  }
  for (int n : alpha) {
    if (n < 0) throw Error(Errc::InvalidArgument, "derivative orders must be nonnegative");
  }
  const auto* rt = std::get_if<RectangleTrig>(&f.basis);
  Cplx sum(0.0, 0.0);
  for (const auto& term : f.terms) {
    Cplx prod(1.0, 0.0);
    for (int j = 0; j < d; ++j) {
      const int n = alpha.empty() ? 0 : alpha[static_cast<std::size_t>(j)];
      const int k = term.mode.index[static_cast<std::size_t>(j)];
      prod *= rt ? trig_factor(*rt, j, k, z[static_cast<std::size_t>(j)], n)
                 : hermite_factor(k, z[static_cast<std::size_t>(j)], n);
    }
    sum += term.coeff * prod;
  }
  return sum;
}

Cplx evaluate(const SpectralFunction& f, const Vec& x, const std::vector<int>& alpha) {
  std::vector<Cplx> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = Cplx(x[i], 0.0);
  return evaluate(f, z, alpha);
}

MultiIndexSet multi_index_set(int dim, int m_max) {
  if (dim < 1 || m_max < 0) throw Error(Errc::InvalidArgument, "bad multi-index parameters");
  MultiIndexSet set;
  set.dim = dim;
  set.m_max = m_max;
  set.order_begin.assign(static_cast<std::size_t>(m_max) + 2, 0);
  std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
  // Emit all alpha with |alpha| = m in lexicographic order.
  auto emit = [&](auto&& self, int axis, int remaining) -> void {
    if (axis == dim - 1) {
      alpha[static_cast<std::size_t>(axis)] = remaining;
      set.indices.push_back(alpha);
      double inv = 1.0;
      for (int a : alpha) {
        for (int i = 2; i <= a; ++i) inv /= i;
      }
      set.inv_factorial.push_back(inv);
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      alpha[static_cast<std::size_t>(axis)] = a;
      self(self, axis + 1, remaining - a);
    }
  };
  for (int m = 0; m <= m_max; ++m) {
    set.order_begin[static_cast<std::size_t>(m)] = set.indices.size();
    emit(emit, 0, m);
  }
  set.order_begin[static_cast<std::size_t>(m_max) + 1] = set.indices.size();
  return set;
}

void evaluate_all_derivatives(const SpectralFunction& f, const Vec& x,
                              const MultiIndexSet& set, std::vector<Cplx>& out) {
  const int d = basis_dim(f.basis);
  if (set.dim != d) throw Error(Errc::InvalidArgument, "multi-index dimension mismatch");
  if (static_cast<int>(x.size()) != d) {
    throw Error(Errc::InvalidArgument, "evaluation point dimension mismatch");
  }
  const int m = set.m_max;
  const std::size_t nterm = f.terms.size();
  const std::size_t stride_axis = static_cast<std::size_t>(m) + 1;
  const std::size_t stride_term = static_cast<std::size_t>(d) * stride_axis;

  // table[t * stride_term + j * stride_axis + n] = n-th derivative of the
  // axis-j factor of term t at x[j].
  std::vector<double> table(nterm * stride_term, 0.0);

  if (const auto* rt = std::get_if<RectangleTrig>(&f.basis)) {
    for (std::size_t t = 0; t < nterm; ++t) {
      for (int j = 0; j < d; ++j) {
        const int k = f.terms[t].mode.index[static_cast<std::size_t>(j)];
        const double L = rt->box.sides[static_cast<std::size_t>(j)];
        const double a = rt->box.corner[static_cast<std::size_t>(j)];
        double* dst = table.data() + t * stride_term +
                      static_cast<std::size_t>(j) * stride_axis;
        if (rt->bc == BoundaryCondition::Neumann && k == 0) {
          dst[0] = 1.0 / std::sqrt(L);
          continue;
        }
        const double w = kPi * k / L;
        const double arg = w * (x[static_cast<std::size_t>(j)] - a);
        const double s = std::sin(arg);
        const double c = std::cos(arg);
        const double amp = std::sqrt(2.0 / L);
        const int base = rt->bc == BoundaryCondition::Dirichlet ? 0 : 1;
        double wn = amp;
        for (int n = 0; n <= m; ++n) {
          switch ((base + n) & 3) {
            case 0: dst[n] = wn * s; break;
            case 1: dst[n] = wn * c; break;
            case 2: dst[n] = -wn * s; break;
            default: dst[n] = -wn * c; break;
          }
          wn *= w;
        }
      }
    }
  } else {
    // Shared per-axis Hermite values up to the largest degree + m.
    std::vector<double> phi;
    for (int j = 0; j < d; ++j) {
      int kmax = 0;
      for (const auto& term : f.terms) {
        kmax = std::max(kmax, term.mode.index[static_cast<std::size_t>(j)]);
      }
      hermite_values_real(x[static_cast<std::size_t>(j)], kmax + m, phi);
      for (std::size_t t = 0; t < nterm; ++t) {
        const int k = f.terms[t].mode.index[static_cast<std::size_t>(j)];
        double* dst = table.data() + t * stride_term +
                      static_cast<std::size_t>(j) * stride_axis;
        dst[0] = phi[static_cast<std::size_t>(k)];
        for (int n = 1; n <= m; ++n) {
          const std::vector<double> c = hermite_derivative_coeffs(k, n);
          double sum = 0.0;
          for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] != 0.0) sum += c[i] * phi[i];
          }
          dst[n] = sum;
        }
      }
    }
  }

  out.assign(set.indices.size(), Cplx(0.0, 0.0));
  for (std::size_t i = 0; i < set.indices.size(); ++i) {
    const std::vector<int>& alpha = set.indices[i];
    Cplx acc(0.0, 0.0);
    for (std::size_t t = 0; t < nterm; ++t) {
      double prod = 1.0;
      const double* base = table.data() + t * stride_term;
      for (int j = 0; j < d; ++j) {
        prod *= base[static_cast<std::size_t>(j) * stride_axis +
                     static_cast<std::size_t>(alpha[static_cast<std::size_t>(j)])];
      }
      acc += f.terms[t].coeff * prod;
    }
    out[i] = acc;
  }
}

double norm_sq(const SpectralFunction& f) {
  Kahan sum;
  for (const auto& t : f.terms) sum.add(std::norm(t.coeff));
  return sum.value();
}

IntegralResult norm_sq_region(const SpectralFunction& f, const ConvexShape& region,
                              const ThickSet* mask, const QuadratureSpec& spec) {
  return integrate_on(
      region, mask,
      [&](const Vec& x) -> Cplx { return Cplx(std::norm(evaluate(f, x)), 0.0); }, spec);
}

Json basis_to_json(const SpectralBasis& basis) {
  Json j;
  if (const auto* rt = std::get_if<RectangleTrig>(&basis)) {
    j["type"] = "rectangle_trig";
    j["box"] = box_to_json(rt->box);
    j["bc"] = rt->bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
    if (!rt->scale.empty()) j["scale"] = rt->scale;
  } else {
    const auto& ht = std::get<HermiteTensor>(basis);
    j["type"] = "hermite";
    j["dim"] = ht.dim;
  }
  return j;
}

SpectralBasis basis_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw Error(Errc::SchemaError, path + ": expected an object");
  const std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "rectangle_trig") {
    reject_unknown_keys(j, {"type", "box", "bc", "scale"}, path);
    RectangleTrig rt;
    rt.box = box_from_json(require_field(j, "box", path), path + ".box");
    const std::string bc = string_field(require_field(j, "bc", path), path + ".bc");
    if (bc == "dirichlet") {
      rt.bc = BoundaryCondition::Dirichlet;
    } else if (bc == "neumann") {
      rt.bc = BoundaryCondition::Neumann;
    } else {
      throw Error(Errc::SchemaError, path + ".bc: expected \"dirichlet\" or \"neumann\"");
    }
    if (j.contains("scale")) rt.scale = vec_field(j["scale"], path + ".scale");
    validate_rectangle(rt);
    return rt;
  }
  if (type == "hermite") {
    reject_unknown_keys(j, {"type", "dim"}, path);
    HermiteTensor ht;
    ht.dim = static_cast<int>(integer_field(require_field(j, "dim", path), path + ".dim"));
    if (ht.dim < 1) throw Error(Errc::SchemaError, path + ".dim: must be >= 1");
    return ht;
  }
  throw Error(Errc::SchemaError, path + ".type: unknown basis type \"" + type + "\"");
}

Json spectral_to_json(const SpectralFunction& f) {
  Json j;
  j["basis"] = basis_to_json(f.basis);
  j["lambda"] = f.lambda_cap;
  Json terms = Json::array();
  for (const auto& t : f.terms) {
    Json term;
    term["index"] = t.mode.index;
    term["re"] = t.coeff.real();
    term["im"] = t.coeff.imag();
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

SpectralFunction spectral_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw Error(Errc::SchemaError, path + ": expected an object");
  reject_unknown_keys(j, {"basis", "terms", "lambda"}, path);
  SpectralFunction f;
  f.basis = basis_from_json(require_field(j, "basis", path), path + ".basis");
  f.lambda_cap = number_field(require_field(j, "lambda", path), path + ".lambda");
  const int d = basis_dim(f.basis);
  const auto* rt = std::get_if<RectangleTrig>(&f.basis);
  const int kmin = (rt != nullptr && rt->bc == BoundaryCondition::Dirichlet) ? 1 : 0;
  const Json& terms = require_field(j, "terms", path);
  if (!terms.is_array()) throw Error(Errc::SchemaError, path + ".terms: expected an array");
  const double cutoff =
      f.lambda_cap + kEnumerationSlack * std::max(1.0, std::fabs(f.lambda_cap));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tpath = path + ".terms[" + std::to_string(i) + "]";
    const Json& tj = terms[i];
    if (!tj.is_object()) throw Error(Errc::SchemaError, tpath + ": expected an object");
    reject_unknown_keys(tj, {"index", "re", "im"}, tpath);
    const Json& idx = require_field(tj, "index", tpath);
    if (!idx.is_array() || static_cast<int>(idx.size()) != d) {
      throw Error(Errc::SchemaError, tpath + ".index: expected an array of length " +
                                         std::to_string(d));
    }
    SpectralTerm term;
    term.mode.index.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const Json& e = idx[static_cast<std::size_t>(k)];
      if (!e.is_number_integer()) {
        throw Error(Errc::SchemaError, tpath + ".index: entries must be integers");
      }
      const int v = e.get<int>();
      if (v < kmin) {
        throw Error(Errc::SchemaError, tpath + ".index: entries must be >= " +
                                           std::to_string(kmin));
      }
      term.mode.index[static_cast<std::size_t>(k)] = v;
    }
    term.mode.eigenvalue = mode_eigenvalue(f.basis, term.mode.index);
    if (term.mode.eigenvalue > cutoff) {
      throw Error(Errc::SchemaError, tpath + ": eigenvalue exceeds lambda");
    }
    term.coeff = Cplx(number_field(require_field(tj, "re", tpath), tpath + ".re"),
                      number_field(require_field(tj, "im", tpath), tpath + ".im"));
    f.terms.push_back(std::move(term));
  }
  return f;
}

}  // namespace lsv
