#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "lsverify/spectral.hpp"

using namespace lsv;

namespace {

SpectralBasis unit_interval(BoundaryCondition bc = BoundaryCondition::Dirichlet) {
  RectangleTrig rt;
  rt.box = Box{{0.0}, {1.0}};
  rt.bc = bc;
  return rt;
}

SpectralBasis unit_square() {
  RectangleTrig rt;
  rt.box = Box{{0.0, 0.0}, {1.0, 1.0}};
  rt.bc = BoundaryCondition::Dirichlet;
  return rt;
}

SpectralFunction single_mode(const SpectralBasis& basis, std::vector<int> index,
                             double lambda) {
  SpectralFunction f;
  f.basis = basis;
  f.lambda_cap = lambda;
  SpectralTerm t;
  t.mode.index = std::move(index);
  t.coeff = Cplx(1.0, 0.0);
  f.terms.push_back(t);
  return f;
}

// Independent oracle for the Gaussian-free part of the Hermite functions:
// p_k(t) = phi_k(t) e^{t^2/2} satisfies the same normalized recurrence.
double hermite_poly_part(int k, double t) {
  double p0 = std::pow(kPi, -0.25);
  if (k == 0) return p0;
  double p1 = std::sqrt(2.0) * t * p0;
  for (int i = 1; i < k; ++i) {
    double p2 = std::sqrt(2.0 / (i + 1)) * t * p1 -
                std::sqrt(static_cast<double>(i) / (i + 1)) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

TEST_CASE("mode enumeration on an interval of length pi") {
  RectangleTrig rt;
  rt.box = Box{{0.0}, {kPi}};
  rt.bc = BoundaryCondition::Dirichlet;
  auto modes = enumerate_modes(rt, 10.0);
  REQUIRE(modes.size() == 3);
  for (int k = 1; k <= 3; ++k) {
    CHECK(modes[static_cast<std::size_t>(k - 1)].index[0] == k);
    CHECK(modes[static_cast<std::size_t>(k - 1)].eigenvalue ==
          doctest::Approx(static_cast<double>(k * k)).epsilon(1e-12));
  }
}

TEST_CASE("mode enumeration on the unit square keeps the boundary eigenvalue") {
  auto modes = enumerate_modes(unit_square(), 5.0 * kPi * kPi);
  REQUIRE(modes.size() == 3);
  CHECK(modes[0].index == std::vector<int>{1, 1});
  CHECK(modes[1].index == std::vector<int>{1, 2});
  CHECK(modes[2].index == std::vector<int>{2, 1});
  CHECK(modes[0].eigenvalue == doctest::Approx(2.0 * kPi * kPi));
  CHECK(modes[1].eigenvalue == doctest::Approx(5.0 * kPi * kPi));
}

TEST_CASE("Hermite enumeration counts compositions") {
  HermiteTensor ht;
  ht.dim = 2;
  auto modes = enumerate_modes(ht, 6.0);
  REQUIRE(modes.size() == 6);
  CHECK(modes[0].index == std::vector<int>{0, 0});
  CHECK(modes[0].eigenvalue == doctest::Approx(2.0));
  CHECK(modes[1].index == std::vector<int>{0, 1});
  CHECK(modes[2].index == std::vector<int>{1, 0});
  CHECK(modes[3].index == std::vector<int>{0, 2});
  CHECK(modes[4].index == std::vector<int>{1, 1});
  CHECK(modes[5].index == std::vector<int>{2, 0});
  CHECK(modes[5].eigenvalue == doctest::Approx(6.0));
}

TEST_CASE("empty spectra are rejected") {
  CHECK_THROWS_AS(enumerate_modes(unit_interval(), 1.0), Error);  // below pi^2
  HermiteTensor ht;
  ht.dim = 1;
  CHECK_THROWS_AS(enumerate_modes(ht, 0.5), Error);  // ground state is 1
  RectangleTrig bad;
  bad.box = Box{{0.0}, {kInf}};
  CHECK_THROWS_AS(enumerate_modes(SpectralBasis(bad), 10.0), Error);
}

TEST_CASE("Neumann includes the constant mode") {
  auto modes = enumerate_modes(unit_interval(BoundaryCondition::Neumann), 0.0);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].index[0] == 0);
  CHECK(modes[0].eigenvalue == doctest::Approx(0.0));
  auto f = single_mode(unit_interval(BoundaryCondition::Neumann), {0}, 0.0);
  CHECK(evaluate(f, Vec{0.37}).real() == doctest::Approx(1.0));
  CHECK(std::abs(evaluate(f, Vec{0.37}, {1})) == doctest::Approx(0.0));
}

TEST_CASE("diagonal scaling enters the eigenvalue") {
  RectangleTrig rt;
  rt.box = Box{{0.0}, {1.0}};
  rt.bc = BoundaryCondition::Dirichlet;
  rt.scale = {4.0};
  auto modes = enumerate_modes(rt, 40.0);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].eigenvalue == doctest::Approx(4.0 * kPi * kPi));
}

TEST_CASE("random functions are normalized and deterministic") {
  auto f = random_function(unit_interval(), 10.0 * kPi * kPi, 7);
  CHECK(f.terms.size() == 3);
  CHECK(norm_sq(f) == doctest::Approx(1.0).epsilon(1e-14));
  auto g = random_function(unit_interval(), 10.0 * kPi * kPi, 7);
  for (std::size_t i = 0; i < f.terms.size(); ++i) {
    CHECK(f.terms[i].coeff == g.terms[i].coeff);
  }
  auto h = random_function(unit_interval(), 10.0 * kPi * kPi, 8);
  CHECK(f.terms[0].coeff != h.terms[0].coeff);

  // A single-mode subspace yields that eigenfunction up to phase.
  auto s = random_function(unit_interval(), 10.0, 3);
  REQUIRE(s.terms.size() == 1);
  CHECK(std::abs(s.terms[0].coeff) == doctest::Approx(1.0));
}

TEST_CASE("pointwise evaluation matches closed forms") {
  // sqrt(2) sin(pi x) at 1/2.
  auto f = single_mode(unit_interval(), {1}, kPi * kPi);
  CHECK(evaluate(f, Vec{0.5}).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // First derivative sqrt(2) pi cos(pi x) at 1/4.
  CHECK(evaluate(f, Vec{0.25}, {1}).real() ==
        doctest::Approx(std::sqrt(2.0) * kPi * std::cos(kPi * 0.25)).epsilon(1e-14));
  // Analytic extension: |sin(pi i y)| = sinh(pi y).
  const double y = 0.3;
  Cplx v = evaluate(f, std::vector<Cplx>{Cplx(0.0, y)});
  CHECK(std::abs(v) == doctest::Approx(std::sqrt(2.0) * std::sinh(kPi * y)).epsilon(1e-12));
  // Hermite ground state at the origin.
  HermiteTensor ht;
  ht.dim = 1;
  auto phi0 = single_mode(SpectralBasis(ht), {0}, 1.0);
  CHECK(evaluate(phi0, Vec{0.0}).real() == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-15));
}

TEST_CASE("multi-index sets enumerate orders lexicographically") {
  MultiIndexSet set = multi_index_set(2, 2);
  REQUIRE(set.indices.size() == 6);
  CHECK(set.order_begin == std::vector<std::size_t>{0, 1, 3, 6});
  CHECK(set.indices[0] == std::vector<int>{0, 0});
  CHECK(set.indices[1] == std::vector<int>{0, 1});
  CHECK(set.indices[2] == std::vector<int>{1, 0});
  CHECK(set.indices[3] == std::vector<int>{0, 2});
  CHECK(set.indices[4] == std::vector<int>{1, 1});
  CHECK(set.indices[5] == std::vector<int>{2, 0});
  CHECK(set.inv_factorial[3] == doctest::Approx(0.5));
  CHECK(set.inv_factorial[4] == doctest::Approx(1.0));
}

TEST_CASE("batched derivatives agree with single evaluations") {
  auto f = random_function(unit_square(), 100.0, 11);
  MultiIndexSet set = multi_index_set(2, 4);
  std::vector<Cplx> out;
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Vec x{0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform()};
    evaluate_all_derivatives(f, x, set, out);
    for (std::size_t i = 0; i < set.indices.size(); ++i) {
      Cplx direct = evaluate(f, x, set.indices[i]);
      CHECK(std::abs(out[i] - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }

  HermiteTensor ht;
  ht.dim = 2;
  auto g = random_function(SpectralBasis(ht), 12.0, 13);
  MultiIndexSet hset = multi_index_set(2, 3);
  Vec x{0.4, -0.9};
  evaluate_all_derivatives(g, x, hset, out);
  for (std::size_t i = 0; i < hset.indices.size(); ++i) {
    Cplx direct = evaluate(g, x, hset.indices[i]);
    CHECK(std::abs(out[i] - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("derivatives match central finite differences") {
  auto f = random_function(unit_square(), 100.0, 21);
  const double h = 1e-4;
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x{0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform()};
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<int> alpha{0, 0};
      alpha[static_cast<std::size_t>(axis)] = 1;
      Vec xp = x, xm = x;
      xp[static_cast<std::size_t>(axis)] += h;
      xm[static_cast<std::size_t>(axis)] -= h;
      Cplx fd = (evaluate(f, xp) - evaluate(f, xm)) / (2.0 * h);
      Cplx exact = evaluate(f, x, alpha);
      CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
    }
  }

  HermiteTensor ht;
  ht.dim = 1;
  auto g = random_function(SpectralBasis(ht), 21.0, 33);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x{-3.0 + 6.0 * rng.uniform()};
    Cplx fd = (evaluate(g, Vec{x[0] + h}) - evaluate(g, Vec{x[0] - h})) / (2.0 * h);
    Cplx exact = evaluate(g, x, {1});
    CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("Hermite functions are orthonormal under Gauss-Hermite quadrature") {
  QuadRule gh = gauss_hermite(41);  // exact for polynomial degree <= 81
  std::vector<std::vector<double>> p(21);
  for (int k = 0; k <= 20; ++k) {
    p[static_cast<std::size_t>(k)].resize(gh.x.size());
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
      p[static_cast<std::size_t>(k)][i] = hermite_poly_part(k, gh.x[i]);
    }
  }
  for (int j = 0; j <= 20; ++j) {
    for (int k = j; k <= 20; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < gh.x.size(); ++i) {
        dot += gh.w[i] * p[static_cast<std::size_t>(j)][i] * p[static_cast<std::size_t>(k)][i];
      }
      CHECK(std::fabs(dot - (j == k ? 1.0 : 0.0)) <= 1e-8);
    }
  }

  // The oracle and the evaluator agree: phi_k = p_k e^{-t^2/2}.
  HermiteTensor ht;
  ht.dim = 1;
  auto f7 = single_mode(SpectralBasis(ht), {7}, 15.0);
  const double t = 1.3;
  CHECK(evaluate(f7, Vec{t}).real() ==
        doctest::Approx(hermite_poly_part(7, t) * std::exp(-0.5 * t * t)).epsilon(1e-12));
}

TEST_CASE("Hermite eigen-relation via exact recurrence derivatives") {
  HermiteTensor ht;
  ht.dim = 1;
  for (int k = 0; k <= 15; ++k) {
    auto f = single_mode(SpectralBasis(ht), {k}, 2.0 * k + 1.0);
    for (double t = -8.0; t <= 8.0 + 1e-9; t += 0.5) {
      const double phi = evaluate(f, Vec{t}).real();
      const double phi2 = evaluate(f, Vec{t}, {2}).real();
      const double resid = -phi2 + t * t * phi - (2.0 * k + 1.0) * phi;
      CHECK(std::fabs(resid) <= 1e-6);
    }
  }

  // Two-dimensional oscillator: (-Laplacian + |x|^2) Phi = (2|beta|+d) Phi.
  HermiteTensor h2;
  h2.dim = 2;
  auto g = single_mode(SpectralBasis(h2), {1, 2}, 8.0);
  for (const Vec& x : {Vec{0.3, -1.1}, Vec{1.7, 0.2}, Vec{-2.0, 2.5}}) {
    const double v = evaluate(g, x).real();
    const double lap = evaluate(g, x, {2, 0}).real() + evaluate(g, x, {0, 2}).real();
    const double resid = -lap + (x[0] * x[0] + x[1] * x[1]) * v - 8.0 * v;
    CHECK(std::fabs(resid) <= 1e-6);
  }
}

TEST_CASE("full norm is the coefficient sum and quadrature confirms it") {
  auto f = random_function(unit_square(), 500.0, 77);
  CHECK(norm_sq(f) == doctest::Approx(1.0).epsilon(1e-14));
  QuadratureSpec spec;
  Box region{{0.0, 0.0}, {1.0, 1.0}};
  IntegralResult r = norm_sq_region(f, ConvexShape(region), nullptr, spec);
  CHECK(r.converged);
  CHECK(std::fabs(r.value.real() - 1.0) <= 1e-8);
}

TEST_CASE("regional norm of the first sine mode") {
  auto f = single_mode(unit_interval(), {1}, kPi * kPi);
  QuadratureSpec spec;
  Box region{{0.0}, {0.5}};
  IntegralResult r = norm_sq_region(f, ConvexShape(region), nullptr, spec);
  CHECK(r.value.real() == doctest::Approx(0.5).epsilon(1e-10));

  Box null_region{{0.25}, {0.0}};
  IntegralResult z = norm_sq_region(f, ConvexShape(null_region), nullptr, spec);
  CHECK(z.value.real() == doctest::Approx(0.0));
}

TEST_CASE("derivative sums are invariant under rotated frames") {
  auto f = random_function(unit_square(), 50.0, 41);
  auto g = random_function(unit_square(), 50.0, 42);
  const double theta = 0.7;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  MultiIndexSet set = multi_index_set(2, 3);
  std::vector<Cplx> df, dg;
  for (const Vec& x : {Vec{0.3, 0.6}, Vec{0.52, 0.17}}) {
    evaluate_all_derivatives(f, x, set, df);
    evaluate_all_derivatives(g, x, set, dg);
    auto partial = [&](const std::vector<Cplx>& table, int i, int j) {
      for (std::size_t idx = 0; idx < set.indices.size(); ++idx) {
        if (set.indices[idx][0] == i && set.indices[idx][1] == j) return table[idx];
      }
      REQUIRE(false);
      return Cplx(0.0, 0.0);
    };
    // Directional derivative along the rotated frame nu1 = (c, s),
    // nu2 = (-s, c) for the multi-index (a, b), by multinomial expansion.
    auto directional = [&](const std::vector<Cplx>& table, int a, int b) {
      Cplx sum(0.0, 0.0);
      for (int i = 0; i <= a; ++i) {
        for (int j = 0; j <= b; ++j) {
          const double w = binom(a, i) * binom(b, j) * std::pow(c, i) *
                           std::pow(s, a - i) * std::pow(-s, j) * std::pow(c, b - j);
          sum += w * partial(table, i + j, (a - i) + (b - j));
        }
      }
      return sum;
    };
    for (int m = 1; m <= 3; ++m) {
      Cplx axis_sum(0.0, 0.0);
      for (std::size_t idx = set.order_begin[static_cast<std::size_t>(m)];
           idx < set.order_begin[static_cast<std::size_t>(m) + 1]; ++idx) {
        axis_sum += set.inv_factorial[idx] * df[idx] * std::conj(dg[idx]);
      }
      Cplx rot_sum(0.0, 0.0);
      for (int a = 0; a <= m; ++a) {
        const int b = m - a;
        double invfact = 1.0;
        for (int i = 2; i <= a; ++i) invfact /= i;
        for (int i = 2; i <= b; ++i) invfact /= i;
        rot_sum += invfact * directional(df, a, b) * std::conj(directional(dg, a, b));
      }
      CHECK(std::abs(axis_sum - rot_sum) <= 1e-6 * std::max(1.0, std::abs(axis_sum)));
    }
  }
}

TEST_CASE("spectral JSON round trip and validation") {
  auto f = random_function(unit_square(), 100.0, 5);
  Json j = spectral_to_json(f);
  SpectralFunction back = spectral_from_json(j, "$");
  CHECK(spectral_to_json(back) == j);
  Vec x{0.37, 0.81};
  CHECK(std::abs(evaluate(back, x) - evaluate(f, x)) <= 1e-15);

  Json bad = j;
  bad["extra"] = true;
  CHECK_THROWS_AS(spectral_from_json(bad, "$"), Error);

  Json bad_index = j;
  bad_index["terms"][0]["index"] = {1, 2, 3};
  CHECK_THROWS_AS(spectral_from_json(bad_index, "$"), Error);

  Json bad_eig = j;
  bad_eig["lambda"] = 1.0;  // every retained term now exceeds the cap
  CHECK_THROWS_AS(spectral_from_json(bad_eig, "$"), Error);

  Json bad_k = j;
  bad_k["terms"][0]["index"] = {0, 1};  // Dirichlet requires k >= 1
  CHECK_THROWS_AS(spectral_from_json(bad_k, "$"), Error);

  HermiteTensor ht;
  ht.dim = 2;
  auto h = random_function(SpectralBasis(ht), 8.0, 6);
  Json hj = spectral_to_json(h);
  SpectralFunction hback = spectral_from_json(hj, "$");
  CHECK(spectral_to_json(hback) == hj);
}
