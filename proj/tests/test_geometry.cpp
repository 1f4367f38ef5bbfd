#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsverify/geometry.hpp"

using namespace lsv;

namespace {

Domain unit_square() {
  GeneralizedRectangle gr;
  gr.intervals = {{0.0, 1.0}, {0.0, 1.0}};
  return gr;
}

QuadratureSpec fast_spec() {
  QuadratureSpec q;
  q.mc_samples = 20000;
  return q;
}

}  // namespace

TEST_CASE("matrix determinant and application") {
  Mat m = Mat::identity(3);
  CHECK(m.det() == doctest::Approx(1.0));
  m.at(0, 0) = 2.0;
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 1.0;
  m.at(1, 1) = 3.0;
  m.at(2, 2) = -4.0;
  // det of [[2,1,0],[1,3,0],[0,0,-4]] = (6-1)*(-4) = -20
  CHECK(m.det() == doctest::Approx(-20.0));
  Vec y = m.apply({1.0, 1.0, 1.0});
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(4.0));
  CHECK(y[2] == doctest::Approx(-4.0));

  Mat d = Mat::diagonal({2.0, 3.0});
  Mat b = block_diag(d, Mat::identity(1));
  CHECK(b.n == 3);
  CHECK(b.det() == doctest::Approx(6.0));
  Mat s = scaled(d, 0.5);
  CHECK(s.det() == doctest::Approx(1.5));
}

TEST_CASE("box union volume handles overlaps exactly") {
  Box a{{0.0, 0.0}, {2.0, 2.0}};
  Box b{{1.0, 1.0}, {2.0, 2.0}};
  CHECK(box_union_volume({a, b}) == doctest::Approx(7.0).epsilon(1e-14));
  auto cover = disjoint_box_cover({a, b});
  double total = 0.0;
  for (const Box& c : cover) total += c.volume();
  CHECK(total == doctest::Approx(7.0).epsilon(1e-14));
  for (std::size_t i = 0; i < cover.size(); ++i) {
    for (std::size_t k = i + 1; k < cover.size(); ++k) {
      bool overlap = true;
      for (int j = 0; j < 2; ++j) {
        if (std::min(cover[i].hi(j), cover[k].hi(j)) -
                std::max(cover[i].lo(j), cover[k].lo(j)) <=
            0.0) {
          overlap = false;
        }
      }
      CHECK_FALSE(overlap);
    }
  }
}

TEST_CASE("polygon clipping and area") {
  std::vector<Pt2> square = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  CHECK(polygon_area(square) == doctest::Approx(1.0));
  auto tri = clip_polygon_halfplane(square, 1.0, 1.0, 1.0);  // keep x + y <= 1
  CHECK(polygon_area(tri) == doctest::Approx(0.5));
  auto empty = clip_polygon_halfplane(square, 1.0, 0.0, -1.0);  // keep x <= -1
  CHECK(polygon_area(empty) == doctest::Approx(0.0));
}

TEST_CASE("domain membership and dimensions") {
  Domain sq = unit_square();
  CHECK(domain_dim(sq) == 2);
  CHECK(domain_bounded(sq));
  CHECK(contains_point(sq, {0.5, 0.5}, false));
  CHECK_FALSE(contains_point(sq, {0.0, 0.5}, false));
  CHECK(contains_point(sq, {0.0, 0.5}, true));

  Sector s6;
  s6.n = 6;
  Domain sec = s6;
  CHECK_FALSE(domain_bounded(sec));
  double t = std::tan(kPi / 6.0);
  CHECK(contains_point(sec, {1.0, 0.5 * t}, false));
  CHECK_FALSE(contains_point(sec, {1.0, t}, false));
  CHECK(contains_point(sec, {1.0, t}, true));

  RightTriangle rt;
  rt.angle = RightTriangleAngle::PiOver4;
  rt.leg = 5.0;
  Domain rtd = rt;
  CHECK(contains_point(rtd, {3.0, 2.0}, false));
  CHECK_FALSE(contains_point(rtd, {2.0, 3.0}, false));
  CHECK(contains_point(rtd, {5.0, 5.0}, true));
  CHECK_FALSE(contains_point(rtd, {5.0, 5.0}, false));

  EquilateralTriangle et;
  et.side = 2.0;
  Domain etd = et;
  CHECK(contains_point(etd, {0.0, 0.0}, false));
  CHECK(contains_point(etd, {0.0, std::sqrt(3.0) * 2.0 / 3.0}, true));
  CHECK_FALSE(contains_point(etd, {0.0, std::sqrt(3.0) * 2.0 / 3.0}, false));
}

TEST_CASE("cube witnesses for rectangles") {
  GeneralizedRectangle gr;
  gr.intervals = {{0.0, 5.0}, {0.0, 3.0}};
  auto w = cube_witness(gr, 1.0);
  REQUIRE(w.has_value());
  CHECK((*w)[0] == doctest::Approx(0.0));
  CHECK((*w)[1] == doctest::Approx(0.0));
  CHECK(cube_in_domain(gr, *w, 1.0));

  GeneralizedRectangle small;
  small.intervals = {{0.0, 0.5}};
  CHECK_FALSE(cube_witness(small, 1.0).has_value());

  GeneralizedRectangle halfline;
  halfline.intervals = {{-kInf, 2.0}, {0.0, kInf}};
  auto hw = cube_witness(halfline, 1.5);
  REQUIRE(hw.has_value());
  CHECK((*hw)[0] == doctest::Approx(0.5));
  CHECK((*hw)[1] == doctest::Approx(0.0));
  CHECK(cube_in_domain(halfline, *hw, 1.5));
}

TEST_CASE("cube witnesses for sectors and triangles") {
  Sector s6;
  s6.n = 6;
  auto w = cube_witness(Domain(s6), 1.0);
  REQUIRE(w.has_value());
  CHECK((*w)[0] == doctest::Approx(std::sqrt(3.0)));
  CHECK((*w)[1] == doctest::Approx(0.0));
  CHECK(cube_in_domain(Domain(s6), *w, 1.0));

  RightTriangle rt;
  rt.angle = RightTriangleAngle::PiOver4;
  rt.leg = 5.0;
  auto rw = cube_witness(Domain(rt), 1.0);
  REQUIRE(rw.has_value());
  CHECK((*rw)[0] == doctest::Approx(1.0));
  CHECK(cube_in_domain(Domain(rt), *rw, 1.0));
  rt.leg = 1.9;  // needs leg >= rho (1 + cot(pi/4)) = 2
  CHECK_FALSE(cube_witness(Domain(rt), 1.0).has_value());

  // A unit square does not fit into the side-1.6 equilateral triangle: the
  // largest axis-parallel square has side (2 sqrt(3) - 3) L ≈ 0.464 L.
  EquilateralTriangle et;
  et.side = 1.6;
  CHECK_FALSE(cube_witness(Domain(et), 1.0).has_value());
  et.side = 2.2;  // above the threshold (3 + 2 sqrt(3)) / 3 ≈ 2.1547 per unit
  auto ew = cube_witness(Domain(et), 1.0);
  REQUIRE(ew.has_value());
  CHECK(cube_in_domain(Domain(et), *ew, 1.0));
}

TEST_CASE("product domains concatenate factors") {
  GeneralizedRectangle gr;
  gr.intervals = {{0.0, 2.0}};
  Sector s4;
  s4.n = 4;
  Product p;
  p.factors = {PrimitiveDomain(gr), PrimitiveDomain(s4)};
  Domain d = p;
  CHECK(domain_dim(d) == 3);
  CHECK_FALSE(domain_bounded(d));
  CHECK(contains_point(d, {1.0, 2.0, 1.0}, false));
  CHECK_FALSE(contains_point(d, {1.0, 1.0, 2.0}, false));
  auto w = cube_witness(d, 0.5);
  REQUIRE(w.has_value());
  CHECK(cube_in_domain(d, *w, 0.5));
}

TEST_CASE("thick set membership including periodic wrap") {
  PeriodicBoxUnion pu;
  pu.period = {1.0};
  pu.base = {Box{{0.5}, {0.5}}};  // [1/2, 1] repeated with period 1
  ThickSet ts = pu;
  CHECK(point_in_thickset(ts, {0.75}));
  CHECK(point_in_thickset(ts, {1.75}));
  CHECK(point_in_thickset(ts, {2.0}));   // right edge of a translate
  CHECK_FALSE(point_in_thickset(ts, {0.25}));
  CHECK_FALSE(point_in_thickset(ts, {-0.75}));
  CHECK(point_in_thickset(ts, {-0.25}));  // [-0.5, 0] translate

  BoxUnion bu;
  bu.boxes = {Box{{0.0, 0.0}, {1.0, 1.0}}};
  ThickSet ts2 = bu;
  CHECK(point_in_thickset(ts2, {1.0, 1.0}));
  CHECK_FALSE(point_in_thickset(ts2, {1.1, 0.5}));

  CHECK(point_in_thickset(FullSpace{}, {123.0}));
}

TEST_CASE("periodic materialization and intersection volume") {
  PeriodicBoxUnion pu;
  pu.period = {0.1, 0.1};
  pu.base = {Box{{0.0, 0.0}, {0.05, 0.1}}};
  ThickSet ts = pu;
  Box window{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(intersect_volume(window, ts) == doctest::Approx(0.5).epsilon(1e-12));
  Box half{{0.0, 0.0}, {0.5, 1.0}};
  CHECK(intersect_volume(half, ts) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("shape volumes, diameters, bounding boxes") {
  Box b{{0.0, 0.0}, {1.0, 2.0}};
  ConvexShape sb = b;
  CHECK(shape_dim(sb) == 2);
  CHECK(shape_volume(sb) == doctest::Approx(2.0));
  CHECK(shape_diam(sb) == doctest::Approx(std::sqrt(5.0)));

  Triangle2 t;
  t.v = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  ConvexShape st = t;
  CHECK(shape_volume(st) == doctest::Approx(0.5));
  CHECK(shape_diam(st) == doctest::Approx(std::sqrt(2.0)));
  CHECK(shape_contains(st, {0.25, 0.25}, false));
  CHECK_FALSE(shape_contains(st, {0.75, 0.75}, false));

  // Cusp piece: (0, 2) x (0, 1) under the line y = x (quadrant sector of
  // angle pi/4): area = 2 - 1/2 = 3/2.
  SectorCap cap;
  cap.box = Box{{0.0, 0.0}, {2.0, 1.0}};
  cap.tan_theta = 1.0;
  ConvexShape sc = cap;
  CHECK(shape_volume(sc) == doctest::Approx(1.5));
  CHECK(shape_contains(sc, {1.5, 0.5}, false));
  CHECK_FALSE(shape_contains(sc, {0.5, 0.75}, false));
  Box cb = shape_bbox(sc);
  CHECK(cb.lo(0) == doctest::Approx(0.0));
  CHECK(cb.hi(0) == doctest::Approx(2.0));
  CHECK(cb.hi(1) == doctest::Approx(1.0));

  ProductShape ps;
  ps.factors = {PrimitiveShape(t), PrimitiveShape(Box{{0.0}, {2.0}})};
  ConvexShape sp = ps;
  CHECK(shape_dim(sp) == 3);
  CHECK(shape_volume(sp) == doctest::Approx(1.0));
  CHECK(shape_diam(sp) == doctest::Approx(std::sqrt(6.0)));
  CHECK(shape_contains(sp, {0.25, 0.25, 1.0}, false));
}

TEST_CASE("linear images of shapes") {
  Box b{{0.0, 0.0}, {1.0, 1.0}};
  Mat psi = Mat::diagonal({2.0, 3.0});
  CHECK(psi_image_volume(ConvexShape(b), psi) == doctest::Approx(6.0));
  CHECK(psi_image_diam(ConvexShape(b), psi) == doctest::Approx(std::sqrt(13.0)));
  Mat id = Mat::identity(2);
  CHECK(psi_image_diam(ConvexShape(b), id) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cube containment in shapes") {
  Triangle2 t;
  t.v = {{{0.0, 0.0}, {4.0, 0.0}, {4.0, 4.0}}};
  ConvexShape st = t;
  CHECK(shape_contains_cube(st, {1.0, 0.0}, 1.0));
  CHECK_FALSE(shape_contains_cube(st, {0.5, 0.0}, 1.0));
}

TEST_CASE("integration of constants recovers exact measures") {
  QuadratureSpec spec;
  auto one = [](const Vec&) { return Cplx(1.0, 0.0); };

  SUBCASE("box") {
    Box b{{0.0, 0.0}, {2.5, 0.4}};
    auto r = integrate_on(ConvexShape(b), nullptr, one, spec);
    CHECK(r.converged);
    CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("triangle") {
    Triangle2 t;
    t.v = {{{0.0, 0.0}, {5.0, 0.0}, {5.0, 5.0}}};
    auto r = integrate_on(ConvexShape(t), nullptr, one, spec);
    CHECK(r.converged);
    CHECK(r.value.real() == doctest::Approx(12.5).epsilon(1e-10));
  }
  SUBCASE("sector cap") {
    SectorCap cap;
    cap.box = Box{{0.0, 0.0}, {1.0 + std::sqrt(3.0), 1.0}};
    cap.tan_theta = std::tan(kPi / 6.0);
    // area = q*rho - rho^2 cot/2 with q = 1 + sqrt(3), cot = sqrt(3)
    double expect = (1.0 + std::sqrt(3.0)) - std::sqrt(3.0) / 2.0;
    auto r = integrate_on(ConvexShape(cap), nullptr, one, spec);
    CHECK(r.converged);
    CHECK(r.value.real() == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("product") {
    Triangle2 t;
    t.v = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    ProductShape ps;
    ps.factors = {PrimitiveShape(t), PrimitiveShape(Box{{-1.0}, {3.0}})};
    auto r = integrate_on(ConvexShape(ps), nullptr, one, spec);
    CHECK(r.converged);
    CHECK(r.value.real() == doctest::Approx(1.5).epsilon(1e-10));
  }
}

TEST_CASE("integration of smooth functions") {
  QuadratureSpec spec;
  Box b{{0.0}, {1.0}};
  auto f = [](const Vec& x) { return Cplx(std::sin(kPi * x[0]), 0.0); };
  auto r = integrate_on(ConvexShape(b), nullptr, f, spec);
  CHECK(r.converged);
  CHECK(r.value.real() == doctest::Approx(2.0 / kPi).epsilon(1e-10));

  // integral of (x + y) over the triangle (0,0),(1,0),(0,1) equals 1/3
  Triangle2 t;
  t.v = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  auto g = [](const Vec& x) { return Cplx(x[0] + x[1], 0.0); };
  auto r2 = integrate_on(ConvexShape(t), nullptr, g, spec);
  CHECK(r2.value.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("integration against a mask") {
  QuadratureSpec spec;
  Box region{{0.0, 0.0}, {1.0, 1.0}};
  PeriodicBoxUnion pu;
  pu.period = {0.1, 0.1};
  pu.base = {Box{{0.0, 0.0}, {0.05, 0.1}}};
  ThickSet mask = pu;
  auto one = [](const Vec&) { return Cplx(1.0, 0.0); };
  auto r = integrate_on(ConvexShape(region), &mask, one, spec);
  CHECK(r.converged);
  CHECK(r.value.real() == doctest::Approx(0.5).epsilon(1e-10));

  // Oscillatory integrand restricted to one box.
  BoxUnion bu;
  bu.boxes = {Box{{0.25}, {0.5}}};
  ThickSet m1 = bu;
  Box seg{{0.0}, {1.0}};
  auto f = [](const Vec& x) { return Cplx(std::cos(2.0 * kPi * x[0]), 0.0); };
  auto r2 = integrate_on(ConvexShape(seg), &m1, f, spec);
  // integral of cos(2 pi x) over [1/4, 3/4] = -1/pi
  CHECK(r2.value.real() == doctest::Approx(-1.0 / kPi).epsilon(1e-10));
}

TEST_CASE("integration is deterministic across repeated calls") {
  QuadratureSpec spec;
  Box b{{0.0, 0.0}, {1.0, 1.0}};
  auto f = [](const Vec& x) {
    return Cplx(std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]), std::exp(-x[0] * x[1]));
  };
  auto r1 = integrate_on(ConvexShape(b), nullptr, f, spec);
  auto r2 = integrate_on(ConvexShape(b), nullptr, f, spec);
  CHECK(r1.value.real() == r2.value.real());
  CHECK(r1.value.imag() == r2.value.imag());
  CHECK(r1.abs_error == r2.abs_error);
}

TEST_CASE("thickness of a fully periodic one-dimensional set") {
  // One-periodic set whose trace on [-1/2, 1/2] is
  // [-1/2, -3/8] ∪ [3/8, 1/2]; shifted into the fundamental cell [0, 1]
  // this is the single box [3/8, 5/8].
  PeriodicBoxUnion pu;
  pu.period = {1.0};
  pu.base = {Box{{0.375}, {0.25}}};
  GeneralizedRectangle line;
  line.intervals = {{-kInf, kInf}};
  auto res = thickness_of(Domain(line), ThickSet(pu), 1.0, fast_spec());
  CHECK(res.exact);
  CHECK(res.thick);
  CHECK(res.gamma == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("thickness with full-space mask is one") {
  auto res = thickness_of(unit_square(), ThickSet(FullSpace{}), 0.5, fast_spec());
  CHECK(res.gamma == doctest::Approx(1.0));
  CHECK(res.thick);
  CHECK(res.exact);
  CHECK(cube_in_domain(unit_square(), res.witness_x, 0.5));
}

TEST_CASE("thickness sweep finds the exact minimizing cube") {
  GeneralizedRectangle seg;
  seg.intervals = {{0.0, 1.0}};
  BoxUnion bu;
  bu.boxes = {Box{{0.0}, {0.3}}};
  auto res = thickness_of(Domain(seg), ThickSet(bu), 0.5, fast_spec());
  CHECK(res.exact);
  CHECK_FALSE(res.thick);
  CHECK(res.gamma == doctest::Approx(0.0));
  CHECK(res.witness_x[0] == doctest::Approx(0.3));

  // Two bumps and a window wide enough to always touch one of them:
  // V(x) = |[0,0.2] ∩ (x, x+0.7)| + |[0.8,1] ∩ (x, x+0.7)| over x in [0, 0.3]
  // equals max(0, 0.2-x) + max(0, x-0.1), minimized at 0.1 on [0.1, 0.2].
  BoxUnion two;
  two.boxes = {Box{{0.0}, {0.2}}, Box{{0.8}, {0.2}}};
  auto res2 = thickness_of(Domain(seg), ThickSet(two), 0.7, fast_spec());
  CHECK(res2.exact);
  CHECK(res2.thick);
  CHECK(res2.gamma == doctest::Approx(0.1 / 0.7).epsilon(1e-12));
  CHECK(res2.witness_x[0] == doctest::Approx(0.1));
}

TEST_CASE("thickness is monotone in the observation set") {
  GeneralizedRectangle seg;
  seg.intervals = {{0.0, 2.0}};
  BoxUnion smaller;
  smaller.boxes = {Box{{0.5}, {0.2}}};
  BoxUnion larger;
  larger.boxes = {Box{{0.5}, {0.2}}, Box{{1.5}, {0.3}}};
  auto rs = thickness_of(Domain(seg), ThickSet(smaller), 1.0, fast_spec());
  auto rl = thickness_of(Domain(seg), ThickSet(larger), 1.0, fast_spec());
  CHECK(rs.gamma <= rl.gamma + 1e-15);
}

TEST_CASE("thickness Monte Carlo fallback on a triangle") {
  EquilateralTriangle et;
  et.side = 6.0;
  BoxUnion bu;
  bu.boxes = {Box{{-3.0, -2.0}, {6.0, 6.0}}};  // covers the whole triangle
  auto res = thickness_of(Domain(et), ThickSet(bu), 1.0, fast_spec());
  CHECK_FALSE(res.exact);
  CHECK(res.thick);
  CHECK(res.gamma == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cube_in_domain(Domain(et), res.witness_x, 1.0));
}

TEST_CASE("thickness error conditions") {
  GeneralizedRectangle line;
  line.intervals = {{-kInf, kInf}};
  BoxUnion bu;
  bu.boxes = {Box{{0.0}, {1.0}}};
  CHECK_THROWS_AS(thickness_of(Domain(line), ThickSet(bu), 1.0, fast_spec()), Error);

  GeneralizedRectangle tiny;
  tiny.intervals = {{0.0, 0.5}};
  CHECK_THROWS_AS(thickness_of(Domain(tiny), ThickSet(FullSpace{}), 1.0, fast_spec()), Error);
}

TEST_CASE("domain JSON round trip") {
  GeneralizedRectangle gr;
  gr.intervals = {{0.0, 5.0}, {0.0, kInf}, {-kInf, kInf}};
  Domain d = gr;
  Json j = domain_to_json(d);
  Domain back = domain_from_json(j, "$");
  CHECK(domain_to_json(back) == j);
  CHECK(j["intervals"][1][1] == "+inf");

  Sector s;
  s.n = 5;
  CHECK(domain_to_json(domain_from_json(domain_to_json(Domain(s)), "$")) ==
        domain_to_json(Domain(s)));

  RightTriangle rt;
  rt.angle = RightTriangleAngle::PiOver3;
  rt.leg = 5.0;
  Json jrt = domain_to_json(Domain(rt));
  CHECK(jrt["angle"] == "pi/3");
  CHECK(domain_to_json(domain_from_json(jrt, "$")) == jrt);

  Product p;
  p.factors = {PrimitiveDomain(gr), PrimitiveDomain(s)};
  Json jp = domain_to_json(Domain(p));
  CHECK(domain_to_json(domain_from_json(jp, "$")) == jp);
}

TEST_CASE("schema errors carry JSON paths") {
  Json bad = {{"type", "generalized_rectangle"},
              {"intervals", Json::array({Json::array({1.0, 0.0})})}};
  try {
    domain_from_json(bad, "$.domain");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaError);
    CHECK(std::string(e.what()).find("$.domain.intervals[0]") != std::string::npos);
  }

  Json unknown = {{"type", "sector"}, {"n", 6}, {"extra", 1}};
  CHECK_THROWS_AS(domain_from_json(unknown, "$"), Error);

  Json nested = {{"type", "product"},
                 {"factors", Json::array({{{"type", "product"}, {"factors", Json::array()}},
                                          {{"type", "sector"}, {"n", 3}}})}};
  CHECK_THROWS_AS(domain_from_json(nested, "$"), Error);

  Json badangle = {{"type", "right_triangle"}, {"angle", "pi/6"}, {"leg", 1.0}};
  CHECK_THROWS_AS(domain_from_json(badangle, "$"), Error);
}

TEST_CASE("thick set JSON round trip") {
  PeriodicBoxUnion pu;
  pu.period = {1.0, 2.0};
  pu.base = {Box{{0.25, 0.0}, {0.5, 1.0}}};
  Json j = thickset_to_json(ThickSet(pu));
  ThickSet back = thickset_from_json(j, "$");
  CHECK(thickset_to_json(back) == j);

  Json jf = thickset_to_json(ThickSet(FullSpace{}));
  CHECK(thickset_from_json(jf, "$").index() == 0);

  // Base box outside the fundamental cell is rejected.
  Json badbase = {{"type", "periodic_box_union"},
                  {"period", Json::array({1.0})},
                  {"base", Json::array({{{"corner", Json::array({0.8})},
                                         {"sides", Json::array({0.5})}}})}};
  CHECK_THROWS_AS(thickset_from_json(badbase, "$"), Error);
}

TEST_CASE("quadrature spec JSON defaults and validation") {
  Json j = Json::object();
  QuadratureSpec q = quadrature_from_json(j, "$");
  CHECK(q.rule_order == 16);
  CHECK(q.base_subdivision == 4);
  CHECK(q.rel_tol == doctest::Approx(1e-8));
  CHECK(q.max_depth == 12);

  Json j2 = {{"rule_order", 8}, {"rel_tol", 1e-6}};
  QuadratureSpec q2 = quadrature_from_json(j2, "$");
  CHECK(q2.rule_order == 8);
  CHECK(q2.rel_tol == doctest::Approx(1e-6));

  Json bad = {{"rule_order", 0}};
  CHECK_THROWS_AS(quadrature_from_json(bad, "$"), Error);
  Json unknown = {{"order", 8}};
  CHECK_THROWS_AS(quadrature_from_json(unknown, "$"), Error);
}

TEST_CASE("matrix JSON round trip") {
  Mat m = Mat::diagonal({1.0, -2.0});
  m.at(0, 1) = 0.5;
  Json j = mat_to_json(m);
  Mat back = mat_from_json(j, "$");
  CHECK(back.n == 2);
  CHECK(back.at(0, 1) == doctest::Approx(0.5));
  CHECK(mat_to_json(back) == j);
}
