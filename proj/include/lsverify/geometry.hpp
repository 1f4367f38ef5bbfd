#pragma once

// Domains, thick sets, convex covering shapes, exact measure computations,
// adaptive tensor quadrature over clipped regions, and thickness evaluation.
//
// Conventions:
//  - A "cube at corner x with side rho" is the open cube x + (0, rho)^d; for a
//    convex open domain it lies inside the domain iff all 2^d closed corners
//    lie in the domain closure, which is the test used throughout.
//  - All 2-D primitive regions are convex polygons (possibly produced by
//    clipping a rectangle against the half-plane x2 <= x1 * tan(theta)), so
//    areas, diameters and bounding boxes are computed exactly from vertices.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lsverify/common.hpp"

namespace lsv {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Small dense matrix (row-major), used for the linear maps applied to
// covering elements.
// ---------------------------------------------------------------------------

struct Mat {
  int n = 0;
  Vec a;  // row-major, size n*n

  static Mat identity(int n);
  static Mat diagonal(const Vec& d);
  double& at(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
  Vec apply(const Vec& x) const;
  double det() const;  // Gaussian elimination with partial pivoting
};

Mat block_diag(const Mat& A, const Mat& B);
Mat scaled(const Mat& A, double s);

// ---------------------------------------------------------------------------
// Intervals, boxes
// ---------------------------------------------------------------------------

struct ExtendedInterval {
  double lo = 0.0;  // may be -inf
  double hi = 0.0;  // may be +inf
  bool bounded() const { return lo > -kInf && hi < kInf; }
  double length() const { return hi - lo; }
};

struct Box {
  Vec corner;  // lower corner
  Vec sides;   // strictly positive, finite
  int dim() const { return static_cast<int>(corner.size()); }
  double lo(int j) const { return corner[static_cast<std::size_t>(j)]; }
  double hi(int j) const {
    return corner[static_cast<std::size_t>(j)] + sides[static_cast<std::size_t>(j)];
  }
  double volume() const;
  bool contains(const Vec& x, bool closed) const;
};

// Intersection of two boxes; empty optional when the interiors are disjoint.
std::optional<Box> box_intersection(const Box& a, const Box& b);

// Exact Lebesgue measure of a finite union of (possibly overlapping) boxes.
double box_union_volume(const std::vector<Box>& boxes);

// Rewrites a finite union of boxes as pairwise disjoint boxes with the same
// union (up to measure zero). Fast path when the input is already disjoint.
std::vector<Box> disjoint_box_cover(const std::vector<Box>& boxes);

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

struct GeneralizedRectangle {
  std::vector<ExtendedInterval> intervals;  // product of open intervals
};

// Open planar sector of angle pi/n between the rays y = 0 and y = x tan(pi/n),
// n >= 3: { (x, y) : x > 0, 0 < y < x tan(pi/n) }.
struct Sector {
  int n = 3;
};

// Open equilateral triangle with side L, centroid at the origin, one side
// horizontal at the bottom: vertices (L/2, -sqrt(3)L/6), (0, sqrt(3)L/3),
// (-L/2, -sqrt(3)L/6).
struct EquilateralTriangle {
  double side = 1.0;
};

enum class RightTriangleAngle { PiOver4, PiOver3 };

// Open right triangle { (x, y) : 0 < x < L, 0 < y < x tan(theta) } with
// theta in {pi/4, pi/3}: vertices (0,0), (L,0), (L, L tan(theta)).
struct RightTriangle {
  RightTriangleAngle angle = RightTriangleAngle::PiOver4;
  double leg = 1.0;  // L
};

using PrimitiveDomain =
    std::variant<GeneralizedRectangle, Sector, EquilateralTriangle, RightTriangle>;

struct Product {
  std::vector<PrimitiveDomain> factors;  // at least two, dims add up
};

using Domain = std::variant<GeneralizedRectangle, Sector, EquilateralTriangle,
                            RightTriangle, Product>;

double right_triangle_tan(RightTriangleAngle a);

int domain_dim(const Domain& d);
bool domain_bounded(const Domain& d);
std::vector<ExtendedInterval> domain_bbox(const Domain& d);
bool contains_point(const Domain& d, const Vec& x, bool closed);
// True iff the open cube x + (0, rho)^d lies inside the (open) domain.
bool cube_in_domain(const Domain& d, const Vec& corner, double rho);
// Lower corner of some axis-parallel cube of side rho inside the domain, or
// nullopt when no such cube exists.
std::optional<Vec> cube_witness(const Domain& d, double rho);

// ---------------------------------------------------------------------------
// Thick sets (measurable subsets used as the observation set omega)
// ---------------------------------------------------------------------------

struct FullSpace {};

struct BoxUnion {
  std::vector<Box> boxes;
};

// Union over all integer vectors k of (base + k * period); every base box
// must lie inside the fundamental cell [0, period]^d.
struct PeriodicBoxUnion {
  Vec period;
  std::vector<Box> base;
};

using ThickSet = std::variant<FullSpace, BoxUnion, PeriodicBoxUnion>;

int thickset_dim(const ThickSet& ts);  // -1 for FullSpace (any dimension)
bool point_in_thickset(const ThickSet& ts, const Vec& x);
// All boxes of the set clipped to the window (translates materialized for the
// periodic case); may overlap.
std::vector<Box> materialize_boxes(const ThickSet& ts, const Box& window);
// Exact measure of (set intersect window).
double thickset_volume_in(const ThickSet& ts, const Box& window);

// ---------------------------------------------------------------------------
// Convex shapes (covering elements)
// ---------------------------------------------------------------------------

struct Triangle2 {
  std::array<std::array<double, 2>, 3> v;  // counter-clockwise
};

// box intersected with the half-plane { x2 < x1 * tan_theta }; used for the
// cusp elements of sector and right-triangle coverings.
struct SectorCap {
  Box box;
  double tan_theta = 1.0;
};

using PrimitiveShape = std::variant<Box, Triangle2, SectorCap>;

struct ProductShape {
  std::vector<PrimitiveShape> factors;  // at least two
};

using ConvexShape = std::variant<Box, Triangle2, SectorCap, ProductShape>;

int shape_dim(const ConvexShape& s);
double shape_volume(const ConvexShape& s);
// Vertex list of the (polytope) shape; exact for all supported shapes.
std::vector<Vec> shape_vertices(const ConvexShape& s);
double shape_diam(const ConvexShape& s);
Box shape_bbox(const ConvexShape& s);
bool shape_contains(const ConvexShape& s, const Vec& x, bool closed);
// True iff the open cube corner + (0, rho)^d lies in the open shape.
bool shape_contains_cube(const ConvexShape& s, const Vec& corner, double rho);
// Measure and diameter of the image under the linear map psi.
double psi_image_volume(const ConvexShape& s, const Mat& psi);
double psi_image_diam(const ConvexShape& s, const Mat& psi);

// Bounded domains as shapes (for integration); throws UnboundedDomain.
ConvexShape domain_to_shape(const Domain& d);

// Cartesian product of two shapes (factor lists concatenate).
ConvexShape shape_product(const ConvexShape& a, const ConvexShape& b);

// 2-D polygon helpers (exposed for tests).
using Pt2 = std::array<double, 2>;
double polygon_area(const std::vector<Pt2>& poly);
// Keeps the part with a*x + b*y <= c.
std::vector<Pt2> clip_polygon_halfplane(std::vector<Pt2> poly, double a, double b, double c);
std::vector<Pt2> primitive_polygon(const PrimitiveShape& s);  // 2-D primitives only

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureSpec {
  int rule_order = 16;        // Gauss-Legendre points per axis per cell
  int base_subdivision = 4;   // initial cells per unit length per axis
  double rel_tol = 1e-8;      // target relative error of the integral
  int max_depth = 12;         // maximum refinement depth below the base grid
  long mc_samples = 1000000;  // Monte Carlo sample budget (validation paths)
  std::uint64_t seed = 0;     // seed for Monte Carlo paths
};

struct IntegralResult {
  Cplx value{0.0, 0.0};
  double abs_error = 0.0;
  bool converged = true;
};

struct VecIntegralResult {
  Vec value;
  double abs_error = 0.0;
  bool converged = true;
};

// Integral of f over (region intersect mask); mask == nullptr integrates over
// the whole region. Region clipping is exact (interval clipping per axis,
// polygon clipping plus Duffy-transformed Gauss rules on triangles); the mask
// is decomposed into disjoint boxes and handled exactly. Adaptive dyadic
// refinement of the base grid controls the quadrature error of f.
IntegralResult integrate_on(const ConvexShape& region, const ThickSet* mask,
                            const std::function<Cplx(const Vec&)>& f,
                            const QuadratureSpec& spec);

// Vector-valued variant: f writes `components` doubles per point; each
// component is converged separately.
VecIntegralResult integrate_on_vec(const ConvexShape& region, const ThickSet* mask,
                                   int components,
                                   const std::function<void(const Vec&, double*)>& f,
                                   const QuadratureSpec& spec);

// Exact measure of (box region intersect mask).
double intersect_volume(const Box& region, const ThickSet& mask);

// ---------------------------------------------------------------------------
// Thickness
// ---------------------------------------------------------------------------

struct ThicknessResult {
  double gamma = 0.0;   // inf over admissible cubes of |mask ∩ cube| / rho^d
  double rho = 0.0;
  Vec witness_x;        // corner of a cube attaining (or approaching) gamma
  bool thick = false;   // gamma > 0
  bool exact = false;   // true when computed by the exact breakpoint sweep
};

// Evaluates gamma(rho) = inf { |mask ∩ (x + (0,rho)^d)| : x + (0,rho)^d ⊂ domain } / rho^d.
// Exact breakpoint sweep for generalized rectangles (periodic masks required
// on unbounded axes); Monte Carlo over cube positions for bounded non-
// rectangular domains. Throws NoCubeFits when no cube of side rho fits.
ThicknessResult thickness_of(const Domain& domain, const ThickSet& mask, double rho,
                             const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// JSON (schema-checked; errors carry a JSON path such as "$.domain.factors[1]")
// ---------------------------------------------------------------------------

Json domain_to_json(const Domain& d);
Domain domain_from_json(const Json& j, const std::string& path);
Json thickset_to_json(const ThickSet& ts);
ThickSet thickset_from_json(const Json& j, const std::string& path);
Json box_to_json(const Box& b);
Box box_from_json(const Json& j, const std::string& path);
Json quadrature_to_json(const QuadratureSpec& q);
QuadratureSpec quadrature_from_json(const Json& j, const std::string& path);
Json mat_to_json(const Mat& m);
Mat mat_from_json(const Json& j, const std::string& path);
Json shape_to_json(const ConvexShape& s);
ConvexShape shape_from_json(const Json& j, const std::string& path);

// Schema helpers shared by the other modules' parsers.
const Json& require_field(const Json& j, const char* name, const std::string& path);
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& path);
double number_field(const Json& j, const std::string& path);       // finite number
double extended_number(const Json& j, const std::string& path);    // number or "+inf"/"-inf"
std::int64_t integer_field(const Json& j, const std::string& path);
std::string string_field(const Json& j, const std::string& path);
Vec vec_field(const Json& j, const std::string& path);
Json extended_to_json(double v);

}  // namespace lsv
