#include "lsverify/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

namespace lsv {

namespace {

double sq(double x) { return x * x; }

double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Mat
// ---------------------------------------------------------------------------

Mat Mat::identity(int n) {
  Mat m;
  m.n = n;
  m.a.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(const Vec& d) {
  Mat m = identity(static_cast<int>(d.size()));
  for (int i = 0; i < m.n; ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

Vec Mat::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != n) {
    throw Error(Errc::InvalidArgument, "matrix/vector dimension mismatch");
  }
  Vec y(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += at(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

double Mat::det() const {
  Mat lu = *this;
  double d = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(lu.at(r, c)) > std::abs(lu.at(pivot, c))) pivot = r;
    }
    if (lu.at(pivot, c) == 0.0) return 0.0;
    if (pivot != c) {
      for (int j = 0; j < n; ++j) std::swap(lu.at(pivot, j), lu.at(c, j));
      d = -d;
    }
    d *= lu.at(c, c);
    for (int r = c + 1; r < n; ++r) {
      double factor = lu.at(r, c) / lu.at(c, c);
      for (int j = c; j < n; ++j) lu.at(r, j) -= factor * lu.at(c, j);
    }
  }
  return d;
}

Mat block_diag(const Mat& A, const Mat& B) {
  Mat m;
  m.n = A.n + B.n;
  m.a.assign(static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n), 0.0);
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j) m.at(i, j) = A.at(i, j);
  for (int i = 0; i < B.n; ++i)
    for (int j = 0; j < B.n; ++j) m.at(A.n + i, A.n + j) = B.at(i, j);
  return m;
}

Mat scaled(const Mat& A, double s) {
  Mat m = A;
  for (double& v : m.a) v *= s;
  return m;
}

// ---------------------------------------------------------------------------
// Box
// ---------------------------------------------------------------------------

double Box::volume() const {
  double v = 1.0;
  for (double s : sides) v *= s;
  return v;
}

bool Box::contains(const Vec& x, bool closed) const {
  for (int j = 0; j < dim(); ++j) {
    double xv = x[static_cast<std::size_t>(j)];
    if (closed) {
      if (xv < lo(j) || xv > hi(j)) return false;
    } else {
      if (xv <= lo(j) || xv >= hi(j)) return false;
    }
  }
  return true;
}

std::optional<Box> box_intersection(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::InvalidArgument, "box dimension mismatch in intersection");
  }
  Box out;
  out.corner.resize(a.corner.size());
  out.sides.resize(a.sides.size());
  for (int j = 0; j < a.dim(); ++j) {
    double lo = std::max(a.lo(j), b.lo(j));
    double hi = std::min(a.hi(j), b.hi(j));
    if (hi - lo <= 0.0) return std::nullopt;
    out.corner[static_cast<std::size_t>(j)] = lo;
    out.sides[static_cast<std::size_t>(j)] = hi - lo;
  }
  return out;
}

namespace {

bool boxes_interior_overlap(const Box& a, const Box& b) {
  for (int j = 0; j < a.dim(); ++j) {
    if (std::min(a.hi(j), b.hi(j)) - std::max(a.lo(j), b.lo(j)) <= 0.0) return false;
  }
  return true;
}

bool pairwise_disjoint(const std::vector<Box>& boxes) {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t k = i + 1; k < boxes.size(); ++k) {
      if (boxes_interior_overlap(boxes[i], boxes[k])) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Box> disjoint_box_cover(const std::vector<Box>& boxes) {
  if (boxes.empty()) return {};
  const int d = boxes.front().dim();
  for (const Box& b : boxes) {
    if (b.dim() != d) throw Error(Errc::InvalidArgument, "box dimension mismatch in union");
  }
  if (pairwise_disjoint(boxes)) return boxes;

  // Coordinate-grid decomposition: the edges of all boxes cut space into grid
  // cells, each of which is either fully inside some box or disjoint from all.
  std::vector<Vec> coords(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    std::set<double> s;
    for (const Box& b : boxes) {
      s.insert(b.lo(j));
      s.insert(b.hi(j));
    }
    coords[static_cast<std::size_t>(j)].assign(s.begin(), s.end());
  }
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    total *= coords[static_cast<std::size_t>(j)].size() - 1;
    if (total > 400000) {
      throw Error(Errc::InvalidArgument, "box union too complex to decompose");
    }
  }
  std::vector<Box> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t cell = 0; cell < total; ++cell) {
    Box c;
    c.corner.resize(static_cast<std::size_t>(d));
    c.sides.resize(static_cast<std::size_t>(d));
    Vec center(static_cast<std::size_t>(d));
    std::size_t rem = cell;
    for (int j = 0; j < d; ++j) {
      const Vec& cj = coords[static_cast<std::size_t>(j)];
      std::size_t nj = cj.size() - 1;
      std::size_t ij = rem % nj;
      rem /= nj;
      c.corner[static_cast<std::size_t>(j)] = cj[ij];
      c.sides[static_cast<std::size_t>(j)] = cj[ij + 1] - cj[ij];
      center[static_cast<std::size_t>(j)] = 0.5 * (cj[ij] + cj[ij + 1]);
    }
    if (c.volume() <= 0.0) continue;
    for (const Box& b : boxes) {
      if (b.contains(center, false)) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

double box_union_volume(const std::vector<Box>& boxes) {
  double v = 0.0;
  for (const Box& b : disjoint_box_cover(boxes)) v += b.volume();
  return v;
}

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

double right_triangle_tan(RightTriangleAngle a) {
  return a == RightTriangleAngle::PiOver4 ? 1.0 : std::sqrt(3.0);
}

namespace {

int primitive_dim(const PrimitiveDomain& p) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
          return static_cast<int>(v.intervals.size());
        } else {
          return 2;
        }
      },
      p);
}

bool primitive_bounded(const PrimitiveDomain& p) {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
          for (const auto& iv : v.intervals) {
            if (!iv.bounded()) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Sector>) {
          return false;
        } else {
          return true;
        }
      },
      p);
}

std::vector<ExtendedInterval> primitive_bbox(const PrimitiveDomain& p) {
  return std::visit(
      [](const auto& v) -> std::vector<ExtendedInterval> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
          return v.intervals;
        } else if constexpr (std::is_same_v<T, Sector>) {
          return {{0.0, kInf}, {0.0, kInf}};
        } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
          double L = v.side;
          return {{-L / 2.0, L / 2.0}, {-std::sqrt(3.0) * L / 6.0, std::sqrt(3.0) * L / 3.0}};
        } else {
          double t = right_triangle_tan(v.angle);
          return {{0.0, v.leg}, {0.0, v.leg * t}};
        }
      },
      p);
}

// Closed test gives membership in the closure; open test membership in the
// open set.
bool primitive_contains(const PrimitiveDomain& p, const double* x, bool closed) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        auto cmp_lo = [&](double val, double bound) {
          return closed ? val >= bound : val > bound;
        };
        auto cmp_hi = [&](double val, double bound) {
          return closed ? val <= bound : val < bound;
        };
        if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
          for (std::size_t j = 0; j < v.intervals.size(); ++j) {
            const auto& iv = v.intervals[j];
            if (iv.lo > -kInf && !cmp_lo(x[j], iv.lo)) return false;
            if (iv.hi < kInf && !cmp_hi(x[j], iv.hi)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Sector>) {
          double t = std::tan(kPi / v.n);
          return cmp_lo(x[0], 0.0) && cmp_lo(x[1], 0.0) && cmp_hi(x[1], x[0] * t);
        } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
          // Half-planes of the CCW triangle (L/2,-s), (0,2s), (-L/2,-s) with
          // s = sqrt(3) L / 6.
          double L = v.side;
          double s = std::sqrt(3.0) * L / 6.0;
          std::array<Pt2, 3> verts = {{{L / 2.0, -s}, {0.0, 2.0 * s}, {-L / 2.0, -s}}};
          for (int e = 0; e < 3; ++e) {
            const Pt2& a = verts[static_cast<std::size_t>(e)];
            const Pt2& b = verts[static_cast<std::size_t>((e + 1) % 3)];
            double cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
            if (closed ? cross < 0.0 : cross <= 0.0) return false;
          }
          return true;
        } else {
          double t = right_triangle_tan(v.angle);
          return cmp_lo(x[0], 0.0) && cmp_hi(x[0], v.leg) && cmp_lo(x[1], 0.0) &&
                 cmp_hi(x[1], x[0] * t);
        }
      },
      p);
}

std::vector<PrimitiveDomain> domain_factors(const Domain& d) {
  if (const auto* prod = std::get_if<Product>(&d)) {
    if (prod->factors.size() < 2) {
      throw Error(Errc::InvalidArgument, "product domain needs at least two factors");
    }
    return prod->factors;
  }
  return std::visit(
      [](const auto& v) -> std::vector<PrimitiveDomain> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Product>) {
          return v.factors;  // unreachable, handled above
        } else {
          return {PrimitiveDomain(v)};
        }
      },
      d);
}

std::optional<Vec> primitive_cube_witness(const PrimitiveDomain& p, double rho);

}  // namespace

int domain_dim(const Domain& d) {
  int n = 0;
  for (const auto& f : domain_factors(d)) n += primitive_dim(f);
  return n;
}

bool domain_bounded(const Domain& d) {
  for (const auto& f : domain_factors(d)) {
    if (!primitive_bounded(f)) return false;
  }
  return true;
}

std::vector<ExtendedInterval> domain_bbox(const Domain& d) {
  std::vector<ExtendedInterval> out;
  for (const auto& f : domain_factors(d)) {
    auto b = primitive_bbox(f);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

bool contains_point(const Domain& d, const Vec& x, bool closed) {
  if (static_cast<int>(x.size()) != domain_dim(d)) {
    throw Error(Errc::InvalidArgument, "point dimension does not match domain");
  }
  std::size_t off = 0;
  for (const auto& f : domain_factors(d)) {
    if (!primitive_contains(f, x.data() + off, closed)) return false;
    off += static_cast<std::size_t>(primitive_dim(f));
  }
  return true;
}

bool cube_in_domain(const Domain& d, const Vec& corner, double rho) {
  const int n = domain_dim(d);
  if (static_cast<int>(corner.size()) != n) {
    throw Error(Errc::InvalidArgument, "cube corner dimension does not match domain");
  }
  if (rho <= 0.0) throw Error(Errc::InvalidArgument, "cube side must be positive");
  // All supported domains are convex, so the closed cube lies in the closure
  // iff all its corners do; an open cube inside the closure of a convex open
  // set lies inside the set itself.
  Vec p(corner.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int j = 0; j < n; ++j) {
      p[static_cast<std::size_t>(j)] =
          corner[static_cast<std::size_t>(j)] + ((mask >> j) & 1u ? rho : 0.0);
    }
    if (!contains_point(d, p, true)) return false;
  }
  return true;
}

namespace {

std::optional<Vec> primitive_cube_witness(const PrimitiveDomain& p, double rho) {
  return std::visit(
      [&](const auto& v) -> std::optional<Vec> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
          Vec corner;
          for (const auto& iv : v.intervals) {
            if (iv.bounded()) {
              if (iv.length() < rho) return std::nullopt;
              corner.push_back(iv.lo);
            } else if (iv.lo > -kInf) {
              corner.push_back(iv.lo);
            } else if (iv.hi < kInf) {
              corner.push_back(iv.hi - rho);
            } else {
              corner.push_back(0.0);
            }
          }
          return corner;
        } else if constexpr (std::is_same_v<T, Sector>) {
          double cot = 1.0 / std::tan(kPi / v.n);
          return Vec{rho * cot, 0.0};
        } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
          // Largest axis-parallel square sits on the base; side bh/(b+h) with
          // b = L, h = sqrt(3)L/2, so a rho-square fits iff
          // L >= (3 + 2 sqrt(3)) rho / 3.
          Vec corner{-rho / 2.0, -std::sqrt(3.0) * v.side / 6.0};
          PrimitiveDomain self(v);
          Vec q(2);
          for (int mask = 0; mask < 4; ++mask) {
            q[0] = corner[0] + ((mask & 1) != 0 ? rho : 0.0);
            q[1] = corner[1] + ((mask & 2) != 0 ? rho : 0.0);
            if (!primitive_contains(self, q.data(), true)) return std::nullopt;
          }
          return corner;
        } else {
          double t = right_triangle_tan(v.angle);
          double cot = 1.0 / t;
          // Cube with corner (rho cot(theta), 0) needs x-extent rho(1+cot) <= L.
          if (v.leg < rho * (1.0 + cot)) return std::nullopt;
          return Vec{rho * cot, 0.0};
        }
      },
      p);
}

}  // namespace

std::optional<Vec> cube_witness(const Domain& d, double rho) {
  if (rho <= 0.0) throw Error(Errc::InvalidArgument, "cube side must be positive");
  Vec corner;
  for (const auto& f : domain_factors(d)) {
    auto w = primitive_cube_witness(f, rho);
    if (!w) return std::nullopt;
    corner.insert(corner.end(), w->begin(), w->end());
  }
  return corner;
}

// ---------------------------------------------------------------------------
// Thick sets
// ---------------------------------------------------------------------------

namespace {

void validate_thickset(const ThickSet& ts) {
  if (const auto* bu = std::get_if<BoxUnion>(&ts)) {
    if (bu->boxes.empty()) throw Error(Errc::InvalidArgument, "box union must be nonempty");
    int d = bu->boxes.front().dim();
    for (const Box& b : bu->boxes) {
      if (b.dim() != d) throw Error(Errc::InvalidArgument, "box union dimension mismatch");
      for (double s : b.sides) {
        if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "box sides must be positive");
      }
    }
  } else if (const auto* pu = std::get_if<PeriodicBoxUnion>(&ts)) {
    if (pu->base.empty()) throw Error(Errc::InvalidArgument, "periodic base must be nonempty");
    int d = static_cast<int>(pu->period.size());
    for (double p : pu->period) {
      if (!(p > 0.0) || p == kInf) {
        throw Error(Errc::InvalidArgument, "periods must be positive and finite");
      }
    }
    for (const Box& b : pu->base) {
      if (b.dim() != d) throw Error(Errc::InvalidArgument, "periodic base dimension mismatch");
      for (int j = 0; j < d; ++j) {
        if (!(b.sides[static_cast<std::size_t>(j)] > 0.0)) {
          throw Error(Errc::InvalidArgument, "box sides must be positive");
        }
        double tol = 1e-9 * pu->period[static_cast<std::size_t>(j)];
        if (b.lo(j) < -tol || b.hi(j) > pu->period[static_cast<std::size_t>(j)] + tol) {
          throw Error(Errc::InvalidArgument,
                      "periodic base boxes must lie inside one fundamental cell");
        }
      }
    }
  }
}

}  // namespace

int thickset_dim(const ThickSet& ts) {
  if (std::holds_alternative<FullSpace>(ts)) return -1;
  if (const auto* bu = std::get_if<BoxUnion>(&ts)) return bu->boxes.front().dim();
  return static_cast<int>(std::get<PeriodicBoxUnion>(ts).period.size());
}

bool point_in_thickset(const ThickSet& ts, const Vec& x) {
  validate_thickset(ts);
  if (std::holds_alternative<FullSpace>(ts)) return true;
  if (const auto* bu = std::get_if<BoxUnion>(&ts)) {
    if (static_cast<int>(x.size()) != bu->boxes.front().dim()) {
      throw Error(Errc::InvalidArgument, "point dimension does not match box union");
    }
    for (const Box& b : bu->boxes) {
      if (b.contains(x, true)) return true;
    }
    return false;
  }
  const auto& pu = std::get<PeriodicBoxUnion>(ts);
  if (x.size() != pu.period.size()) {
    throw Error(Errc::InvalidArgument, "point dimension does not match periodic set");
  }
  Vec r(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    double p = pu.period[j];
    double v = std::fmod(x[j], p);
    if (v < 0.0) v += p;
    r[j] = v;
  }
  // Base boxes live in [0, P]^d and r in [0, P)^d, so per axis the point can
  // meet a box either directly or via the representative r + P (which only
  // matters when the box touches the right cell boundary).
  for (const Box& b : pu.base) {
    bool inside = true;
    for (std::size_t j = 0; j < x.size(); ++j) {
      int jj = static_cast<int>(j);
      bool direct = r[j] >= b.lo(jj) && r[j] <= b.hi(jj);
      double rp = r[j] + pu.period[j];
      bool wrapped = rp >= b.lo(jj) && rp <= b.hi(jj);
      if (!direct && !wrapped) {
        inside = false;
        break;
      }
    }
    if (inside) return true;
  }
  return false;
}

std::vector<Box> materialize_boxes(const ThickSet& ts, const Box& window) {
  validate_thickset(ts);
  std::vector<Box> out;
  if (std::holds_alternative<FullSpace>(ts)) {
    out.push_back(window);
    return out;
  }
  if (const auto* bu = std::get_if<BoxUnion>(&ts)) {
    for (const Box& b : bu->boxes) {
      if (auto c = box_intersection(b, window)) out.push_back(*c);
    }
    return out;
  }
  const auto& pu = std::get<PeriodicBoxUnion>(ts);
  const int d = window.dim();
  if (static_cast<int>(pu.period.size()) != d) {
    throw Error(Errc::InvalidArgument, "window dimension does not match periodic set");
  }
  std::vector<long> kmin(static_cast<std::size_t>(d));
  std::vector<long> kcount(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    double p = pu.period[static_cast<std::size_t>(j)];
    long lo = static_cast<long>(std::floor(window.lo(j) / p)) - 1;
    long hi = static_cast<long>(std::floor(window.hi(j) / p)) + 1;
    kmin[static_cast<std::size_t>(j)] = lo;
    kcount[static_cast<std::size_t>(j)] = hi - lo + 1;
    total *= static_cast<std::size_t>(hi - lo + 1);
    if (total > 2000000) {
      throw Error(Errc::InvalidArgument, "window spans too many periods");
    }
  }
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t rem = cell;
    Vec shift(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      long cnt = kcount[static_cast<std::size_t>(j)];
      long kj = kmin[static_cast<std::size_t>(j)] + static_cast<long>(rem % static_cast<std::size_t>(cnt));
      rem /= static_cast<std::size_t>(cnt);
      shift[static_cast<std::size_t>(j)] =
          static_cast<double>(kj) * pu.period[static_cast<std::size_t>(j)];
    }
    for (const Box& b : pu.base) {
      Box t = b;
      for (int j = 0; j < d; ++j) t.corner[static_cast<std::size_t>(j)] += shift[static_cast<std::size_t>(j)];
      if (auto c = box_intersection(t, window)) out.push_back(*c);
    }
  }
  return out;
}

double thickset_volume_in(const ThickSet& ts, const Box& window) {
  return box_union_volume(materialize_boxes(ts, window));
}

// ---------------------------------------------------------------------------
// Polygon helpers
// ---------------------------------------------------------------------------

namespace {

double polygon_signed_area(const std::vector<Pt2>& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt2& a = poly[i];
    const Pt2& b = poly[(i + 1) % n];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

}  // namespace

double polygon_area(const std::vector<Pt2>& poly) {
  if (poly.size() < 3) return 0.0;
  return std::abs(polygon_signed_area(poly));
}

std::vector<Pt2> clip_polygon_halfplane(std::vector<Pt2> poly, double a, double b, double c) {
  if (poly.empty()) return {};
  std::vector<Pt2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt2& cur = poly[i];
    const Pt2& nxt = poly[(i + 1) % n];
    double fc = a * cur[0] + b * cur[1] - c;
    double fn = a * nxt[0] + b * nxt[1] - c;
    if (fc <= 0.0) out.push_back(cur);
    if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
      double t = fc / (fc - fn);
      out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
    }
  }
  return out;
}

std::vector<Pt2> primitive_polygon(const PrimitiveShape& s) {
  return std::visit(
      [](const auto& v) -> std::vector<Pt2> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (v.dim() != 2) {
            throw Error(Errc::InvalidArgument, "primitive_polygon expects a 2-D shape");
          }
          return {{v.lo(0), v.lo(1)}, {v.hi(0), v.lo(1)}, {v.hi(0), v.hi(1)}, {v.lo(0), v.hi(1)}};
        } else if constexpr (std::is_same_v<T, Triangle2>) {
          return {v.v[0], v.v[1], v.v[2]};
        } else {
          std::vector<Pt2> rect = {{v.box.lo(0), v.box.lo(1)},
                                   {v.box.hi(0), v.box.lo(1)},
                                   {v.box.hi(0), v.box.hi(1)},
                                   {v.box.lo(0), v.box.hi(1)}};
          // keep x2 <= x1 * tan_theta, i.e. -tan_theta * x1 + x2 <= 0
          return clip_polygon_halfplane(std::move(rect), -v.tan_theta, 1.0, 0.0);
        }
      },
      s);
}

// ---------------------------------------------------------------------------
// Convex shapes
// ---------------------------------------------------------------------------

namespace {

int primitive_shape_dim(const PrimitiveShape& s) {
  if (const auto* b = std::get_if<Box>(&s)) return b->dim();
  return 2;
}

std::vector<PrimitiveShape> shape_factors(const ConvexShape& s) {
  if (const auto* p = std::get_if<ProductShape>(&s)) {
    if (p->factors.size() < 2) {
      throw Error(Errc::InvalidArgument, "product shape needs at least two factors");
    }
    return p->factors;
  }
  return std::visit(
      [](const auto& v) -> std::vector<PrimitiveShape> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductShape>) {
          return v.factors;  // unreachable
        } else {
          return {PrimitiveShape(v)};
        }
      },
      s);
}

double primitive_shape_volume(const PrimitiveShape& s) {
  if (const auto* b = std::get_if<Box>(&s)) return b->volume();
  return polygon_area(primitive_polygon(s));
}

std::vector<Vec> primitive_shape_vertices(const PrimitiveShape& s) {
  if (const auto* b = std::get_if<Box>(&s)) {
    const int d = b->dim();
    std::vector<Vec> out;
    out.reserve(std::size_t{1} << d);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
      Vec v(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) {
        v[static_cast<std::size_t>(j)] = ((mask >> j) & 1u) != 0 ? b->hi(j) : b->lo(j);
      }
      out.push_back(std::move(v));
    }
    return out;
  }
  std::vector<Vec> out;
  for (const Pt2& p : primitive_polygon(s)) out.push_back(Vec{p[0], p[1]});
  return out;
}

bool primitive_shape_contains(const PrimitiveShape& s, const double* x, bool closed) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          for (int j = 0; j < v.dim(); ++j) {
            if (closed) {
              if (x[j] < v.lo(j) || x[j] > v.hi(j)) return false;
            } else {
              if (x[j] <= v.lo(j) || x[j] >= v.hi(j)) return false;
            }
          }
          return true;
        } else if constexpr (std::is_same_v<T, Triangle2>) {
          for (int e = 0; e < 3; ++e) {
            const Pt2& a = v.v[static_cast<std::size_t>(e)];
            const Pt2& b = v.v[static_cast<std::size_t>((e + 1) % 3)];
            double cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
            if (closed ? cross < 0.0 : cross <= 0.0) return false;
          }
          return true;
        } else {
          for (int j = 0; j < 2; ++j) {
            if (closed) {
              if (x[j] < v.box.lo(j) || x[j] > v.box.hi(j)) return false;
            } else {
              if (x[j] <= v.box.lo(j) || x[j] >= v.box.hi(j)) return false;
            }
          }
          double f = x[1] - x[0] * v.tan_theta;
          return closed ? f <= 0.0 : f < 0.0;
        }
      },
      s);
}

}  // namespace

int shape_dim(const ConvexShape& s) {
  int n = 0;
  for (const auto& f : shape_factors(s)) n += primitive_shape_dim(f);
  return n;
}

double shape_volume(const ConvexShape& s) {
  double v = 1.0;
  for (const auto& f : shape_factors(s)) v *= primitive_shape_volume(f);
  return v;
}

std::vector<Vec> shape_vertices(const ConvexShape& s) {
  std::vector<Vec> acc{Vec{}};
  for (const auto& f : shape_factors(s)) {
    std::vector<Vec> fv = primitive_shape_vertices(f);
    std::vector<Vec> next;
    next.reserve(acc.size() * fv.size());
    if (acc.size() * fv.size() > 65536) {
      throw Error(Errc::InvalidArgument, "shape has too many vertices");
    }
    for (const Vec& a : acc) {
      for (const Vec& b : fv) {
        Vec v = a;
        v.insert(v.end(), b.begin(), b.end());
        next.push_back(std::move(v));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

double shape_diam(const ConvexShape& s) {
  std::vector<Vec> verts = shape_vertices(s);
  double best = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t k = i + 1; k < verts.size(); ++k) {
      best = std::max(best, dist(verts[i], verts[k]));
    }
  }
  return best;
}

Box shape_bbox(const ConvexShape& s) {
  std::vector<Vec> verts = shape_vertices(s);
  if (verts.empty() || verts.front().empty()) {
    throw Error(Errc::InvalidArgument, "empty shape has no bounding box");
  }
  const std::size_t d = verts.front().size();
  Vec lo(d, kInf);
  Vec hi(d, -kInf);
  for (const Vec& v : verts) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
  }
  Box b;
  b.corner = lo;
  b.sides.resize(d);
  for (std::size_t j = 0; j < d; ++j) b.sides[j] = hi[j] - lo[j];
  return b;
}

bool shape_contains(const ConvexShape& s, const Vec& x, bool closed) {
  if (static_cast<int>(x.size()) != shape_dim(s)) {
    throw Error(Errc::InvalidArgument, "point dimension does not match shape");
  }
  std::size_t off = 0;
  for (const auto& f : shape_factors(s)) {
    if (!primitive_shape_contains(f, x.data() + off, closed)) return false;
    off += static_cast<std::size_t>(primitive_shape_dim(f));
  }
  return true;
}

bool shape_contains_cube(const ConvexShape& s, const Vec& corner, double rho) {
  const int n = shape_dim(s);
  if (static_cast<int>(corner.size()) != n) {
    throw Error(Errc::InvalidArgument, "cube corner dimension does not match shape");
  }
  Vec p(corner.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int j = 0; j < n; ++j) {
      p[static_cast<std::size_t>(j)] =
          corner[static_cast<std::size_t>(j)] + ((mask >> j) & 1u ? rho : 0.0);
    }
    if (!shape_contains(s, p, true)) return false;
  }
  return true;
}

double psi_image_volume(const ConvexShape& s, const Mat& psi) {
  if (psi.n != shape_dim(s)) {
    throw Error(Errc::InvalidArgument, "linear map dimension does not match shape");
  }
  return std::abs(psi.det()) * shape_volume(s);
}

double psi_image_diam(const ConvexShape& s, const Mat& psi) {
  if (psi.n != shape_dim(s)) {
    throw Error(Errc::InvalidArgument, "linear map dimension does not match shape");
  }
  std::vector<Vec> verts = shape_vertices(s);
  std::vector<Vec> image;
  image.reserve(verts.size());
  for (const Vec& v : verts) image.push_back(psi.apply(v));
  double best = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    for (std::size_t k = i + 1; k < image.size(); ++k) {
      best = std::max(best, dist(image[i], image[k]));
    }
  }
  return best;
}

ConvexShape domain_to_shape(const Domain& d) {
  if (!domain_bounded(d)) {
    throw Error(Errc::UnboundedDomain, "only bounded domains convert to shapes");
  }
  std::vector<PrimitiveShape> factors;
  for (const auto& f : domain_factors(d)) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
            Box b;
            for (const auto& iv : v.intervals) {
              b.corner.push_back(iv.lo);
              b.sides.push_back(iv.length());
            }
            factors.push_back(b);
          } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
            double L = v.side;
            double s = std::sqrt(3.0) * L / 6.0;
            Triangle2 t;
            t.v = {{{L / 2.0, -s}, {0.0, 2.0 * s}, {-L / 2.0, -s}}};
            factors.push_back(t);
          } else if constexpr (std::is_same_v<T, RightTriangle>) {
            double tan = right_triangle_tan(v.angle);
            Triangle2 t;
            t.v = {{{0.0, 0.0}, {v.leg, 0.0}, {v.leg, v.leg * tan}}};
            factors.push_back(t);
          } else {
            throw Error(Errc::UnboundedDomain, "sector domains are unbounded");
          }
        },
        f);
  }
  if (factors.size() == 1) {
    return std::visit([](const auto& v) -> ConvexShape { return v; }, factors.front());
  }
  ProductShape p;
  p.factors = std::move(factors);
  return p;
}

ConvexShape shape_product(const ConvexShape& a, const ConvexShape& b) {
  ProductShape p;
  for (const auto& f : shape_factors(a)) p.factors.push_back(f);
  for (const auto& f : shape_factors(b)) p.factors.push_back(f);
  return p;
}

// ---------------------------------------------------------------------------
// Quadrature engine
// ---------------------------------------------------------------------------

namespace {

struct SegFactor {
  int axis;
  double lo, hi;
};

struct PolyFactor {
  int axis;  // occupies axes (axis, axis + 1)
  std::vector<Pt2> poly;
};

using Factor = std::variant<SegFactor, PolyFactor>;

std::vector<Factor> factorize_shape(const ConvexShape& s) {
  std::vector<Factor> out;
  int axis = 0;
  for (const auto& f : shape_factors(s)) {
    if (const auto* b = std::get_if<Box>(&f)) {
      for (int j = 0; j < b->dim(); ++j) {
        out.push_back(SegFactor{axis + j, b->lo(j), b->hi(j)});
      }
      axis += b->dim();
    } else {
      std::vector<Pt2> poly = primitive_polygon(f);
      if (polygon_signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
      out.push_back(PolyFactor{axis, std::move(poly)});
      axis += 2;
    }
  }
  return out;
}

// Quadrature nodes covering (factor ∩ cell) for a group of 1 or 2 axes.
struct NodeGroup {
  std::vector<int> axes;
  std::vector<double> coords;  // size() * axes.size(), interleaved per node
  Vec weights;
  std::size_t size() const { return weights.size(); }
};

// Nodes of the Gauss-Legendre rule transplanted to [a, b].
void seg_nodes(const QuadRule& rule, int axis, double a, double b, NodeGroup* out) {
  out->axes = {axis};
  const double len = b - a;
  out->coords.resize(rule.x.size());
  out->weights.resize(rule.x.size());
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    out->coords[i] = a + len * rule.x[i];
    out->weights[i] = len * rule.w[i];
  }
}

// Tensor nodes on a rectangle.
void rect_nodes(const QuadRule& rule, int axis, double ax, double bx, double ay, double by,
                NodeGroup* out) {
  out->axes = {axis, axis + 1};
  const std::size_t n = rule.x.size();
  out->coords.resize(2 * n * n);
  out->weights.resize(n * n);
  const double lx = bx - ax;
  const double ly = by - ay;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out->coords[2 * k] = ax + lx * rule.x[i];
      out->coords[2 * k + 1] = ay + ly * rule.x[j];
      out->weights[k] = lx * ly * rule.w[i] * rule.w[j];
      ++k;
    }
  }
}

// Duffy-transformed tensor Gauss nodes on the triangle (a, b, c):
// x(u, v) = a (1-u) + b u (1-v) + c u v, |Jacobian| = 2 Area u.
void triangle_nodes(const QuadRule& rule, const Pt2& a, const Pt2& b, const Pt2& c,
                    NodeGroup* out) {
  const std::size_t n = rule.x.size();
  const double area2 = std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  const std::size_t base = out->weights.size();
  out->coords.resize(2 * (base + n * n));
  out->weights.resize(base + n * n);
  std::size_t k = base;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rule.x[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rule.x[j];
      out->coords[2 * k] = a[0] * (1.0 - u) + b[0] * u * (1.0 - v) + c[0] * u * v;
      out->coords[2 * k + 1] = a[1] * (1.0 - u) + b[1] * u * (1.0 - v) + c[1] * u * v;
      out->weights[k] = rule.w[i] * rule.w[j] * area2 * u;
      ++k;
    }
  }
}

struct CellEvaluator {
  const std::vector<Factor>* factors;
  const QuadRule* rule;
  int dim;
  int components;
  const std::function<void(const Vec&, double*)>* f;

  // Accumulates the integral of f over (shape ∩ cell) into out[0..k).
  // Returns false when the intersection is empty (out untouched).
  bool eval(const Box& cell, double* out) const {
    std::vector<NodeGroup> groups;
    groups.reserve(factors->size());
    for (const Factor& fac : *factors) {
      NodeGroup g;
      if (const auto* seg = std::get_if<SegFactor>(&fac)) {
        double a = std::max(seg->lo, cell.lo(seg->axis));
        double b = std::min(seg->hi, cell.hi(seg->axis));
        if (b - a <= 0.0) return false;
        seg_nodes(*rule, seg->axis, a, b, &g);
      } else {
        const auto& pf = std::get<PolyFactor>(fac);
        const int ax = pf.axis;
        const double lx = cell.lo(ax), hx = cell.hi(ax);
        const double ly = cell.lo(ax + 1), hy = cell.hi(ax + 1);
        std::vector<Pt2> poly = pf.poly;
        poly = clip_polygon_halfplane(std::move(poly), -1.0, 0.0, -lx);
        poly = clip_polygon_halfplane(std::move(poly), 1.0, 0.0, hx);
        poly = clip_polygon_halfplane(std::move(poly), 0.0, -1.0, -ly);
        poly = clip_polygon_halfplane(std::move(poly), 0.0, 1.0, hy);
        double area = polygon_area(poly);
        if (area <= 0.0) return false;
        double rect_area = (hx - lx) * (hy - ly);
        if (std::abs(area - rect_area) <= 1e-13 * rect_area) {
          rect_nodes(*rule, ax, lx, hx, ly, hy, &g);
        } else {
          g.axes = {ax, ax + 1};
          if (polygon_signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
          for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
            triangle_nodes(*rule, poly[0], poly[t], poly[t + 1], &g);
          }
        }
      }
      if (g.size() == 0) return false;
      groups.push_back(std::move(g));
    }

    std::size_t total = 1;
    for (const NodeGroup& g : groups) total *= g.size();
    Vec x(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(components));
    for (std::size_t node = 0; node < total; ++node) {
      std::size_t rem = node;
      double w = 1.0;
      for (const NodeGroup& g : groups) {
        std::size_t i = rem % g.size();
        rem /= g.size();
        w *= g.weights[i];
        for (std::size_t a = 0; a < g.axes.size(); ++a) {
          x[static_cast<std::size_t>(g.axes[a])] = g.coords[i * g.axes.size() + a];
        }
      }
      (*f)(x, tmp.data());
      for (int c = 0; c < components; ++c) {
        out[static_cast<std::size_t>(c)] += w * tmp[static_cast<std::size_t>(c)];
      }
    }
    return true;
  }
};

struct AdaptiveAccumulator {
  Vec value;
  Vec err;
  bool converged = true;
};

// Recursively refines `cell` (whose integral estimate is `val`) until the
// difference between the one-level and two-level estimates is within budget.
void refine_cell(const CellEvaluator& ev, const Box& cell, const Vec& val, int depth,
                 const QuadratureSpec& spec, const Vec& scale, double vol_ratio,
                 AdaptiveAccumulator* acc) {
  const int d = ev.dim;
  const std::size_t nchild = std::size_t{1} << d;
  std::vector<Vec> child_vals(nchild);
  std::vector<Box> child_boxes(nchild);
  std::vector<bool> child_nonempty(nchild, false);
  Vec sum(static_cast<std::size_t>(ev.components), 0.0);
  for (std::size_t m = 0; m < nchild; ++m) {
    Box c = cell;
    for (int j = 0; j < d; ++j) {
      double half = 0.5 * cell.sides[static_cast<std::size_t>(j)];
      c.sides[static_cast<std::size_t>(j)] = half;
      c.corner[static_cast<std::size_t>(j)] =
          cell.corner[static_cast<std::size_t>(j)] + (((m >> j) & 1u) != 0 ? half : 0.0);
    }
    child_vals[m].assign(static_cast<std::size_t>(ev.components), 0.0);
    child_nonempty[m] = ev.eval(c, child_vals[m].data());
    child_boxes[m] = c;
    for (int cc = 0; cc < ev.components; ++cc) {
      sum[static_cast<std::size_t>(cc)] += child_vals[m][static_cast<std::size_t>(cc)];
    }
  }
  bool ok = true;
  for (int c = 0; c < ev.components; ++c) {
    double est = std::abs(sum[static_cast<std::size_t>(c)] - val[static_cast<std::size_t>(c)]);
    double budget = spec.rel_tol * scale[static_cast<std::size_t>(c)] * vol_ratio;
    if (est > budget) {
      ok = false;
      break;
    }
  }
  if (ok || depth >= spec.max_depth) {
    for (int c = 0; c < ev.components; ++c) {
      double est = std::abs(sum[static_cast<std::size_t>(c)] - val[static_cast<std::size_t>(c)]);
      acc->value[static_cast<std::size_t>(c)] += sum[static_cast<std::size_t>(c)];
      acc->err[static_cast<std::size_t>(c)] += est;
      if (!ok) {
        double budget = spec.rel_tol * scale[static_cast<std::size_t>(c)] * vol_ratio;
        if (est > budget) acc->converged = false;
      }
    }
    return;
  }
  for (std::size_t m = 0; m < nchild; ++m) {
    if (!child_nonempty[m]) continue;
    refine_cell(ev, child_boxes[m], child_vals[m], depth + 1, spec, scale,
                vol_ratio / static_cast<double>(nchild), acc);
  }
}

// Integral over (shape ∩ clip) with geometric clipping exact per cell.
void integrate_piece(const CellEvaluator& ev, const Box& bounds, const QuadratureSpec& spec,
                     AdaptiveAccumulator* acc) {
  const int d = ev.dim;
  std::vector<int> ncell(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    double len = bounds.sides[static_cast<std::size_t>(j)];
    int n = std::max(1, static_cast<int>(std::ceil(len * spec.base_subdivision)));
    n = std::min(n, 256);
    ncell[static_cast<std::size_t>(j)] = n;
    total *= static_cast<std::size_t>(n);
    if (total > 200000) {
      throw Error(Errc::InvalidArgument, "quadrature base grid too large");
    }
  }
  std::vector<Box> cells;
  std::vector<Vec> vals;
  std::vector<bool> nonempty;
  cells.reserve(total);
  vals.reserve(total);
  // Scale against the sum of |cell contribution| so integrals that nearly
  // cancel (e.g. inner products of orthogonal functions) are resolved
  // relative to the mass actually moved, not the tiny net value.
  Vec coarse_abs(static_cast<std::size_t>(ev.components), 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    Box c;
    c.corner.resize(static_cast<std::size_t>(d));
    c.sides.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      int nj = ncell[static_cast<std::size_t>(j)];
      int ij = static_cast<int>(rem % static_cast<std::size_t>(nj));
      rem /= static_cast<std::size_t>(nj);
      double len = bounds.sides[static_cast<std::size_t>(j)] / nj;
      c.corner[static_cast<std::size_t>(j)] = bounds.lo(j) + ij * len;
      c.sides[static_cast<std::size_t>(j)] = len;
    }
    Vec v(static_cast<std::size_t>(ev.components), 0.0);
    bool ne = ev.eval(c, v.data());
    for (int cc = 0; cc < ev.components; ++cc) {
      coarse_abs[static_cast<std::size_t>(cc)] += std::abs(v[static_cast<std::size_t>(cc)]);
    }
    cells.push_back(std::move(c));
    vals.push_back(std::move(v));
    nonempty.push_back(ne);
  }
  Vec scale(static_cast<std::size_t>(ev.components));
  for (int c = 0; c < ev.components; ++c) {
    scale[static_cast<std::size_t>(c)] =
        std::max(coarse_abs[static_cast<std::size_t>(c)], 1e-300);
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!nonempty[idx]) continue;
    refine_cell(ev, cells[idx], vals[idx], 0, spec, scale, 1.0 / static_cast<double>(total),
                acc);
  }
}

}  // namespace

VecIntegralResult integrate_on_vec(const ConvexShape& region, const ThickSet* mask,
                                   int components,
                                   const std::function<void(const Vec&, double*)>& f,
                                   const QuadratureSpec& spec) {
  if (components < 1) throw Error(Errc::InvalidArgument, "need at least one component");
  if (spec.rel_tol <= 0.0) throw Error(Errc::InvalidArgument, "rel_tol must be positive");
  const int d = shape_dim(region);
  const std::vector<Factor> factors = factorize_shape(region);
  const QuadRule& rule = gauss_legendre_01(spec.rule_order);
  CellEvaluator ev{&factors, &rule, d, components, &f};

  const Box bbox = shape_bbox(region);
  std::vector<Box> pieces;
  if (mask == nullptr) {
    pieces.push_back(bbox);
  } else {
    if (thickset_dim(*mask) != -1 && thickset_dim(*mask) != d) {
      throw Error(Errc::InvalidArgument, "mask dimension does not match region");
    }
    pieces = disjoint_box_cover(materialize_boxes(*mask, bbox));
  }

  AdaptiveAccumulator acc;
  acc.value.assign(static_cast<std::size_t>(components), 0.0);
  acc.err.assign(static_cast<std::size_t>(components), 0.0);
  for (const Box& piece : pieces) {
    integrate_piece(ev, piece, spec, &acc);
  }
  VecIntegralResult out;
  out.value = acc.value;
  out.abs_error = acc.err.empty() ? 0.0 : *std::max_element(acc.err.begin(), acc.err.end());
  out.converged = acc.converged;
  return out;
}

IntegralResult integrate_on(const ConvexShape& region, const ThickSet* mask,
                            const std::function<Cplx(const Vec&)>& f,
                            const QuadratureSpec& spec) {
  auto wrapped = [&f](const Vec& x, double* out) {
    Cplx v = f(x);
    out[0] = v.real();
    out[1] = v.imag();
  };
  VecIntegralResult r = integrate_on_vec(region, mask, 2, wrapped, spec);
  IntegralResult out;
  out.value = Cplx(r.value[0], r.value[1]);
  out.abs_error = r.abs_error;
  out.converged = r.converged;
  return out;
}

double intersect_volume(const Box& region, const ThickSet& mask) {
  return thickset_volume_in(mask, region);
}

// ---------------------------------------------------------------------------
// Thickness
// ---------------------------------------------------------------------------

namespace {

// Flattens a domain made only of interval factors into one list of intervals.
std::optional<std::vector<ExtendedInterval>> as_rectangle(const Domain& d) {
  std::vector<ExtendedInterval> out;
  for (const auto& f : domain_factors(d)) {
    const auto* gr = std::get_if<GeneralizedRectangle>(&f);
    if (gr == nullptr) return std::nullopt;
    out.insert(out.end(), gr->intervals.begin(), gr->intervals.end());
  }
  return out;
}

// |mask ∩ (x + (0, rho)^d)| for disjoint boxes.
double cube_mask_volume(const std::vector<Box>& boxes, const Vec& x, double rho) {
  double total = 0.0;
  for (const Box& b : boxes) {
    double v = 1.0;
    for (int j = 0; j < b.dim() && v > 0.0; ++j) {
      double lo = std::max(b.lo(j), x[static_cast<std::size_t>(j)]);
      double hi = std::min(b.hi(j), x[static_cast<std::size_t>(j)] + rho);
      v *= std::max(0.0, hi - lo);
    }
    total += v;
  }
  return total;
}

}  // namespace

ThicknessResult thickness_of(const Domain& domain, const ThickSet& mask, double rho,
                             const QuadratureSpec& spec) {
  if (rho <= 0.0) throw Error(Errc::InvalidArgument, "rho must be positive");
  validate_thickset(mask);
  const int d = domain_dim(domain);
  if (thickset_dim(mask) != -1 && thickset_dim(mask) != d) {
    throw Error(Errc::InvalidArgument, "mask dimension does not match domain");
  }
  auto witness0 = cube_witness(domain, rho);
  if (!witness0) {
    throw Error(Errc::NoCubeFits, "no cube of side rho fits inside the domain");
  }

  ThicknessResult res;
  res.rho = rho;

  if (std::holds_alternative<FullSpace>(mask)) {
    res.gamma = 1.0;
    res.witness_x = *witness0;
    res.thick = true;
    res.exact = true;
    return res;
  }

  const double rho_d = std::pow(rho, d);

  if (auto rect = as_rectangle(domain)) {
    // Exact sweep. The map x -> |mask ∩ (x + (0,rho)^d)| is piecewise
    // multilinear with axis breakpoints at (edge - rho) and (edge) for every
    // box edge, so its minimum over the position box is attained at a vertex
    // of the breakpoint grid.
    const auto* periodic = std::get_if<PeriodicBoxUnion>(&mask);
    Vec pos_lo(static_cast<std::size_t>(d)), pos_hi(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const ExtendedInterval& iv = (*rect)[static_cast<std::size_t>(j)];
      if (iv.bounded()) {
        if (iv.length() < rho) {
          throw Error(Errc::NoCubeFits, "no cube of side rho fits inside the domain");
        }
        pos_lo[static_cast<std::size_t>(j)] = iv.lo;
        pos_hi[static_cast<std::size_t>(j)] = iv.hi - rho;
      } else {
        if (periodic == nullptr) {
          throw Error(Errc::UnboundedDomain,
                      "thickness over an unbounded domain requires a periodic or full-space mask");
        }
        double p = periodic->period[static_cast<std::size_t>(j)];
        double anchor;
        if (iv.lo > -kInf) {
          anchor = iv.lo;
        } else if (iv.hi < kInf) {
          anchor = iv.hi - rho - p;
        } else {
          anchor = 0.0;
        }
        pos_lo[static_cast<std::size_t>(j)] = anchor;
        pos_hi[static_cast<std::size_t>(j)] = anchor + p;
      }
    }
    // All cubes with corners in the position box live inside this window.
    Box window;
    window.corner = pos_lo;
    window.sides.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      window.sides[static_cast<std::size_t>(j)] =
          pos_hi[static_cast<std::size_t>(j)] - pos_lo[static_cast<std::size_t>(j)] + rho;
    }
    std::vector<Box> boxes = disjoint_box_cover(materialize_boxes(mask, window));

    std::vector<Vec> grid(static_cast<std::size_t>(d));
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) {
      std::set<double> s;
      s.insert(pos_lo[static_cast<std::size_t>(j)]);
      s.insert(pos_hi[static_cast<std::size_t>(j)]);
      for (const Box& b : boxes) {
        for (double e : {b.lo(j), b.hi(j)}) {
          for (double cand : {e - rho, e}) {
            if (cand > pos_lo[static_cast<std::size_t>(j)] &&
                cand < pos_hi[static_cast<std::size_t>(j)]) {
              s.insert(cand);
            }
          }
        }
      }
      grid[static_cast<std::size_t>(j)].assign(s.begin(), s.end());
      total *= grid[static_cast<std::size_t>(j)].size();
      if (total > 50000000) {
        throw Error(Errc::InvalidArgument, "thickness sweep grid too large");
      }
    }
    double best = kInf;
    Vec best_x;
    Vec x(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      // Lexicographic order with axis 0 slowest so ties keep the first vertex.
      for (int j = d - 1; j >= 0; --j) {
        const Vec& gj = grid[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(j)] = gj[rem % gj.size()];
        rem /= gj.size();
      }
      double v = cube_mask_volume(boxes, x, rho);
      if (v < best - 1e-15 * rho_d) {
        best = v;
        best_x = x;
      }
    }
    res.gamma = std::max(0.0, best) / rho_d;
    res.witness_x = best_x;
    res.thick = res.gamma > 0.0;
    res.exact = true;
    return res;
  }

  // Monte Carlo over cube positions for bounded non-rectangular domains.
  if (!domain_bounded(domain)) {
    throw Error(Errc::UnboundedDomain,
                "thickness supports unbounded domains only with rectangular factors");
  }
  auto bbox = domain_bbox(domain);
  Vec lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  Box window;
  window.corner.resize(static_cast<std::size_t>(d));
  window.sides.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    lo[static_cast<std::size_t>(j)] = bbox[static_cast<std::size_t>(j)].lo;
    hi[static_cast<std::size_t>(j)] = bbox[static_cast<std::size_t>(j)].hi - rho;
    window.corner[static_cast<std::size_t>(j)] = bbox[static_cast<std::size_t>(j)].lo;
    window.sides[static_cast<std::size_t>(j)] = bbox[static_cast<std::size_t>(j)].length();
  }
  std::vector<Box> boxes = disjoint_box_cover(materialize_boxes(mask, window));
  Rng rng(spec.seed ^ 0x7468696b6e657373ULL);
  double best = cube_mask_volume(boxes, *witness0, rho);
  Vec best_x = *witness0;
  long accepted = 0;
  Vec x(static_cast<std::size_t>(d));
  for (long s = 0; s < spec.mc_samples; ++s) {
    for (int j = 0; j < d; ++j) {
      x[static_cast<std::size_t>(j)] =
          lo[static_cast<std::size_t>(j)] +
          (hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]) * rng.uniform();
    }
    if (!cube_in_domain(domain, x, rho)) continue;
    ++accepted;
    double v = cube_mask_volume(boxes, x, rho);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  (void)accepted;
  res.gamma = std::max(0.0, best) / rho_d;
  res.witness_x = best_x;
  res.thick = res.gamma > 0.0;
  res.exact = false;
  return res;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

const Json& require_field(const Json& j, const char* name, const std::string& path) {
  if (!j.is_object()) {
    throw Error(Errc::SchemaError, path + ": expected an object");
  }
  auto it = j.find(name);
  if (it == j.end()) {
    throw Error(Errc::SchemaError, path + ": missing required field \"" + name + "\"");
  }
  return *it;
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& path) {
  if (!j.is_object()) {
    throw Error(Errc::SchemaError, path + ": expected an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* name : allowed) {
      if (it.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw Error(Errc::SchemaError, path + ": unknown field \"" + it.key() + "\"");
    }
  }
}

double number_field(const Json& j, const std::string& path) {
  if (!j.is_number()) {
    throw Error(Errc::SchemaError, path + ": expected a number");
  }
  double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw Error(Errc::SchemaError, path + ": expected a finite number");
  }
  return v;
}

double extended_number(const Json& j, const std::string& path) {
  if (j.is_number()) return number_field(j, path);
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw Error(Errc::SchemaError, path + ": expected a number or \"+inf\"/\"-inf\"");
}

std::int64_t integer_field(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw Error(Errc::SchemaError, path + ": expected an integer");
  }
  return j.get<std::int64_t>();
}

std::string string_field(const Json& j, const std::string& path) {
  if (!j.is_string()) {
    throw Error(Errc::SchemaError, path + ": expected a string");
  }
  return j.get<std::string>();
}

Vec vec_field(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    throw Error(Errc::SchemaError, path + ": expected a nonempty array of numbers");
  }
  Vec out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_field(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json extended_to_json(double v) {
  if (v == kInf) return Json("+inf");
  if (v == -kInf) return Json("-inf");
  return Json(v);
}

namespace {

Json primitive_domain_to_json(const PrimitiveDomain& p) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        Json j;
        if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
          j["type"] = "generalized_rectangle";
          Json arr = Json::array();
          for (const auto& iv : v.intervals) {
            arr.push_back(Json::array({extended_to_json(iv.lo), extended_to_json(iv.hi)}));
          }
          j["intervals"] = arr;
        } else if constexpr (std::is_same_v<T, Sector>) {
          j["type"] = "sector";
          j["n"] = v.n;
        } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
          j["type"] = "equilateral_triangle";
          j["side"] = v.side;
        } else {
          j["type"] = "right_triangle";
          j["angle"] = v.angle == RightTriangleAngle::PiOver4 ? "pi/4" : "pi/3";
          j["leg"] = v.leg;
        }
        return j;
      },
      p);
}

PrimitiveDomain primitive_domain_from_json(const Json& j, const std::string& path) {
  std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "generalized_rectangle") {
    reject_unknown_keys(j, {"type", "intervals"}, path);
    const Json& arr = require_field(j, "intervals", path);
    if (!arr.is_array() || arr.empty()) {
      throw Error(Errc::SchemaError, path + ".intervals: expected a nonempty array");
    }
    GeneralizedRectangle gr;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".intervals[" + std::to_string(i) + "]";
      if (!arr[i].is_array() || arr[i].size() != 2) {
        throw Error(Errc::SchemaError, p + ": expected [lo, hi]");
      }
      ExtendedInterval iv;
      iv.lo = extended_number(arr[i][0], p + "[0]");
      iv.hi = extended_number(arr[i][1], p + "[1]");
      if (!(iv.lo < iv.hi)) {
        throw Error(Errc::SchemaError, p + ": interval must satisfy lo < hi");
      }
      gr.intervals.push_back(iv);
    }
    return gr;
  }
  if (type == "sector") {
    reject_unknown_keys(j, {"type", "n"}, path);
    std::int64_t n = integer_field(require_field(j, "n", path), path + ".n");
    if (n < 3) throw Error(Errc::SchemaError, path + ".n: sector needs n >= 3");
    Sector s;
    s.n = static_cast<int>(n);
    return s;
  }
  if (type == "equilateral_triangle") {
    reject_unknown_keys(j, {"type", "side"}, path);
    double side = number_field(require_field(j, "side", path), path + ".side");
    if (!(side > 0.0)) throw Error(Errc::SchemaError, path + ".side: must be positive");
    EquilateralTriangle t;
    t.side = side;
    return t;
  }
  if (type == "right_triangle") {
    reject_unknown_keys(j, {"type", "angle", "leg"}, path);
    std::string angle = string_field(require_field(j, "angle", path), path + ".angle");
    double leg = number_field(require_field(j, "leg", path), path + ".leg");
    if (!(leg > 0.0)) throw Error(Errc::SchemaError, path + ".leg: must be positive");
    RightTriangle t;
    t.leg = leg;
    if (angle == "pi/4") {
      t.angle = RightTriangleAngle::PiOver4;
    } else if (angle == "pi/3") {
      t.angle = RightTriangleAngle::PiOver3;
    } else {
      throw Error(Errc::SchemaError, path + ".angle: expected \"pi/4\" or \"pi/3\"");
    }
    return t;
  }
  throw Error(Errc::SchemaError, path + ".type: unknown domain type \"" + type + "\"");
}

}  // namespace

Json domain_to_json(const Domain& d) {
  if (const auto* prod = std::get_if<Product>(&d)) {
    Json j;
    j["type"] = "product";
    Json arr = Json::array();
    for (const auto& f : prod->factors) arr.push_back(primitive_domain_to_json(f));
    j["factors"] = arr;
    return j;
  }
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Product>) {
          return Json();  // unreachable
        } else {
          return primitive_domain_to_json(PrimitiveDomain(v));
        }
      },
      d);
}

Domain domain_from_json(const Json& j, const std::string& path) {
  std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "product") {
    reject_unknown_keys(j, {"type", "factors"}, path);
    const Json& arr = require_field(j, "factors", path);
    if (!arr.is_array() || arr.size() < 2) {
      throw Error(Errc::SchemaError, path + ".factors: expected at least two factors");
    }
    Product p;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string fp = path + ".factors[" + std::to_string(i) + "]";
      std::string ftype = string_field(require_field(arr[i], "type", fp), fp + ".type");
      if (ftype == "product") {
        throw Error(Errc::SchemaError, fp + ": nested products are not supported");
      }
      p.factors.push_back(primitive_domain_from_json(arr[i], fp));
    }
    return p;
  }
  PrimitiveDomain p = primitive_domain_from_json(j, path);
  return std::visit([](const auto& v) -> Domain { return v; }, p);
}

Json box_to_json(const Box& b) {
  Json j;
  j["corner"] = b.corner;
  j["sides"] = b.sides;
  return j;
}

Box box_from_json(const Json& j, const std::string& path) {
  reject_unknown_keys(j, {"corner", "sides"}, path);
  Box b;
  b.corner = vec_field(require_field(j, "corner", path), path + ".corner");
  b.sides = vec_field(require_field(j, "sides", path), path + ".sides");
  if (b.corner.size() != b.sides.size()) {
    throw Error(Errc::SchemaError, path + ": corner and sides must have equal length");
  }
  for (std::size_t i = 0; i < b.sides.size(); ++i) {
    if (!(b.sides[i] > 0.0)) {
      throw Error(Errc::SchemaError,
                  path + ".sides[" + std::to_string(i) + "]: must be positive");
    }
  }
  return b;
}

Json thickset_to_json(const ThickSet& ts) {
  Json j;
  if (std::holds_alternative<FullSpace>(ts)) {
    j["type"] = "full_space";
    return j;
  }
  if (const auto* bu = std::get_if<BoxUnion>(&ts)) {
    j["type"] = "box_union";
    Json arr = Json::array();
    for (const Box& b : bu->boxes) arr.push_back(box_to_json(b));
    j["boxes"] = arr;
    return j;
  }
  const auto& pu = std::get<PeriodicBoxUnion>(ts);
  j["type"] = "periodic_box_union";
  j["period"] = pu.period;
  Json arr = Json::array();
  for (const Box& b : pu.base) arr.push_back(box_to_json(b));
  j["base"] = arr;
  return j;
}

ThickSet thickset_from_json(const Json& j, const std::string& path) {
  std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "full_space") {
    reject_unknown_keys(j, {"type"}, path);
    return FullSpace{};
  }
  if (type == "box_union") {
    reject_unknown_keys(j, {"type", "boxes"}, path);
    const Json& arr = require_field(j, "boxes", path);
    if (!arr.is_array() || arr.empty()) {
      throw Error(Errc::SchemaError, path + ".boxes: expected a nonempty array");
    }
    BoxUnion bu;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      bu.boxes.push_back(box_from_json(arr[i], path + ".boxes[" + std::to_string(i) + "]"));
    }
    ThickSet ts = bu;
    validate_thickset(ts);
    return ts;
  }
  if (type == "periodic_box_union") {
    reject_unknown_keys(j, {"type", "period", "base"}, path);
    PeriodicBoxUnion pu;
    pu.period = vec_field(require_field(j, "period", path), path + ".period");
    const Json& arr = require_field(j, "base", path);
    if (!arr.is_array() || arr.empty()) {
      throw Error(Errc::SchemaError, path + ".base: expected a nonempty array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      pu.base.push_back(box_from_json(arr[i], path + ".base[" + std::to_string(i) + "]"));
    }
    ThickSet ts = pu;
    try {
      validate_thickset(ts);
    } catch (const Error& e) {
      throw Error(Errc::SchemaError, path + ": " + e.what());
    }
    return ts;
  }
  throw Error(Errc::SchemaError, path + ".type: unknown thick-set type \"" + type + "\"");
}

Json quadrature_to_json(const QuadratureSpec& q) {
  Json j;
  j["rule_order"] = q.rule_order;
  j["base_subdivision"] = q.base_subdivision;
  j["rel_tol"] = q.rel_tol;
  j["max_depth"] = q.max_depth;
  j["mc_samples"] = q.mc_samples;
  j["seed"] = q.seed;
  return j;
}

QuadratureSpec quadrature_from_json(const Json& j, const std::string& path) {
  reject_unknown_keys(
      j, {"rule_order", "base_subdivision", "rel_tol", "max_depth", "mc_samples", "seed"}, path);
  QuadratureSpec q;
  if (j.contains("rule_order")) {
    std::int64_t v = integer_field(j["rule_order"], path + ".rule_order");
    if (v < 1 || v > 512) throw Error(Errc::SchemaError, path + ".rule_order: out of range");
    q.rule_order = static_cast<int>(v);
  }
  if (j.contains("base_subdivision")) {
    std::int64_t v = integer_field(j["base_subdivision"], path + ".base_subdivision");
    if (v < 1 || v > 256) {
      throw Error(Errc::SchemaError, path + ".base_subdivision: out of range");
    }
    q.base_subdivision = static_cast<int>(v);
  }
  if (j.contains("rel_tol")) {
    double v = number_field(j["rel_tol"], path + ".rel_tol");
    if (!(v > 0.0)) throw Error(Errc::SchemaError, path + ".rel_tol: must be positive");
    q.rel_tol = v;
  }
  if (j.contains("max_depth")) {
    std::int64_t v = integer_field(j["max_depth"], path + ".max_depth");
    if (v < 0 || v > 30) throw Error(Errc::SchemaError, path + ".max_depth: out of range");
    q.max_depth = static_cast<int>(v);
  }
  if (j.contains("mc_samples")) {
    std::int64_t v = integer_field(j["mc_samples"], path + ".mc_samples");
    if (v < 1) throw Error(Errc::SchemaError, path + ".mc_samples: must be positive");
    q.mc_samples = static_cast<long>(v);
  }
  if (j.contains("seed")) {
    std::int64_t v = integer_field(j["seed"], path + ".seed");
    if (v < 0) throw Error(Errc::SchemaError, path + ".seed: must be nonnegative");
    q.seed = static_cast<std::uint64_t>(v);
  }
  return q;
}

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.n; ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat mat_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || j.size() > 64) {
    throw Error(Errc::SchemaError, path + ": expected a square matrix as nested arrays");
  }
  Mat m;
  m.n = static_cast<int>(j.size());
  m.a.assign(static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n), 0.0);
  for (int r = 0; r < m.n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != m.n) {
      throw Error(Errc::SchemaError,
                  path + "[" + std::to_string(r) + "]: expected a row of length " +
                      std::to_string(m.n));
    }
    for (int c = 0; c < m.n; ++c) {
      m.at(r, c) = number_field(row[static_cast<std::size_t>(c)],
                                path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

namespace {

Json primitive_shape_to_json(const PrimitiveShape& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        Json j;
        if constexpr (std::is_same_v<T, Box>) {
          j["type"] = "box";
          j["corner"] = v.corner;
          j["sides"] = v.sides;
        } else if constexpr (std::is_same_v<T, Triangle2>) {
          j["type"] = "triangle";
          Json verts = Json::array();
          for (const auto& p : v.v) verts.push_back(Json::array({p[0], p[1]}));
          j["vertices"] = verts;
        } else {
          j["type"] = "sector_cap";
          j["box"] = box_to_json(v.box);
          j["tan_theta"] = v.tan_theta;
        }
        return j;
      },
      s);
}

PrimitiveShape primitive_shape_from_json(const Json& j, const std::string& path) {
  std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "box") {
    reject_unknown_keys(j, {"type", "corner", "sides"}, path);
    Json b = {{"corner", require_field(j, "corner", path)},
              {"sides", require_field(j, "sides", path)}};
    return box_from_json(b, path);
  }
  if (type == "triangle") {
    reject_unknown_keys(j, {"type", "vertices"}, path);
    const Json& verts = require_field(j, "vertices", path);
    if (!verts.is_array() || verts.size() != 3) {
      throw Error(Errc::SchemaError, path + ".vertices: expected three vertices");
    }
    Triangle2 t;
    for (std::size_t i = 0; i < 3; ++i) {
      std::string vp = path + ".vertices[" + std::to_string(i) + "]";
      if (!verts[i].is_array() || verts[i].size() != 2) {
        throw Error(Errc::SchemaError, vp + ": expected [x, y]");
      }
      t.v[i] = {number_field(verts[i][0], vp + "[0]"), number_field(verts[i][1], vp + "[1]")};
    }
    return t;
  }
  if (type == "sector_cap") {
    reject_unknown_keys(j, {"type", "box", "tan_theta"}, path);
    SectorCap cap;
    cap.box = box_from_json(require_field(j, "box", path), path + ".box");
    if (cap.box.dim() != 2) {
      throw Error(Errc::SchemaError, path + ".box: sector caps are two-dimensional");
    }
    cap.tan_theta = number_field(require_field(j, "tan_theta", path), path + ".tan_theta");
    if (!(cap.tan_theta > 0.0)) {
      throw Error(Errc::SchemaError, path + ".tan_theta: must be positive");
    }
    return cap;
  }
  throw Error(Errc::SchemaError, path + ".type: unknown shape type \"" + type + "\"");
}

}  // namespace

Json shape_to_json(const ConvexShape& s) {
  if (const auto* p = std::get_if<ProductShape>(&s)) {
    Json j;
    j["type"] = "product";
    Json arr = Json::array();
    for (const auto& f : p->factors) arr.push_back(primitive_shape_to_json(f));
    j["factors"] = arr;
    return j;
  }
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductShape>) {
          return Json();  // unreachable
        } else {
          return primitive_shape_to_json(PrimitiveShape(v));
        }
      },
      s);
}

ConvexShape shape_from_json(const Json& j, const std::string& path) {
  std::string type = string_field(require_field(j, "type", path), path + ".type");
  if (type == "product") {
    reject_unknown_keys(j, {"type", "factors"}, path);
    const Json& arr = require_field(j, "factors", path);
    if (!arr.is_array() || arr.size() < 2) {
      throw Error(Errc::SchemaError, path + ".factors: expected at least two factors");
    }
    ProductShape p;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string fp = path + ".factors[" + std::to_string(i) + "]";
      std::string ftype = string_field(require_field(arr[i], "type", fp), fp + ".type");
      if (ftype == "product") {
        throw Error(Errc::SchemaError, fp + ": nested products are not supported");
      }
      p.factors.push_back(primitive_shape_from_json(arr[i], fp));
    }
    return p;
  }
  PrimitiveShape p = primitive_shape_from_json(j, path);
  return std::visit([](const auto& v) -> ConvexShape { return v; }, p);
}

}  // namespace lsv
