#include "lsverify/covering.hpp"

#include <algorithm>
#include <cmath>

namespace lsv {

namespace {

constexpr std::size_t kMaxElements = 1000000;

void check_element_budget(std::size_t n) {
  if (n > kMaxElements) {
    throw Error(Errc::InvalidArgument, "covering would need too many elements; shrink the window");
  }
}

struct IntervalCell {
  double lo = 0.0;
  double hi = 0.0;
};

// Cells of length rho covering one interval factor. Bounded intervals get the
// grid anchored at the left endpoint plus a flush cell at the right end when
// the length is not an exact multiple of rho; unbounded intervals get the
// grid anchored at their finite endpoint (at 0 for the whole line) restricted
// to the window.
std::vector<IntervalCell> interval_cells(const ExtendedInterval& iv, double rho,
                                         const std::optional<IntervalCell>& wnd) {
  std::vector<IntervalCell> cells;
  if (iv.bounded()) {
    if (iv.length() < rho) {
      throw Error(Errc::NoCubeFits, "interval shorter than rho");
    }
    long n = static_cast<long>(std::floor(iv.length() / rho));
    for (long j = 0; j < n; ++j) {
      cells.push_back({iv.lo + static_cast<double>(j) * rho,
                       iv.lo + static_cast<double>(j + 1) * rho});
    }
    if (iv.length() - static_cast<double>(n) * rho > 0.0) {
      cells.push_back({iv.hi - rho, iv.hi});
    }
    return cells;
  }
  if (!wnd) {
    throw Error(Errc::WindowRequired, "unbounded axes need a window");
  }
  double anchor;
  if (iv.lo > -kInf) {
    anchor = iv.lo;
  } else if (iv.hi < kInf) {
    anchor = iv.hi;  // cells grow to the left of the finite endpoint
  } else {
    anchor = 0.0;
  }
  // Grid of cells anchor + j * rho over all integers j, clipped to the axis
  // range and restricted to cells meeting the window.
  double axis_lo = std::max(iv.lo, wnd->lo - rho);
  double axis_hi = std::min(iv.hi, wnd->hi + rho);
  if (axis_hi <= axis_lo) return cells;
  long j_lo = static_cast<long>(std::floor((axis_lo - anchor) / rho));
  long j_hi = static_cast<long>(std::ceil((axis_hi - anchor) / rho)) + 1;
  check_element_budget(static_cast<std::size_t>(std::max<long>(0, j_hi - j_lo)));
  for (long j = j_lo; j < j_hi; ++j) {
    double lo = anchor + static_cast<double>(j) * rho;
    double hi = lo + rho;
    if (lo < iv.lo || hi > iv.hi) continue;  // stay inside the half-line
    if (hi <= wnd->lo || lo >= wnd->hi) continue;
    cells.push_back({lo, hi});
  }
  return cells;
}

std::optional<IntervalCell> window_slice(const std::optional<Box>& window, int axis) {
  if (!window) return std::nullopt;
  return IntervalCell{window->lo(axis), window->hi(axis)};
}

Covering cover_rectangle(const GeneralizedRectangle& gr, double rho,
                         const std::optional<Box>& window, int axis_offset) {
  const int d = static_cast<int>(gr.intervals.size());
  std::vector<std::vector<IntervalCell>> per_axis;
  double kappa = 1.0;
  for (int j = 0; j < d; ++j) {
    const auto& iv = gr.intervals[static_cast<std::size_t>(j)];
    per_axis.push_back(interval_cells(iv, rho, window_slice(window, axis_offset + j)));
    if (iv.bounded()) kappa *= 2.0;
    if (per_axis.back().empty()) {
      throw Error(Errc::InvalidArgument, "window does not meet the domain");
    }
  }
  std::size_t total = 1;
  for (const auto& cells : per_axis) {
    total *= cells.size();
    check_element_budget(total);
  }
  Covering cov;
  cov.kappa = kappa;
  cov.rho = rho;
  cov.l.assign(static_cast<std::size_t>(d), rho);
  cov.eta = std::pow(static_cast<double>(d), -0.5 * static_cast<double>(d));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    Box b;
    b.corner.resize(static_cast<std::size_t>(d));
    b.sides.assign(static_cast<std::size_t>(d), rho);
    for (int j = 0; j < d; ++j) {
      const auto& cells = per_axis[static_cast<std::size_t>(j)];
      b.corner[static_cast<std::size_t>(j)] = cells[rem % cells.size()].lo;
      rem /= cells.size();
    }
    CoveringElement el;
    el.shape = b;
    el.bbox_l.assign(static_cast<std::size_t>(d), rho);
    el.cube_corner = b.corner;
    el.psi = Mat::identity(d);
    cov.elements.push_back(std::move(el));
  }
  return cov;
}

// One row of the staircase covering shared by sectors and right triangles:
// cusp piece at the sloped boundary, then unit squares to the right.
CoveringElement make_cusp(double rho, double q, double tan, long k) {
  const double cot = 1.0 / tan;
  const double x0 = static_cast<double>(k) * rho * cot;
  const double y0 = static_cast<double>(k) * rho;
  SectorCap cap;
  cap.box = Box{{x0, y0}, {q, rho}};
  cap.tan_theta = tan;
  CoveringElement el;
  el.shape = cap;
  el.bbox_l = {q, rho};
  el.cube_corner = {x0 + rho * cot, y0};
  el.psi = Mat::diagonal({rho / q, 1.0});
  return el;
}

CoveringElement make_square(double rho, double x, double y) {
  Box b{{x, y}, {rho, rho}};
  CoveringElement el;
  el.shape = b;
  el.bbox_l = {rho, rho};
  el.cube_corner = {x, y};
  el.psi = Mat::identity(2);
  return el;
}

Covering cover_sector(const Sector& s, double rho, const std::optional<Box>& window) {
  if (!window) {
    throw Error(Errc::WindowRequired, "sector coverings need a window");
  }
  if (window->dim() != 2) {
    throw Error(Errc::InvalidArgument, "sector window must be two-dimensional");
  }
  const double theta = kPi / s.n;
  const double tan = std::tan(theta);
  const double cot = 1.0 / tan;
  const double q = rho * (1.0 + cot);

  Covering cov;
  cov.kappa = 1.0;
  cov.rho = rho;
  cov.l = {q, rho};
  cov.eta = 0.25;

  const double wx_lo = window->lo(0), wx_hi = window->hi(0);
  const double wy_lo = window->lo(1), wy_hi = window->hi(1);
  long k = std::max<long>(0, static_cast<long>(std::floor(wy_lo / rho)));
  for (;; ++k) {
    const double y0 = static_cast<double>(k) * rho;
    const double xc = y0 * cot;  // leftmost x of the row (cusp corner)
    if (y0 >= wy_hi || xc >= wx_hi) break;
    cov.elements.push_back(make_cusp(rho, q, tan, k));
    const double x_start = xc + q;
    long m = std::max<long>(0, static_cast<long>(std::floor((wx_lo - x_start) / rho)));
    for (;; ++m) {
      const double x = x_start + static_cast<double>(m) * rho;
      if (x >= wx_hi) break;
      cov.elements.push_back(make_square(rho, x, y0));
      check_element_budget(cov.elements.size());
    }
    check_element_budget(cov.elements.size());
  }
  if (cov.elements.empty()) {
    throw Error(Errc::InvalidArgument, "window does not meet the sector");
  }
  return cov;
}

Covering cover_right_triangle(const RightTriangle& rt, double rho) {
  const double tan = right_triangle_tan(rt.angle);
  const double cot = 1.0 / tan;
  const double q = rho * (1.0 + cot);
  const double p = rho * (1.0 + tan);
  const double L = rt.leg;
  if (L < q) {
    throw Error(Errc::NoCubeFits, "right triangle too small for a rho-cube");
  }
  const double h = L * tan - p;  // rows live below this height

  Covering cov;
  cov.kappa = 3.0;
  cov.rho = rho;
  cov.l = {q, p};
  cov.eta = 0.25;

  for (long k = 0; static_cast<double>(k) * rho < h; ++k) {
    const double y0 = static_cast<double>(k) * rho;
    cov.elements.push_back(make_cusp(rho, q, tan, k));
    const double x_start = static_cast<double>(k) * rho * cot + q;
    const double span = L - x_start;
    long nsq = static_cast<long>(std::floor(span / rho));
    for (long m = 0; m < nsq; ++m) {
      cov.elements.push_back(make_square(rho, x_start + static_cast<double>(m) * rho, y0));
    }
    if (span - static_cast<double>(nsq) * rho > 0.0) {
      cov.elements.push_back(make_square(rho, L - rho, y0));
    }
    check_element_budget(cov.elements.size());
  }

  // Scaled copy of the whole triangle filling the top corner: the triangle
  // with vertices (L-q, h), (L, h), (L, L tan); its hypotenuse lies on the
  // domain boundary y = x tan.
  SectorCap top;
  top.box = Box{{L - q, h}, {q, p}};
  top.tan_theta = tan;
  CoveringElement el;
  el.shape = top;
  el.bbox_l = {q, p};
  el.cube_corner = {L - rho, h};
  el.psi = Mat::diagonal({1.0 / q, 1.0 / p});
  cov.elements.push_back(std::move(el));
  return cov;
}

Covering cover_equilateral(const EquilateralTriangle& et, double rho) {
  const double s_min = (3.0 + 2.0 * std::sqrt(3.0)) * rho / 3.0;
  const double L = et.side;
  if (L < s_min) {
    throw Error(Errc::NoCubeFits, "equilateral triangle too small for a rho-cube");
  }
  const long kp = static_cast<long>(std::floor(L / s_min));
  const double sp = L / static_cast<double>(kp);  // tile side, in [s_min, 2 s_min)
  const double hp = std::sqrt(3.0) * sp / 2.0;
  const double y0 = -std::sqrt(3.0) * L / 6.0;

  Covering cov;
  cov.kappa = 3.0;
  cov.rho = rho;
  cov.l = {sp, hp};
  cov.eta = std::sqrt(3.0) / 4.0;

  for (long r = 0; r < kp; ++r) {
    const double yb = y0 + static_cast<double>(r) * hp;
    const double yt = yb + hp;
    const double xl = -L / 2.0 + static_cast<double>(r) * sp / 2.0;
    for (long i = 0; i < kp - r; ++i) {
      const double x0 = xl + static_cast<double>(i) * sp;
      Triangle2 up;
      up.v = {{{x0, yb}, {x0 + sp, yb}, {x0 + sp / 2.0, yt}}};
      CoveringElement el;
      el.shape = up;
      el.bbox_l = {sp, hp};
      el.cube_corner = {x0 + sp / 2.0 - rho / 2.0, yb};
      el.psi = Mat::identity(2);
      cov.elements.push_back(std::move(el));
    }
    for (long i = 0; i + 1 < kp - r; ++i) {
      const double xa = xl + static_cast<double>(i + 1) * sp;  // bottom apex
      Triangle2 down;
      down.v = {{{xa, yb}, {xa + sp / 2.0, yt}, {xa - sp / 2.0, yt}}};
      CoveringElement el;
      el.shape = down;
      el.bbox_l = {sp, hp};
      el.cube_corner = {xa - rho / 2.0, yt - rho};
      el.psi = Mat::identity(2);
      cov.elements.push_back(std::move(el));
    }
    check_element_budget(cov.elements.size());
  }
  return cov;
}

}  // namespace

Covering build_covering(const Domain& domain, double rho, const std::optional<Box>& window) {
  if (rho <= 0.0) throw Error(Errc::InvalidArgument, "rho must be positive");
  if (window && window->dim() != domain_dim(domain)) {
    throw Error(Errc::InvalidArgument, "window dimension does not match domain");
  }
  if (const auto* gr = std::get_if<GeneralizedRectangle>(&domain)) {
    return cover_rectangle(*gr, rho, window, 0);
  }
  if (const auto* s = std::get_if<Sector>(&domain)) {
    return cover_sector(*s, rho, window);
  }
  if (const auto* rt = std::get_if<RightTriangle>(&domain)) {
    return cover_right_triangle(*rt, rho);
  }
  if (const auto* et = std::get_if<EquilateralTriangle>(&domain)) {
    return cover_equilateral(*et, rho);
  }
  const auto& prod = std::get<Product>(domain);
  std::optional<Covering> acc;
  int axis = 0;
  for (const auto& factor : prod.factors) {
    const int fd = std::visit(
        [](const auto& v) -> int {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, GeneralizedRectangle>) {
            return static_cast<int>(v.intervals.size());
          } else {
            return 2;
          }
        },
        factor);
    std::optional<Box> fw;
    if (window) {
      Box slice;
      for (int j = 0; j < fd; ++j) {
        slice.corner.push_back(window->lo(axis + j));
        slice.sides.push_back(window->sides[static_cast<std::size_t>(axis + j)]);
      }
      fw = slice;
    }
    Domain fdom = std::visit([](const auto& v) -> Domain { return v; }, factor);
    Covering fc = build_covering(fdom, rho, fw);
    if (!acc) {
      acc = std::move(fc);
    } else {
      acc = product_covering(*acc, fc);
    }
    axis += fd;
  }
  return *acc;
}

Covering product_covering(const Covering& a, const Covering& b) {
  if (a.rho != b.rho) {
    throw Error(Errc::RhoMismatch, "factor coverings use different rho");
  }
  const int d = static_cast<int>(a.l.size());
  const int dp = static_cast<int>(b.l.size());
  const double r = std::sqrt(static_cast<double>(d) / static_cast<double>(dp));

  Covering out;
  out.kappa = a.kappa * b.kappa;
  out.rho = a.rho;
  out.l = a.l;
  out.l.insert(out.l.end(), b.l.begin(), b.l.end());
  out.eta = a.eta * b.eta * std::pow(static_cast<double>(d), 0.5 * d) *
            std::pow(static_cast<double>(dp), 0.5 * dp) /
            std::pow(static_cast<double>(d + dp), 0.5 * (d + dp));

  check_element_budget(a.elements.size() * b.elements.size());
  std::vector<double> diam_a(a.elements.size());
  for (std::size_t j = 0; j < a.elements.size(); ++j) {
    diam_a[j] = psi_image_diam(a.elements[j].shape, a.elements[j].psi);
  }
  std::vector<double> diam_b(b.elements.size());
  for (std::size_t j = 0; j < b.elements.size(); ++j) {
    diam_b[j] = psi_image_diam(b.elements[j].shape, b.elements[j].psi);
  }
  out.elements.reserve(a.elements.size() * b.elements.size());
  for (std::size_t j = 0; j < a.elements.size(); ++j) {
    const CoveringElement& ea = a.elements[j];
    for (std::size_t jp = 0; jp < b.elements.size(); ++jp) {
      const CoveringElement& eb = b.elements[jp];
      CoveringElement el;
      el.shape = shape_product(ea.shape, eb.shape);
      el.bbox_l = ea.bbox_l;
      el.bbox_l.insert(el.bbox_l.end(), eb.bbox_l.begin(), eb.bbox_l.end());
      el.cube_corner = ea.cube_corner;
      el.cube_corner.insert(el.cube_corner.end(), eb.cube_corner.begin(), eb.cube_corner.end());
      el.psi = block_diag(scaled(ea.psi, r / diam_a[j]), scaled(eb.psi, 1.0 / diam_b[jp]));
      out.elements.push_back(std::move(el));
    }
  }
  return out;
}

CoveringReport validate_covering(const Covering& covering, const Domain& domain,
                                 const std::optional<Box>& window, const QuadratureSpec& spec) {
  const int d = domain_dim(domain);
  if (covering.elements.empty()) {
    throw Error(Errc::InvalidArgument, "covering has no elements");
  }
  if (static_cast<int>(covering.l.size()) != d) {
    throw Error(Errc::InvalidArgument, "covering dimension does not match domain");
  }
  Box win;
  if (window) {
    win = *window;
    if (win.dim() != d) {
      throw Error(Errc::InvalidArgument, "window dimension does not match domain");
    }
  } else {
    if (!domain_bounded(domain)) {
      throw Error(Errc::WindowRequired, "validating over an unbounded domain needs a window");
    }
    auto bbox = domain_bbox(domain);
    win.corner.resize(static_cast<std::size_t>(d));
    win.sides.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      win.corner[static_cast<std::size_t>(j)] = bbox[static_cast<std::size_t>(j)].lo;
      win.sides[static_cast<std::size_t>(j)] = bbox[static_cast<std::size_t>(j)].length();
    }
  }

  CoveringReport report;
  bool elements_ok = true;
  report.per_element.reserve(covering.elements.size());
  for (const CoveringElement& el : covering.elements) {
    ElementCheck check;
    check.cube_ok = shape_contains_cube(el.shape, el.cube_corner, covering.rho);
    Box bbox = shape_bbox(el.shape);
    check.bbox_ok = true;
    if (static_cast<int>(el.bbox_l.size()) != d || bbox.dim() != d) {
      check.bbox_ok = false;
    } else {
      for (int j = 0; j < d; ++j) {
        double measured = bbox.sides[static_cast<std::size_t>(j)];
        double declared = el.bbox_l[static_cast<std::size_t>(j)];
        double limit = covering.l[static_cast<std::size_t>(j)];
        if (measured > declared * (1.0 + 1e-12) || declared > limit * (1.0 + 1e-12)) {
          check.bbox_ok = false;
        }
      }
    }
    const int sd = shape_dim(el.shape);
    double vol = psi_image_volume(el.shape, el.psi);
    double diam = psi_image_diam(el.shape, el.psi);
    check.eta_measured = vol / std::pow(diam, sd);
    if (!check.cube_ok || !check.bbox_ok || check.eta_measured < covering.eta - 1e-9) {
      elements_ok = false;
    }
    report.per_element.push_back(check);
  }

  Rng rng(spec.seed ^ 0x636f766572696e67ULL);
  long inside = 0;
  long uncovered = 0;
  long max_mult = 0;
  Vec x(static_cast<std::size_t>(d));
  for (long s = 0; s < spec.mc_samples; ++s) {
    for (int j = 0; j < d; ++j) {
      x[static_cast<std::size_t>(j)] =
          win.lo(j) + win.sides[static_cast<std::size_t>(j)] * rng.uniform();
    }
    if (!contains_point(domain, x, false)) continue;
    ++inside;
    long mult = 0;
    for (const CoveringElement& el : covering.elements) {
      if (shape_contains(el.shape, x, false)) ++mult;
    }
    if (mult == 0) ++uncovered;
    max_mult = std::max(max_mult, mult);
  }
  report.uncovered_fraction =
      inside > 0 ? static_cast<double>(uncovered) / static_cast<double>(inside) : 0.0;
  report.max_overlap_measured = static_cast<double>(max_mult);
  report.pass = elements_ok && report.uncovered_fraction <= 1e-3 &&
                report.max_overlap_measured <= covering.kappa + 1e-9;
  return report;
}

Json covering_to_json(const Covering& c) {
  Json j;
  j["kappa"] = c.kappa;
  j["rho"] = c.rho;
  j["l"] = c.l;
  j["eta"] = c.eta;
  Json els = Json::array();
  for (const CoveringElement& el : c.elements) {
    Json je;
    je["shape"] = shape_to_json(el.shape);
    je["bbox_l"] = el.bbox_l;
    je["cube_corner"] = el.cube_corner;
    je["psi"] = mat_to_json(el.psi);
    els.push_back(std::move(je));
  }
  j["elements"] = std::move(els);
  return j;
}

Covering covering_from_json(const Json& j, const std::string& path) {
  reject_unknown_keys(j, {"kappa", "rho", "l", "eta", "elements"}, path);
  Covering c;
  c.kappa = number_field(require_field(j, "kappa", path), path + ".kappa");
  c.rho = number_field(require_field(j, "rho", path), path + ".rho");
  c.l = vec_field(require_field(j, "l", path), path + ".l");
  c.eta = number_field(require_field(j, "eta", path), path + ".eta");
  if (c.kappa < 1.0) throw Error(Errc::SchemaError, path + ".kappa: must be at least 1");
  if (!(c.rho > 0.0)) throw Error(Errc::SchemaError, path + ".rho: must be positive");
  if (!(c.eta > 0.0)) throw Error(Errc::SchemaError, path + ".eta: must be positive");
  for (std::size_t i = 0; i < c.l.size(); ++i) {
    if (!(c.l[i] > 0.0)) {
      throw Error(Errc::SchemaError, path + ".l[" + std::to_string(i) + "]: must be positive");
    }
  }
  const int d = static_cast<int>(c.l.size());
  const Json& els = require_field(j, "elements", path);
  if (!els.is_array() || els.empty()) {
    throw Error(Errc::SchemaError, path + ".elements: expected a nonempty array");
  }
  for (std::size_t i = 0; i < els.size(); ++i) {
    std::string ep = path + ".elements[" + std::to_string(i) + "]";
    reject_unknown_keys(els[i], {"shape", "bbox_l", "cube_corner", "psi"}, ep);
    CoveringElement el;
    el.shape = shape_from_json(require_field(els[i], "shape", ep), ep + ".shape");
    el.bbox_l = vec_field(require_field(els[i], "bbox_l", ep), ep + ".bbox_l");
    el.cube_corner = vec_field(require_field(els[i], "cube_corner", ep), ep + ".cube_corner");
    el.psi = mat_from_json(require_field(els[i], "psi", ep), ep + ".psi");
    if (shape_dim(el.shape) != d || static_cast<int>(el.bbox_l.size()) != d ||
        static_cast<int>(el.cube_corner.size()) != d || el.psi.n != d) {
      throw Error(Errc::SchemaError, ep + ": element dimensions are inconsistent");
    }
    c.elements.push_back(std::move(el));
  }
  return c;
}

}  // namespace lsv
