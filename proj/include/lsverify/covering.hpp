#pragma once

// Construction and validation of coverings of a domain by convex elements.
//
// A covering at scale rho consists of convex open elements Q_j inside the
// domain such that (up to measure zero) they cover the domain, the overlap
// multiplicity is bounded by kappa, each element contains a cube of side rho
// and fits inside a hyperrectangle with per-axis sides l, and each element
// carries a linear map psi with |psi(Q_j)| >= eta * diam(psi(Q_j))^d.

#include <optional>

#include "lsverify/geometry.hpp"

namespace lsv {

struct CoveringElement {
  ConvexShape shape;
  Vec bbox_l;       // sides of a hyperrectangle containing the element
  Vec cube_corner;  // lower corner of a rho-cube inside the element
  Mat psi;          // linear map witnessing the measure/diameter bound
};

struct Covering {
  std::vector<CoveringElement> elements;
  double kappa = 1.0;
  double rho = 0.0;
  Vec l;
  double eta = 0.0;
};

struct ElementCheck {
  bool cube_ok = false;
  bool bbox_ok = false;
  double eta_measured = 0.0;
};

struct CoveringReport {
  double uncovered_fraction = 0.0;
  double max_overlap_measured = 0.0;
  std::vector<ElementCheck> per_element;
  bool pass = false;
};

// Builds the reference covering of the domain at scale rho:
//  - generalized rectangles: grid of rho-cells, flush cells at bounded ends
//    (kappa = 2^k with k bounded axes, l = (rho, ..., rho), eta = d^{-d/2});
//  - sectors: rows of one cusp piece plus squares (kappa = 1,
//    l = (rho (1 + cot theta), rho), eta = 1/4);
//  - right triangles: rows of cusp piece, squares, flush square, plus one
//    scaled-triangle piece at the top (kappa = 3, l = (rho (1 + cot theta),
//    rho (1 + tan theta)), eta = 1/4);
//  - equilateral triangles: exact tiling by k' rows of upward/downward
//    triangles of side L / k', the largest tile count whose tiles still admit
//    an inscribed rho-square (kappa = 3, eta = sqrt(3)/4);
//  - products of the above: Cartesian combination (see product_covering).
// Unbounded domains require a window; elements are generated lazily to cover
// it. Throws NoCubeFits when no rho-cube fits in the domain (or in a factor).
Covering build_covering(const Domain& domain, double rho, const std::optional<Box>& window);

// Cartesian combination: elements Q_j x Q'_j' (indexed j * n' + j'), kappa
// multiplies, l concatenates, and with r = sqrt(d/d') the combined map
// psi(x, y) = (r psi_j(x) / diam(psi_j(Q_j)), psi'_j'(y) / diam(psi'_j'(Q'_j')))
// gives eta = eta_a * eta_b * d^(d/2) * d'^(d'/2) / (d+d')^((d+d')/2).
// Throws RhoMismatch when the factors use different rho.
Covering product_covering(const Covering& a, const Covering& b);

// Validates a covering against its domain: Monte Carlo coverage and overlap
// multiplicity inside the window (required for unbounded domains), plus exact
// per-element checks (inscribed cube, bounding sides, measured eta).
// pass = uncovered <= 1e-3 and multiplicity <= kappa and every element check.
CoveringReport validate_covering(const Covering& covering, const Domain& domain,
                                 const std::optional<Box>& window, const QuadratureSpec& spec);

Json covering_to_json(const Covering& c);
Covering covering_from_json(const Json& j, const std::string& path);

}  // namespace lsv
