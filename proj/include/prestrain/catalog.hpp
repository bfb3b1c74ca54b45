#pragma once

// Built-in metric families. Profiles are user-parameterizable quadratic
// polynomials (or exponentials where the family is exponential); defaults
// reproduce the reference configurations used throughout the tests.

#include "prestrain/metric.hpp"
#include "prestrain/nematic.hpp"

namespace prestrain {

// Family "block-diag": G = diag(1, 1, lambda(x')), lambda > 0.
// Default lambda = 1 + x1^2 on (0,1)^2.
struct BlockDiagParams {
  Poly2 lambda{1, 0, 0, 1, 0, 0};
  Rect domain{0, 1, 0, 1};
};
MetricField make_block_diag_metric(const BlockDiagParams& p = {});

// Family "conformal": G = lambda(x') Id3 with lambda = exp(poly2).
// Default lambda = exp(x1) on (0,1)^2 (harmonic log lambda).
struct ConformalParams {
  Poly2 exponent{0, 1, 0, 0, 0, 0};
  Rect domain{0, 1, 0, 1};
};
MetricField make_conformal_metric(const ConformalParams& p = {});

// Family "shear": G = [[1,0,0],[0,1,l2],[0,l2,l2^2+1]] with profile
// l2(x'). Default l2 = x1^2 on (0,1)^2.
struct ShearParams {
  Poly2 lambda2{0, 0, 0, 1, 0, 0};
  Rect domain{0, 1, 0, 1};
};
MetricField make_shear_metric(const ShearParams& p = {});

// Fixed cylinder-compatible shear metric: l2 = -x2, l3 = x2^2 + 1 on (0,1)^2.
MetricField make_cylinder_shear_metric(Rect domain = {0, 1, 0, 1});

// Fixed paraboloid-immersion metric on (1.2,2.2) x (0.1,1.1) (the domain
// keeps x1 > x2 > 0 on the closure):
//   tangent frame of y = (x1, x2, (x1^2+x2^2)/2) paired with the curl-free
//   Cosserat column b = (-x1^3/3, x2^3/3, (x1^2-x2^2)/2).
MetricField make_paraboloid_metric(Rect domain = {1.2, 2.2, 0.1, 1.1});

// Sampled metric: nodal 3x3 values on a uniform grid, bilinear interpolation
// in between (derivatives are those of the interpolant).
MetricField make_sampled_metric(const Grid2& grid, std::vector<Mat3> samples,
                                std::string label = "sampled");

// Catalog reference immersions used as seeds and in the scaling module.
Vec3 flat_immersion_point(const Point2& p);
Vec3 cylinder_immersion_point(const Point2& p);
Vec3 paraboloid_immersion_point(const Point2& p);

}  // namespace prestrain
