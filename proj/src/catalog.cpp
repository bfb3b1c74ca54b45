#include "prestrain/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace prestrain {

namespace {

std::pair<Jet2, Jet2> coords(const Point2& p) {
  return {Jet2::variable(p[0], 0), Jet2::variable(p[1], 1)};
}

}  // namespace

MetricField make_block_diag_metric(const BlockDiagParams& p) {
  Poly2 lam = p.lambda;
  return make_metric_from_jets("block-diag", p.domain, [lam](const Point2& q) {
    auto [x1, x2] = coords(q);
    Jet2 l = lam.eval(x1, x2);
    // order (11, 22, 33, 12, 13, 23)
    return SymJet3{Jet2(1.0), Jet2(1.0), l, Jet2(0.0), Jet2(0.0), Jet2(0.0)};
  });
}

MetricField make_conformal_metric(const ConformalParams& p) {
  Poly2 ex = p.exponent;
  return make_metric_from_jets("conformal", p.domain, [ex](const Point2& q) {
    auto [x1, x2] = coords(q);
    Jet2 l = exp(ex.eval(x1, x2));
    return SymJet3{l, l, l, Jet2(0.0), Jet2(0.0), Jet2(0.0)};
  });
}

MetricField make_shear_metric(const ShearParams& p) {
  Poly2 l2 = p.lambda2;
  return make_metric_from_jets("shear", p.domain, [l2](const Point2& q) {
    auto [x1, x2] = coords(q);
    Jet2 l = l2.eval(x1, x2);
    return SymJet3{Jet2(1.0), Jet2(1.0), l * l + 1.0, Jet2(0.0), Jet2(0.0), l};
  });
}

MetricField make_cylinder_shear_metric(Rect domain) {
  ShearParams p;
  p.lambda2 = Poly2{0, 0, -1, 0, 0, 0};  // l2 = -x2
  p.domain = domain;
  MetricField M = make_shear_metric(p);
  M.label = "cylinder-shear";
  return M;
}

MetricField make_paraboloid_metric(Rect domain) {
  return make_metric_from_jets("paraboloid", domain, [](const Point2& q) {
    auto [x1, x2] = coords(q);
    // Cosserat column b = (-x1^3/3, x2^3/3, (x1^2 - x2^2)/2).
    Jet2 b1 = -pow_int(x1, 3) / 3.0;
    Jet2 b2 = pow_int(x2, 3) / 3.0;
    Jet2 b3 = (x1 * x1 - x2 * x2) / 2.0;
    SymJet3 s;
    s[0] = 1.0 + x1 * x1;            // G11
    s[1] = 1.0 + x2 * x2;            // G22
    s[2] = b1 * b1 + b2 * b2 + b3 * b3;  // G33 = |b|^2
    s[3] = x1 * x2;                  // G12
    s[4] = b1 + x1 * b3;             // G13 = <d1 y, b>
    s[5] = b2 + x2 * b3;             // G23 = <d2 y, b>
    return s;
  });
}

MetricField make_sampled_metric(const Grid2& grid, std::vector<Mat3> samples,
                                std::string label) {
  grid.validate();
  if (static_cast<int>(samples.size()) != grid.size())
    throw ValidationError("sampled metric: node count mismatch");
  for (const auto& G : samples) require_spd(G, "sampled metric node");
  auto values = std::make_shared<std::vector<Mat3>>(std::move(samples));
  Grid2 g = grid;

  MetricField M;
  M.label = std::move(label);
  M.domain = g.box;
  M.value = [g, values](const Point2& p) -> Mat3 {
    // Bilinear interpolation on the sample grid.
    double s = (p[0] - g.box.x1_min) / g.h1();
    double t = (p[1] - g.box.x2_min) / g.h2();
    int i = std::clamp(static_cast<int>(std::floor(s)), 0, g.nx - 2);
    int j = std::clamp(static_cast<int>(std::floor(t)), 0, g.ny - 2);
    double a = std::clamp(s - i, 0.0, 1.0);
    double b = std::clamp(t - j, 0.0, 1.0);
    return ((1 - a) * (1 - b) * (*values)[g.index(i, j)] +
            a * (1 - b) * (*values)[g.index(i + 1, j)] +
            (1 - a) * b * (*values)[g.index(i, j + 1)] +
            a * b * (*values)[g.index(i + 1, j + 1)]);
  };
  // No analytic derivative evaluators: callers fall back to the documented
  // finite-difference path.
  M.fd_step = 0.25 * std::min(g.h1(), g.h2());
  return M;
}

Vec3 flat_immersion_point(const Point2& p) { return Vec3(p[0], p[1], 0.0); }

Vec3 cylinder_immersion_point(const Point2& p) {
  return Vec3(p[0], std::sin(p[1]), std::cos(p[1]));
}

Vec3 paraboloid_immersion_point(const Point2& p) {
  return Vec3(p[0], p[1], 0.5 * (p[0] * p[0] + p[1] * p[1]));
}

}  // namespace prestrain
