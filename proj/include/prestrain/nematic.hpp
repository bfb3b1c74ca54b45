#pragma once

// Liquid-crystal / nematic prestrain: director fields n(x') with order
// parameter r and exponent delta, the induced metric
// G = r^(2 delta) (Id3 + (r^2-1) n (x) n), flatness diagnostics for planar
// directors, the closed-form effective quadratic forms, and the Cosserat
// vector for general 3d directors.

#include "prestrain/core.hpp"
#include "prestrain/jet.hpp"
#include "prestrain/metric.hpp"

#include <array>

namespace prestrain {

struct IsotropicModuli;  // elastic.hpp

struct PatternSpec {
  enum class Kind { Radial, Azimuthal, Spiral, Custom };
  Kind kind = Kind::Radial;
  double psi = 0.0;           // spiral offset angle
  Vec2 center = Vec2::Zero();  // disclination center (kept outside the domain)
  Poly2 theta;                 // custom in-plane angle field
  Poly2 tilt;                  // out-of-plane angle; 0 keeps the director planar
};

struct DirectorField {
  std::string label;
  Rect domain;
  double r = 1.0;      // order parameter, r > 0
  double delta = 0.0;  // exponent delta = -nu/(nu+1)
  // Unit director as jets (n1, n2, n3).
  std::function<std::array<Jet2, 3>(const Point2&)> nhat;

  void validate() const;
  bool planar_at(const Point2& p, double tol = 1e-12) const;
};

double delta_from_poisson(double nu);

DirectorField make_director(const PatternSpec& spec, double r, double delta, Rect domain);

// Metric Id3 + (r^2-1) n (x) n scaled by r^(2 delta), with analytic
// derivatives from the director jets.
MetricField nematic_metric(const DirectorField& dir);

// Prestrain A = sqrt(G) in closed form: r^delta (Id3 + (r-1) n (x) n).
Mat3 nematic_prestrain(const DirectorField& dir, const Point2& p);

// Symmetric 2x2 field given by jet entries (e, f, g) = (F11, F12, F22).
struct SymField2 {
  Rect domain;
  std::function<std::array<Jet2, 3>(const Point2&)> entries;
};

// curl^T curl F = F11,22 - 2 F12,12 + F22,11 from the analytic jets.
double curl_t_curl(const SymField2& field, const Point2& p);
// The 2x2 principal minor of the director metric as a jet field.
SymField2 nematic_minor_field(const DirectorField& dir);
// Finite-difference variant for plain (jet-free) fields.
double curl_t_curl_fd(const std::function<Mat2(const Point2&)>& field, const Point2& p, double h,
                      const Rect& domain);

// Planar-director flatness test: the four equivalent conditions
//   (i)  Riemann tensor of G vanishes,
//   (ii) Gaussian curvature of Id2 + (r^2-1) n (x) n vanishes,
//   (iii) curl^T curl G_2x2 vanishes,
//   (iv) the curvature triple (R^3_112, R^3_221, R_1212) vanishes,
// evaluated as sup-norm residuals over the grid.
struct NematicClassification {
  double riemann_sup = 0.0;     // (i)
  double kappa_sup = 0.0;       // (ii)
  double curlcurl_sup = 0.0;    // (iii)
  double triple_sup = 0.0;      // (iv)
  double threshold = 0.0;
  bool immersible = false;
  bool conditions_consistent = false;  // all four residuals agree on the verdict
  bool subunit_r = false;              // r < 1: outside the theorem's stated range
};
NematicClassification nematic_classify(const DirectorField& dir, const Grid2& grid);

// Effective quadratic form at x' for symmetric 2x2 input, evaluated through
// the two closed forms (direct planar formula and the sqrt-minor route) and
// the general isotropic reduction; the three are cross-checked to 1e-9.
double nematic_q2(const DirectorField& dir, const IsotropicModuli& m, const Point2& p,
                  const Mat2& F);

// Cosserat vector via the general-director formula
//   b = (r^2-1) n3 gamma (grad y) n + r sqrt(gamma) r^delta N,
// gamma = 1/(n3^2 + |n|^2 r^2), from the deformed tangent frame (J = grad y,
// N = unit normal).
Vec3 nematic_cosserat(const DirectorField& dir, const Point2& p, const Mat32& J, const Vec3& N);

// Gaussian curvature of the unscaled planar-director 2d metric
// Id2 + (r^2-1) n (x) n (the quantity in condition (ii)).
double nematic_kappa_unscaled(const DirectorField& dir, const Point2& p);

// Right-hand side of the curvature identity
//   kappa(Id2 + gamma n (x) n) = -1/2 * gamma/(gamma+1) * curl^T curl (n (x) n),
// gamma = r^2 - 1, for planar directors.
double nematic_kappa_identity_rhs(const DirectorField& dir, const Point2& p);

}  // namespace prestrain
