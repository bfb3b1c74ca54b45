#pragma once

// Thin-plate 3d energy E^h(u) = (1/h) integral over Omega x (-h/2, h/2) of
// W(grad u * A^{-1}), its Gauss-Legendre quadrature, frame-indifferent
// density choices, explicit recovery families (parabolic block-diag ansatz,
// conformal ansatz, Kirchhoff ansatz from a discrete immersion), and the
// log-log scaling fit.

#include "prestrain/catalog.hpp"
#include "prestrain/core.hpp"
#include "prestrain/elastic.hpp"
#include "prestrain/immersion.hpp"
#include "prestrain/metric.hpp"

namespace prestrain {

enum class DensityKind { GreenQuadratic, DistSqSo3 };

// Frame-indifferent stored-energy density vanishing exactly on SO(3).
//  GreenQuadratic: (mu/8) |F^T F - Id|^2 + (lambda/8) tr(F^T F - Id)^2,
//    whose second differential at the identity is mu|sym F|^2 + lambda tr^2 F.
//  DistSqSo3: (mu/2) dist^2(F, SO(3)) via the polar factor; its second
//    differential is mu |sym F|^2 (the lambda modulus does not enter).
struct DensityW {
  DensityKind kind = DensityKind::GreenQuadratic;
  IsotropicModuli m;

  double operator()(const Mat3& F) const;
};

double dist_sq_so3(const Mat3& F);

// A 3d deformation with evaluator and analytic gradient.
struct Deformation3 {
  std::string label;
  Rect domain;  // midplane footprint
  std::function<Vec3(const Vec3&)> u;
  std::function<Mat3(const Vec3&)> grad;
};

struct QuadratureSpec {
  int cells1 = 16, cells2 = 16;  // in-plane quadrature mesh
  int q_plane = 3;               // Gauss-Legendre points per cell per axis
  int q_thick = 6;               // Gauss-Legendre points through thickness
};

// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

double energy_3d(const DensityW& W, const MetricField& M, const Deformation3& def, double h,
                 const QuadratureSpec& quad = {}, int threads = 0);

// Explicit h^4 recovery for G = diag(1, 1, lambda):
//   u = (x1 - x3^2/4 d1 lambda, x2 - x3^2/4 d2 lambda, sqrt(lambda) x3).
Deformation3 recovery_parabolic(const BlockDiagParams& params);

// Explicit h^4 recovery for G = exp(a x1 + b x2) Id3 built on the conformal
// flat immersion of the minor (log lambda harmonic by construction):
//   u = y* + x3 sqrt(lambda) e3 - x3^2/4 ((grad y)^{-T} grad lambda)*.
Deformation3 recovery_conformal(const ConformalParams& params);

// Kirchhoff-type recovery u = y + x3 b + (x3^2/2) d from a discrete
// immersion: b is the Cosserat field, and
//   d = Q^{-T}( c0(x', (grad y)^T grad b) - 1/2 (d1|b|^2, d2|b|^2, 0) ),
// Q = [d1 y, d2 y, b]. Nodal fields are interpolated by tensor-product
// cubics and the in-plane gradient is the derivative of the interpolant.
Deformation3 recovery_kirchhoff(const MetricField& M, const QuadraticForm3& qf,
                                const Immersion& im);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;        // log E = slope * log h + intercept
  double max_log_residual = 0.0;
  int samples_used = 0;
  bool all_below_floor = false;  // every energy under the zero floor
};

// Least-squares slope of log E against log h. Energies at or below `floor`
// count as exact zeros and are excluded from the fit.
ScalingFit fit_scaling(const std::vector<double>& h, const std::vector<double>& E,
                       double floor = 1e-14);

}  // namespace prestrain
