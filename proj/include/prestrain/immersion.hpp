#pragma once

// Discrete midplane immersions y: grid -> R^3, the Cosserat vector field,
// the reduced bending energy
//   I(y) = (1/24) integral Q2(x', (grad y)^T grad b) dx',
// its isometry defect, and the analytic gradient of the penalized objective
//   J_eps(y) = I(y) + (1/eps) integral |(grad y)^T grad y - G_2x2|^2 dx'.
// Grid derivatives are second-order central differences with one-sided
// second-order stencils on the boundary; the integral is the composite
// trapezoid rule on the nodes.

#include "prestrain/core.hpp"
#include "prestrain/elastic.hpp"
#include "prestrain/metric.hpp"

namespace prestrain {

struct Immersion {
  Grid2 grid;
  std::vector<Vec3> y;  // x1-major nodal positions

  void validate() const {
    grid.validate();
    if (static_cast<int>(y.size()) != grid.size())
      throw ValidationError("immersion node count mismatch");
  }
};

Immersion make_immersion(const Grid2& grid, const std::function<Vec3(const Point2&)>& f);

// Nodal derivative of a vector field along grid axis 0 or 1.
std::vector<Vec3> grid_derivative(const Grid2& grid, const std::vector<Vec3>& f, int axis);
std::vector<double> grid_derivative(const Grid2& grid, const std::vector<double>& f, int axis);
// Adjoint accumulation out += D_axis^T r (same stencils transposed).
void grid_derivative_adjoint(const Grid2& grid, const std::vector<Vec3>& r, int axis,
                             std::vector<Vec3>& out);

// Precomputed per-node metric data for the bending assembly.
struct BendingSetup {
  Grid2 grid;
  QuadraticForm3 qf;
  bool isotropic = true;
  IsotropicModuli moduli;
  std::vector<Mat2> minor;       // G_2x2
  std::vector<Mat2> minor_inv;   // G_2x2^{-1}
  std::vector<Vec2> shear_w;     // G_2x2^{-1} (G13, G23)
  std::vector<double> normal_s;  // sqrt(det G / det G_2x2)
  std::vector<double> weight;    // trapezoid weight
  // General (non-isotropic) route: per-node effective density context.
  std::vector<EffectiveDensityContext> ctx;

  static BendingSetup make(const MetricField& M, const QuadraticForm3& qf, const Grid2& grid);
};

// Cosserat field b = (grad y) G_2x2^{-1} (G13, G23)^T + sqrt(det G / det G_2x2) N.
struct CosseratField {
  std::vector<Vec3> b;
  std::vector<Vec3> normal;
  std::vector<Mat32> J;  // [d1 y, d2 y]
  int degenerate_nodes = 0;  // |d1 y x d2 y|^2 below 1e-12 * det G_2x2
};
CosseratField cosserat(const BendingSetup& setup, const Immersion& im);
CosseratField cosserat(const MetricField& M, const QuadraticForm3& qf, const Immersion& im);

// Second fundamental form (grad y)^T grad N of the discrete surface.
std::vector<Mat2> second_fundamental_form(const Immersion& im);

struct BendingEnergy {
  double energy = 0.0;             // I(y)
  double isometry_residual = 0.0;  // L2 norm of (grad y)^T grad y - G_2x2
  int degenerate_nodes = 0;
};
BendingEnergy bending_energy(const BendingSetup& setup, const Immersion& im);
BendingEnergy bending_energy(const MetricField& M, const QuadraticForm3& qf,
                             const Immersion& im);

// Penalized objective J_eps and (optionally) its analytic gradient with
// respect to the nodal positions. inv_eps = 0 evaluates the plain bending
// energy. Returns the objective value.
double bending_objective(const BendingSetup& setup, const std::vector<Vec3>& y, double inv_eps,
                         std::vector<Vec3>* grad, BendingEnergy* parts);

}  // namespace prestrain
