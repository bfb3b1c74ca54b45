#pragma once

// Prestrain metric fields G(x') on a planar domain: evaluation, SPD square
// root A = sqrt(G), first/second derivatives (analytic when the field was
// built from jet expressions, second-order finite differences otherwise),
// and the small block helpers (principal 2x2 minor, F* embedding).

#include "prestrain/core.hpp"
#include "prestrain/jet.hpp"

#include <array>
#include <optional>

namespace prestrain {

// Symmetric 3x3 matrix of jets; entry order (11, 22, 33, 12, 13, 23).
using SymJet3 = std::array<Jet2, 6>;

Mat3 sym_jet_value(const SymJet3& s);
std::array<Mat3, 2> sym_jet_deriv(const SymJet3& s);
std::array<Mat3, 3> sym_jet_second(const SymJet3& s);  // d11, d12, d22

struct MetricField {
  std::string label;
  Rect domain;
  std::function<Mat3(const Point2&)> value;
  // Optional analytic derivative evaluators (d1 G, d2 G).
  std::function<std::array<Mat3, 2>(const Point2&)> deriv;
  // Optional analytic second derivatives (d11 G, d12 G, d22 G).
  std::function<std::array<Mat3, 3>(const Point2&)> second;
  // Finite-difference step; 0 means the default 1e-4 * diameter(domain).
  double fd_step = 0.0;

  bool has_analytic_deriv() const { return static_cast<bool>(deriv); }
  bool has_analytic_second() const { return static_cast<bool>(second); }
  double fd_step_or_default() const {
    return fd_step > 0.0 ? fd_step : 1e-4 * domain.diameter();
  }

  // Evaluate with domain check (points outside the closed rectangle are
  // configuration errors, not math).
  Mat3 at(const Point2& p) const;
};

// Build a metric field from a single jet-expression evaluator; analytic
// first and second derivatives come along for free.
MetricField make_metric_from_jets(std::string label, Rect domain,
                                  std::function<SymJet3(const Point2&)> entries);

// SPD square root via spectral decomposition. Rejects matrices whose
// smallest eigenvalue falls below 1e-10 times the largest.
Mat3 metric_sqrt(const Mat3& G);

// Relative SPD gate shared by metric validation.
void require_spd(const Mat3& G, const std::string& context);

struct MetricDerivs {
  Mat3 d1, d2;
};

// First derivatives: analytic when available, else central differences of
// order 2 (one-sided second-order stencils near the domain boundary so no
// probe leaves the closed rectangle).
MetricDerivs metric_derivatives(const MetricField& M, const Point2& p);
// Force the finite-difference path (used by the analytic-vs-FD cross checks).
MetricDerivs metric_derivatives_fd(const MetricField& M, const Point2& p, double h);

// Second derivatives (d11, d12, d22): analytic when available, else nested
// differences of the first-derivative field with a widened step
// sqrt(h_fd * diameter) to control noise amplification.
std::array<Mat3, 3> metric_second_derivatives(const MetricField& M, const Point2& p);

// Principal 2x2 minor G_2x2.
Mat2 principal_minor(const Mat3& G);

// Embed a 2x2 block as the top-left corner of a 3x3 zero matrix (F*).
Mat3 embed_star(const Mat2& F);

// Scalar field differentiation helpers reused by recovery ansatz code.
double fd_scalar_derivative(const std::function<double(const Point2&)>& f, const Point2& p,
                            int axis, double h, const Rect& domain);

}  // namespace prestrain
