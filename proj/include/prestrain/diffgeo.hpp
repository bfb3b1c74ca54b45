#pragma once

// Curvature pipeline for thickness-independent metrics G(x'): Christoffel
// symbols (derivatives along x3 vanish), mixed and covariant Riemann
// components, Ricci and scalar curvature, the classifying curvature triple
// (R^3_112, R^3_221, R_1212), Gaussian curvature of the 2x2 minor, the
// kinematic classification of a metric, the target second fundamental form,
// and Codazzi-Mainardi / Gauss compatibility residuals.

#include "prestrain/core.hpp"
#include "prestrain/metric.hpp"

#include <array>

namespace prestrain {

// Gamma^i_{kl}, symmetric in (k, l). Index order: g[i][k][l].
struct Christoffels {
  double g[3][3][3] = {};
};

Christoffels christoffel(const MetricField& M, const Point2& p);
// From precomputed inputs (shared by the derivative path).
Christoffels christoffel_from(const Mat3& Ginv, const Mat3& d1G, const Mat3& d2G);

// In-plane derivatives d_a Gamma^i_{kl}, a in {0, 1}: analytic when the
// metric carries second derivatives, nested finite differences otherwise.
struct ChristoffelDerivs {
  Christoffels gamma;
  double d[2][3][3][3] = {};
};
ChristoffelDerivs christoffel_derivatives(const MetricField& M, const Point2& p);

// Mixed Riemann tensor R^s_{ijk} = d_j Gamma^s_{ik} - d_k Gamma^s_{ij}
//                                 + Gamma^s_{jm} Gamma^m_{ik} - Gamma^s_{km} Gamma^m_{ij}.
struct RiemannTensor {
  double r[3][3][3][3] = {};  // r[s][i][j][k]
  double sup_abs() const;
};
RiemannTensor riemann(const MetricField& M, const Point2& p);

// Covariant components R_{sijk} = sum_m G_{sm} R^m_{ijk}.
RiemannTensor lower_riemann(const Mat3& G, const RiemannTensor& R);

// Ricci tensor R_ij = sum_s R^s_{isj} and scalar curvature S = G^{ij} R_ij.
Mat3 ricci(const RiemannTensor& R);
double scalar_curvature(const Mat3& Ginv, const Mat3& Ric);
double scalar_curvature(const MetricField& M, const Point2& p);

// The kinematic triple.
struct CurvatureTriple {
  double r3_112 = 0.0;
  double r3_221 = 0.0;
  double r_1212 = 0.0;
  double sup_abs() const;
};
CurvatureTriple curvature_triple(const MetricField& M, const Point2& p);

// Gaussian curvature of the principal 2x2 minor via the Brioschi
// determinant formula (uses first and second derivatives of the minor).
double gaussian_curvature_2d(const MetricField& M, const Point2& p);
// Same formula from raw entry data (e, f, g), their gradients and Hessians.
double brioschi_curvature(const std::array<Jet2, 3>& efg);

// Per-node curvature samples plus grid sup-norms.
struct CurvatureReport {
  Grid2 grid;
  std::vector<CurvatureTriple> triple;
  std::vector<double> scalar;
  std::vector<double> kappa2d;
  std::vector<double> riemann_sup_node;
  double triple_sup = 0.0;
  double riemann_sup = 0.0;
  double scalar_sup = 0.0;
  double kappa_sup = 0.0;
  // Scale factors entering the classification threshold.
  double dG_sup = 0.0;
  double d2G_sup = 0.0;
};
CurvatureReport curvature_report(const MetricField& M, const Grid2& grid, int threads = 0);

enum class MetricClass { Immersible, ZeroBendingNonImmersible, Bending };
const char* to_string(MetricClass c);

struct ClassifyResult {
  MetricClass verdict = MetricClass::Immersible;
  double riemann_sup = 0.0;
  double triple_sup = 0.0;
  double scalar_sup = 0.0;
  double kappa_sup = 0.0;
  double threshold = 0.0;         // tau for the mixed Riemann tensor
  double triple_threshold = 0.0;  // tau scaled by (1 + sup|G|) for the lowered entry
};
// Verdict on a grid: Immersible when the whole Riemann tensor vanishes,
// ZeroBendingNonImmersible when only the triple vanishes, Bending otherwise.
// Threshold tau = 1e-6 * (1 + sup|dG|^2 + sup|d2G|), sups over grid nodes.
ClassifyResult classify(const MetricField& M, const Grid2& grid, int threads = 0);
ClassifyResult classify(const CurvatureReport& report, const MetricField& M);

// Target second fundamental form Pi_ij = -Gamma^3_ij / sqrt(G^33).
Mat2 target_second_form(const MetricField& M, const Point2& p);

// 2d Christoffel symbols of the minor, via the reduction
// gamma^s_{kl} = Gamma^s_{kl} - (G^{3s} / G^{33}) Gamma^3_{kl}.
struct Christoffels2 {
  double g[2][2][2] = {};
};
Christoffels2 christoffel_2d(const MetricField& M, const Point2& p);

// Compatibility residuals of a candidate second form Pi with the minor:
// the two Codazzi-Mainardi equations and the Gauss relation
// det Pi = kappa * det G_2x2, as sup-norms over interior grid nodes
// (Pi is differentiated by finite differences).
struct CodazziGaussResidual {
  double cm1_sup = 0.0;
  double cm2_sup = 0.0;
  double gauss_sup = 0.0;
};
CodazziGaussResidual codazzi_gauss_residual(const MetricField& M,
                                            const std::function<Mat2(const Point2&)>& Pi,
                                            const Grid2& grid);

}  // namespace prestrain
