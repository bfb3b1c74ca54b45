#pragma once

// Effective quadratic forms of the elastic density: the 3d form
// Q3(F) = <L3 sym F, sym F>, the prestrain-adapted context (A, A^{-1}, M_A),
// the explicit minimizer c0 of c -> Q3(A^{-1}(F* + sym(c (x) e3)) A^{-1}),
// the reduced 2d form Q2 in its general and isotropic closed forms.

#include "prestrain/core.hpp"

#include <optional>

namespace prestrain {

struct IsotropicModuli {
  double mu = 1.0;
  double lambda = 1.0;

  void validate() const {
    if (!(mu > 0.0) || !(lambda >= 0.0))
      throw ValidationError("moduli require mu > 0 and lambda >= 0");
  }
  // Coefficient of the trace term in the reduced form: lambda mu / (lambda + mu).
  double beta() const { return lambda * mu / (lambda + mu); }
};

// Q3 as either the isotropic pair (mu, lambda) or a general symmetric
// positive definite 6x6 matrix acting on the orthonormal basis of
// symmetric 3x3 matrices (order: e11, e22, e33, (e12+e21)/sqrt2,
// (e13+e31)/sqrt2, (e23+e32)/sqrt2).
class QuadraticForm3 {
 public:
  static QuadraticForm3 isotropic(IsotropicModuli m);
  static QuadraticForm3 general(const Mat6& Q);

  bool is_isotropic() const { return iso_.has_value(); }
  const IsotropicModuli& moduli() const;

  // L3(F) = mu sym F + lambda tr(F) Id in the isotropic case; the general
  // case applies the 6x6 matrix to the coordinates of sym F.
  Mat3 l3(const Mat3& F) const;
  double q3(const Mat3& F) const;  // <L3 F, sym F>

 private:
  std::optional<IsotropicModuli> iso_;
  Mat6 Q_ = Mat6::Identity();
};

Vec6 sym_to_basis(const Mat3& S);
Mat3 basis_to_sym(const Vec6& v);

// Per-point context: prestrain A = sqrt(G), its inverse, d = A^{-1} e3, and
// the SPD matrix M_A with columns M_A e_i = L3(e_i (x) d) d, prefactored.
struct EffectiveDensityContext {
  QuadraticForm3 qf;
  Mat3 A = Mat3::Identity();
  Mat3 Ainv = Mat3::Identity();
  Vec3 d = Vec3::UnitZ();
  Mat3 MA = Mat3::Identity();
  Eigen::LDLT<Mat3> MA_solver;

  static EffectiveDensityContext from_prestrain(QuadraticForm3 qf, const Mat3& A);
  static EffectiveDensityContext from_metric(QuadraticForm3 qf, const Mat3& G);
};

double q3(const QuadraticForm3& qf, const Mat3& F);

// Explicit minimizer of c -> Q3(A^{-1}(F* + sym(c (x) e3)) A^{-1}):
//   A^{-1} c0 = -M_A^{-1} L3(A^{-1} F* A^{-1}) A^{-1} e3.
Vec3 minimizer_c0(const EffectiveDensityContext& ctx, const Mat2& F);

// Reduced form via the substituted minimizer:
//   Q2 = Q3(D) - <M_A^{-1} L3(D) d, L3(D) d>,  D = A^{-1} F* A^{-1}.
double q2_general(const EffectiveDensityContext& ctx, const Mat2& F);

// Gradient of F -> q2_general(ctx, F) (envelope theorem: differentiate at
// the frozen minimizer), used by the bending assembly.
struct Q2Eval {
  double value = 0.0;
  Mat2 grad = Mat2::Zero();
};
Q2Eval q2_general_with_grad(const EffectiveDensityContext& ctx, const Mat2& F);

// Isotropic closed forms. All three equivalent routes are evaluated and
// cross-checked to 1e-10; the common value is returned:
//  (a) mu(|D|^2 - 2|Dd|^2/|d|^2 + <Dd,d>^2/|d|^4) + beta (tr D - <Dd,d>/|d|^2)^2,
//      D = A^{-1} F* A^{-1}, d = A^{-1} e3;
//  (b) the same expression driven by C = G^{-1} F* and P = G^{-1} only;
//  (c) Q2iso0( sqrt(G_2x2)^{-1} F sqrt(G_2x2)^{-1} ) with
//      Q2iso0(F) = mu |sym F|^2 + beta tr(F)^2.
double q2_isotropic_closed(const IsotropicModuli& m, const Mat3& G, const Mat2& F);

// The three route values individually (reported by the command-line tool).
struct IsoQ2Routes {
  double prestrain = 0.0;   // (a)
  double invariant = 0.0;   // (b)
  double sqrt_minor = 0.0;  // (c)
};
IsoQ2Routes q2_isotropic_routes(const IsotropicModuli& m, const Mat3& G, const Mat2& F);

// The flat-prestrain reduced form Q2iso0.
double q2_iso0(const IsotropicModuli& m, const Mat2& F);

// Fast single-route isotropic evaluation from the precomputed minor inverse:
// Q2(S) = mu <g^{-1} S g^{-1}, S> + beta tr(g^{-1} S)^2 for symmetric S,
// with gradient 2 mu g^{-1} S g^{-1} + 2 beta tr(g^{-1} S) g^{-1}.
Q2Eval q2_iso_minor_with_grad(const IsotropicModuli& m, const Mat2& minor_inv, const Mat2& F);

}  // namespace prestrain
