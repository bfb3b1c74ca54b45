#include "prestrain/elastic.hpp"

#include "prestrain/metric.hpp"

#include <cmath>
#include <sstream>

namespace prestrain {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

Vec6 sym_to_basis(const Mat3& S) {
  Vec6 v;
  v << S(0, 0), S(1, 1), S(2, 2), std::sqrt(2.0) * S(0, 1), std::sqrt(2.0) * S(0, 2),
      std::sqrt(2.0) * S(1, 2);
  return v;
}

Mat3 basis_to_sym(const Vec6& v) {
  Mat3 S;
  S << v[0], kInvSqrt2 * v[3], kInvSqrt2 * v[4],
      kInvSqrt2 * v[3], v[1], kInvSqrt2 * v[5],
      kInvSqrt2 * v[4], kInvSqrt2 * v[5], v[2];
  return S;
}

QuadraticForm3 QuadraticForm3::isotropic(IsotropicModuli m) {
  m.validate();
  QuadraticForm3 qf;
  qf.iso_ = m;
  return qf;
}

QuadraticForm3 QuadraticForm3::general(const Mat6& Q) {
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw ValidationError("general quadratic form must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat6> es(Q);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw ValidationError("general quadratic form must be positive definite");
  QuadraticForm3 qf;
  qf.Q_ = Q;
  return qf;
}

const IsotropicModuli& QuadraticForm3::moduli() const {
  if (!iso_) throw ValidationError("quadratic form is not isotropic");
  return *iso_;
}

Mat3 QuadraticForm3::l3(const Mat3& F) const {
  Mat3 S = 0.5 * (F + F.transpose());
  if (iso_) return iso_->mu * S + iso_->lambda * S.trace() * Mat3::Identity();
  return basis_to_sym(Q_ * sym_to_basis(S));
}

double QuadraticForm3::q3(const Mat3& F) const {
  Mat3 S = 0.5 * (F + F.transpose());
  return (l3(S).array() * S.array()).sum();
}

double q3(const QuadraticForm3& qf, const Mat3& F) { return qf.q3(F); }

EffectiveDensityContext EffectiveDensityContext::from_prestrain(QuadraticForm3 qf,
                                                                const Mat3& A) {
  EffectiveDensityContext ctx{std::move(qf)};
  ctx.A = A;
  ctx.Ainv = A.inverse();
  ctx.d = ctx.Ainv * Vec3::UnitZ();
  for (int i = 0; i < 3; ++i) {
    Mat3 outer = Vec3::Unit(i) * ctx.d.transpose();
    ctx.MA.col(i) = ctx.qf.l3(outer) * ctx.d;
  }
  ctx.MA_solver.compute(ctx.MA);
  if (ctx.MA_solver.info() != Eigen::Success)
    throw NumericalError("effective density: M_A factorization failed");
  return ctx;
}

EffectiveDensityContext EffectiveDensityContext::from_metric(QuadraticForm3 qf, const Mat3& G) {
  return from_prestrain(std::move(qf), metric_sqrt(G));
}

Vec3 minimizer_c0(const EffectiveDensityContext& ctx, const Mat2& F) {
  Mat3 D = ctx.Ainv * embed_star(F) * ctx.Ainv;
  Vec3 rhs = ctx.qf.l3(D) * ctx.d;
  return -(ctx.A * ctx.MA_solver.solve(rhs));
}

double q2_general(const EffectiveDensityContext& ctx, const Mat2& F) {
  Mat3 D = ctx.Ainv * embed_star(F) * ctx.Ainv;
  Vec3 v = ctx.qf.l3(D) * ctx.d;
  return ctx.qf.q3(D) - v.dot(ctx.MA_solver.solve(v));
}

Q2Eval q2_general_with_grad(const EffectiveDensityContext& ctx, const Mat2& F) {
  Vec3 c0 = minimizer_c0(ctx, F);
  Mat3 X = embed_star(F);
  X.col(2) += 0.5 * c0;
  X.row(2) += 0.5 * c0.transpose();
  Mat3 D = ctx.Ainv * X * ctx.Ainv;
  Mat3 L = ctx.qf.l3(D);
  Q2Eval out;
  out.value = ctx.qf.q3(D);
  // d/dF_ab Q3(A^{-1}(F* + sym(c0 (x) e3))A^{-1}) at frozen c0:
  // 2 (A^{-1} L3(D) A^{-1})_ab restricted to the in-plane block.
  Mat3 g = 2.0 * ctx.Ainv * L * ctx.Ainv;
  out.grad = g.topLeftCorner<2, 2>();
  return out;
}

double q2_iso0(const IsotropicModuli& m, const Mat2& F) {
  Mat2 S = 0.5 * (F + F.transpose());
  return m.mu * S.squaredNorm() + m.beta() * S.trace() * S.trace();
}

Q2Eval q2_iso_minor_with_grad(const IsotropicModuli& m, const Mat2& minor_inv, const Mat2& F) {
  Mat2 S = 0.5 * (F + F.transpose());
  Mat2 GS = minor_inv * S;
  Mat2 GSG = GS * minor_inv;
  double tr = GS.trace();
  Q2Eval out;
  out.value = m.mu * (GSG.array() * S.array()).sum() + m.beta() * tr * tr;
  out.grad = 2.0 * m.mu * GSG + 2.0 * m.beta() * tr * minor_inv;
  return out;
}

IsoQ2Routes q2_isotropic_routes(const IsotropicModuli& m, const Mat3& G, const Mat2& F) {
  m.validate();
  Mat2 S = 0.5 * (F + F.transpose());
  double beta = m.beta();

  // Route (a): through the prestrain A = sqrt(G).
  Mat3 A = metric_sqrt(G);
  Mat3 Ainv = A.inverse();
  Mat3 D = Ainv * embed_star(S) * Ainv;
  Vec3 d = Ainv * Vec3::UnitZ();
  double d2 = d.squaredNorm();
  Vec3 Dd = D * d;
  double dDd = Dd.dot(d);
  double qa = m.mu * (D.squaredNorm() - 2.0 * Dd.squaredNorm() / d2 + dDd * dDd / (d2 * d2)) +
              beta * std::pow(D.trace() - dDd / d2, 2);

  // Route (b): the same invariants from C = G^{-1} F* and P = G^{-1} alone:
  // tr D = tr C, |D|^2 = tr C^2, |Dd|^2 = <C^2 P e3, e3>, |d|^2 = P33,
  // <Dd, d> = <C P e3, e3>.
  Mat3 P = G.inverse();
  Mat3 C = P * embed_star(S);
  double p33 = P(2, 2);
  Vec3 Pe3 = P.col(2);
  double trC = C.trace();
  double trC2 = (C * C).trace();
  double cdd = (C * Pe3)[2];
  double c2dd = (C * C * Pe3)[2];
  double qb = m.mu * (trC2 - 2.0 * c2dd / p33 + cdd * cdd / (p33 * p33)) +
              beta * std::pow(trC - cdd / p33, 2);

  // Route (c): flat form of the sqrt-minor conjugation.
  Mat2 minor = principal_minor(G);
  Eigen::SelfAdjointEigenSolver<Mat2> es(minor);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw ValidationError("q2_isotropic_closed: principal minor not positive definite");
  Mat2 minor_isqrt = es.operatorInverseSqrt();
  double qc = q2_iso0(m, minor_isqrt * S * minor_isqrt);

  return {qa, qb, qc};
}

double q2_isotropic_closed(const IsotropicModuli& m, const Mat3& G, const Mat2& F) {
  IsoQ2Routes r = q2_isotropic_routes(m, G, F);
  double scale = std::max({1.0, std::abs(r.prestrain), std::abs(r.invariant),
                           std::abs(r.sqrt_minor)});
  if (std::abs(r.prestrain - r.invariant) > 1e-10 * scale ||
      std::abs(r.prestrain - r.sqrt_minor) > 1e-10 * scale) {
    std::ostringstream os;
    os << "q2_isotropic_closed: route disagreement " << r.prestrain << " / " << r.invariant
       << " / " << r.sqrt_minor;
    throw NumericalError(os.str());
  }
  return r.prestrain;
}

}  // namespace prestrain
