#include "prestrain/diffgeo.hpp"

#include <cmath>

namespace prestrain {

namespace {

// Derivatives along in-plane axes only; d_3 of anything is zero.
inline double dG(const std::array<Mat3, 2>& d, int axis, int m, int k) {
  return axis < 2 ? d[axis](m, k) : 0.0;
}

}  // namespace

Christoffels christoffel_from(const Mat3& Ginv, const Mat3& d1G, const Mat3& d2G) {
  std::array<Mat3, 2> d{d1G, d2G};
  Christoffels out;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) {
          double term = 0.0;
          if (l < 2) term += dG(d, l, m, k);
          if (k < 2) term += dG(d, k, m, l);
          if (m < 2) term -= dG(d, m, k, l);
          acc += Ginv(i, m) * term;
        }
        out.g[i][k][l] = 0.5 * acc;
        out.g[i][l][k] = out.g[i][k][l];
      }
  return out;
}

Christoffels christoffel(const MetricField& M, const Point2& p) {
  Mat3 G = M.at(p);
  MetricDerivs d = metric_derivatives(M, p);
  return christoffel_from(G.inverse(), d.d1, d.d2);
}

ChristoffelDerivs christoffel_derivatives(const MetricField& M, const Point2& p) {
  ChristoffelDerivs out;
  if (M.has_analytic_second()) {
    Mat3 G = M.at(p);
    Mat3 Ginv = G.inverse();
    MetricDerivs d = metric_derivatives(M, p);
    auto dd = metric_second_derivatives(M, p);  // d11, d12, d22
    out.gamma = christoffel_from(Ginv, d.d1, d.d2);
    std::array<Mat3, 2> first{d.d1, d.d2};
    for (int a = 0; a < 2; ++a) {
      // d_a G^{-1} = -G^{-1} (d_a G) G^{-1}
      Mat3 dGinv = -Ginv * first[a] * Ginv;
      std::array<Mat3, 2> dfirst = (a == 0) ? std::array<Mat3, 2>{dd[0], dd[1]}
                                            : std::array<Mat3, 2>{dd[1], dd[2]};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
          for (int l = k; l < 3; ++l) {
            double acc = 0.0;
            for (int m = 0; m < 3; ++m) {
              double term = 0.0, dterm = 0.0;
              if (l < 2) {
                term += first[l](m, k);
                dterm += dfirst[l](m, k);
              }
              if (k < 2) {
                term += first[k](m, l);
                dterm += dfirst[k](m, l);
              }
              if (m < 2) {
                term -= first[m](k, l);
                dterm -= dfirst[m](k, l);
              }
              acc += dGinv(i, m) * term + Ginv(i, m) * dterm;
            }
            out.d[a][i][k][l] = 0.5 * acc;
            out.d[a][i][l][k] = out.d[a][i][k][l];
          }
    }
    return out;
  }

  // Finite-difference fallback: difference the Christoffel field with the
  // widened step (the symbols already contain one finite difference).
  out.gamma = christoffel(M, p);
  double h = std::sqrt(M.fd_step_or_default() * M.domain.diameter());
  for (int a = 0; a < 2; ++a) {
    Point2 step = Point2::Zero();
    step[a] = h;
    auto eval = [&](const Point2& q) { return christoffel(M, q); };
    bool room_plus = M.domain.contains(p + step);
    bool room_minus = M.domain.contains(p - step);
    Christoffels cp, cm, cf;
    double w0 = 0, wp = 0, wm = 0, wf = 0;
    if (room_plus && room_minus) {
      cp = eval(p + step);
      cm = eval(p - step);
      wp = 0.5 / h;
      wm = -0.5 / h;
    } else if (room_plus) {
      cp = eval(p + step);
      cf = eval(p + 2.0 * step);
      w0 = -1.5 / h;
      wp = 2.0 / h;
      wf = -0.5 / h;
    } else if (room_minus) {
      cm = eval(p - step);
      cf = eval(p - 2.0 * step);
      w0 = 1.5 / h;
      wm = -2.0 / h;
      wf = 0.5 / h;
    } else {
      throw ValidationError("christoffel_derivatives: domain thinner than FD step");
    }
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          out.d[a][i][k][l] = w0 * out.gamma.g[i][k][l] + wp * cp.g[i][k][l] +
                              wm * cm.g[i][k][l] + wf * cf.g[i][k][l];
  }
  return out;
}

double RiemannTensor::sup_abs() const {
  double sup = 0.0;
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) sup = std::max(sup, std::abs(r[s][i][j][k]));
  return sup;
}

RiemannTensor riemann(const MetricField& M, const Point2& p) {
  ChristoffelDerivs cd = christoffel_derivatives(M, p);
  const auto& g = cd.gamma.g;
  RiemannTensor R;
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double v = 0.0;
          if (j < 2) v += cd.d[j][s][i][k];
          if (k < 2) v -= cd.d[k][s][i][j];
          for (int m = 0; m < 3; ++m) v += g[s][j][m] * g[m][i][k] - g[s][k][m] * g[m][i][j];
          R.r[s][i][j][k] = v;
        }
  return R;
}

RiemannTensor lower_riemann(const Mat3& G, const RiemannTensor& R) {
  RiemannTensor low;
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double v = 0.0;
          for (int m = 0; m < 3; ++m) v += G(s, m) * R.r[m][i][j][k];
          low.r[s][i][j][k] = v;
        }
  return low;
}

Mat3 ricci(const RiemannTensor& R) {
  Mat3 ric;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int s = 0; s < 3; ++s) v += R.r[s][i][s][j];
      ric(i, j) = v;
    }
  return ric;
}

double scalar_curvature(const Mat3& Ginv, const Mat3& Ric) {
  return (Ginv.array() * Ric.array()).sum();
}

double scalar_curvature(const MetricField& M, const Point2& p) {
  RiemannTensor R = riemann(M, p);
  return scalar_curvature(M.at(p).inverse(), ricci(R));
}

double CurvatureTriple::sup_abs() const {
  return std::max({std::abs(r3_112), std::abs(r3_221), std::abs(r_1212)});
}

CurvatureTriple curvature_triple(const MetricField& M, const Point2& p) {
  RiemannTensor R = riemann(M, p);
  RiemannTensor low = lower_riemann(M.at(p), R);
  CurvatureTriple t;
  t.r3_112 = R.r[2][0][0][1];
  t.r3_221 = R.r[2][1][1][0];
  t.r_1212 = low.r[0][1][0][1];
  return t;
}

double brioschi_curvature(const std::array<Jet2, 3>& efg) {
  const Jet2& e = efg[0];
  const Jet2& f = efg[1];
  const Jet2& g = efg[2];
  double q = -0.5 * e.h(1, 1) + f.h(0, 1) - 0.5 * g.h(0, 0);
  Mat3 m1, m2;
  m1 << q, 0.5 * e.g[0], f.g[0] - 0.5 * e.g[1],
      f.g[1] - 0.5 * g.g[0], e.v, f.v,
      0.5 * g.g[1], f.v, g.v;
  m2 << 0.0, 0.5 * e.g[1], 0.5 * g.g[0],
      0.5 * e.g[1], e.v, f.v,
      0.5 * g.g[0], f.v, g.v;
  double det = e.v * g.v - f.v * f.v;
  if (!(det > 0.0)) throw NumericalError("brioschi_curvature: minor not positive definite");
  return (m1.determinant() - m2.determinant()) / (det * det);
}

double gaussian_curvature_2d(const MetricField& M, const Point2& p) {
  Mat3 G = M.at(p);
  MetricDerivs d = metric_derivatives(M, p);
  auto dd = metric_second_derivatives(M, p);
  auto entry = [&](int a, int b) {
    Jet2 j(G(a, b));
    j.g = Vec2(d.d1(a, b), d.d2(a, b));
    j.h << dd[0](a, b), dd[1](a, b), dd[1](a, b), dd[2](a, b);
    return j;
  };
  return brioschi_curvature({entry(0, 0), entry(0, 1), entry(1, 1)});
}

CurvatureReport curvature_report(const MetricField& M, const Grid2& grid, int threads) {
  grid.validate();
  CurvatureReport rep;
  rep.grid = grid;
  int n = grid.size();
  rep.triple.resize(n);
  rep.scalar.resize(n);
  rep.kappa2d.resize(n);
  rep.riemann_sup_node.resize(n);
  std::vector<double> dg(n, 0.0), d2g(n, 0.0);

  parallel_for(
      n,
      [&](int idx) {
        int i = idx / grid.ny, j = idx % grid.ny;
        Point2 p = grid.node(i, j);
        Mat3 G = M.at(p);
        RiemannTensor R = riemann(M, p);
        RiemannTensor low = lower_riemann(G, R);
        rep.triple[idx] = {R.r[2][0][0][1], R.r[2][1][1][0], low.r[0][1][0][1]};
        rep.scalar[idx] = scalar_curvature(G.inverse(), ricci(R));
        rep.kappa2d[idx] = gaussian_curvature_2d(M, p);
        rep.riemann_sup_node[idx] = R.sup_abs();
        MetricDerivs d = metric_derivatives(M, p);
        dg[idx] = d.d1.squaredNorm() + d.d2.squaredNorm();
        auto dd = metric_second_derivatives(M, p);
        d2g[idx] = std::sqrt(dd[0].squaredNorm() + 2.0 * dd[1].squaredNorm() +
                             dd[2].squaredNorm());
      },
      threads);

  for (int idx = 0; idx < n; ++idx) {
    rep.triple_sup = std::max(rep.triple_sup, rep.triple[idx].sup_abs());
    rep.riemann_sup = std::max(rep.riemann_sup, rep.riemann_sup_node[idx]);
    rep.scalar_sup = std::max(rep.scalar_sup, std::abs(rep.scalar[idx]));
    rep.kappa_sup = std::max(rep.kappa_sup, std::abs(rep.kappa2d[idx]));
    rep.dG_sup = std::max(rep.dG_sup, dg[idx]);
    rep.d2G_sup = std::max(rep.d2G_sup, d2g[idx]);
  }
  return rep;
}

const char* to_string(MetricClass c) {
  switch (c) {
    case MetricClass::Immersible: return "immersible";
    case MetricClass::ZeroBendingNonImmersible: return "zero-bending-nonimmersible";
    case MetricClass::Bending: return "bending";
  }
  return "unknown";
}

ClassifyResult classify(const CurvatureReport& rep, const MetricField& M) {
  ClassifyResult res;
  res.riemann_sup = rep.riemann_sup;
  res.triple_sup = rep.triple_sup;
  res.scalar_sup = rep.scalar_sup;
  res.kappa_sup = rep.kappa_sup;
  res.threshold = 1e-6 * (1.0 + rep.dG_sup + rep.d2G_sup);
  // The lowered component R_1212 carries a factor of G, so its vanishing
  // test is scaled accordingly.
  double g_sup = 0.0;
  for (int i = 0; i < rep.grid.nx; ++i)
    for (int j = 0; j < rep.grid.ny; ++j)
      g_sup = std::max(g_sup, M.at(rep.grid.node(i, j)).cwiseAbs().maxCoeff());
  res.triple_threshold = res.threshold * (1.0 + g_sup);
  if (rep.riemann_sup < res.threshold && rep.triple_sup < res.triple_threshold)
    res.verdict = MetricClass::Immersible;
  else if (rep.triple_sup < res.triple_threshold)
    res.verdict = MetricClass::ZeroBendingNonImmersible;
  else
    res.verdict = MetricClass::Bending;
  return res;
}

ClassifyResult classify(const MetricField& M, const Grid2& grid, int threads) {
  return classify(curvature_report(M, grid, threads), M);
}

Mat2 target_second_form(const MetricField& M, const Point2& p) {
  Mat3 G = M.at(p);
  Mat3 Ginv = G.inverse();
  double g33 = Ginv(2, 2);
  if (!(g33 > 0.0)) throw NumericalError("target_second_form: G^33 not positive");
  Christoffels c = christoffel(M, p);
  Mat2 Pi;
  Pi << c.g[2][0][0], c.g[2][0][1], c.g[2][1][0], c.g[2][1][1];
  return -Pi / std::sqrt(g33);
}

Christoffels2 christoffel_2d(const MetricField& M, const Point2& p) {
  Mat3 Ginv = M.at(p).inverse();
  Christoffels c = christoffel(M, p);
  Christoffels2 out;
  for (int s = 0; s < 2; ++s)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        out.g[s][k][l] = c.g[s][k][l] - Ginv(2, s) / Ginv(2, 2) * c.g[2][k][l];
  return out;
}

CodazziGaussResidual codazzi_gauss_residual(const MetricField& M,
                                            const std::function<Mat2(const Point2&)>& Pi,
                                            const Grid2& grid) {
  grid.validate();
  CodazziGaussResidual res;
  double h = M.fd_step_or_default();
  for (int i = 1; i + 1 < grid.nx; ++i)
    for (int j = 1; j + 1 < grid.ny; ++j) {
      Point2 p = grid.node(i, j);
      Mat2 P = Pi(p);
      Mat2 dP1 = (Pi(p + Point2(h, 0)) - Pi(p - Point2(h, 0))) / (2.0 * h);
      Mat2 dP2 = (Pi(p + Point2(0, h)) - Pi(p - Point2(0, h))) / (2.0 * h);
      Christoffels2 c2 = christoffel_2d(M, p);
      // d2 Pi_11 - d1 Pi_12 = sum_m gamma^m_12 Pi_m1 - gamma^m_11 Pi_m2
      double cm1 = dP2(0, 0) - dP1(0, 1);
      double cm2 = dP2(0, 1) - dP1(1, 1);
      for (int m = 0; m < 2; ++m) {
        cm1 -= c2.g[m][0][1] * P(m, 0) - c2.g[m][0][0] * P(m, 1);
        cm2 -= c2.g[m][1][1] * P(m, 0) - c2.g[m][0][1] * P(m, 1);
      }
      double kappa = gaussian_curvature_2d(M, p);
      double det2 = principal_minor(M.at(p)).determinant();
      double gauss = P.determinant() - kappa * det2;
      res.cm1_sup = std::max(res.cm1_sup, std::abs(cm1));
      res.cm2_sup = std::max(res.cm2_sup, std::abs(cm2));
      res.gauss_sup = std::max(res.gauss_sup, std::abs(gauss));
    }
  return res;
}

}  // namespace prestrain
