#include "prestrain/density3d.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <memory>

namespace prestrain {

double dist_sq_so3(const Mat3& F) {
  Eigen::JacobiSVD<Mat3> svd(F);
  Vec3 s = svd.singularValues();
  double sign = (F.determinant() >= 0.0) ? 1.0 : -1.0;
  // Nearest rotation flips the smallest singular value when det F < 0.
  return (s[0] - 1.0) * (s[0] - 1.0) + (s[1] - 1.0) * (s[1] - 1.0) +
         (sign * s[2] - 1.0) * (sign * s[2] - 1.0);
}

double DensityW::operator()(const Mat3& F) const {
  switch (kind) {
    case DensityKind::GreenQuadratic: {
      Mat3 C = F.transpose() * F - Mat3::Identity();
      double tr = C.trace();
      return m.mu / 8.0 * C.squaredNorm() + m.lambda / 8.0 * tr * tr;
    }
    case DensityKind::DistSqSo3:
      return 0.5 * m.mu * dist_sq_so3(F);
  }
  throw ValidationError("unknown density kind");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ValidationError("quadrature order must be positive");
  if (n == 1) {
    nodes = {0.0};
    weights = {2.0};
    return;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()[k];
    double v0 = es.eigenvectors()(0, k);
    weights[k] = 2.0 * v0 * v0;
  }
}

double energy_3d(const DensityW& W, const MetricField& M, const Deformation3& def, double h,
                 const QuadratureSpec& quad, int threads) {
  if (!(h > 0.0)) throw ValidationError("thickness h must be positive");
  if (quad.cells1 < 1 || quad.cells2 < 1) throw ValidationError("quadrature mesh too coarse");
  std::vector<double> gp, gw, tp, tw;
  gauss_legendre(quad.q_plane, gp, gw);
  gauss_legendre(quad.q_thick, tp, tw);

  const Rect& box = def.domain;
  double dx1 = box.width1() / quad.cells1;
  double dx2 = box.width2() / quad.cells2;
  int cells = quad.cells1 * quad.cells2;

  double total = parallel_sum(
      cells,
      [&](int cell) {
        int ci = cell / quad.cells2, cj = cell % quad.cells2;
        double acc = 0.0;
        for (int a = 0; a < quad.q_plane; ++a)
          for (int b = 0; b < quad.q_plane; ++b) {
            Point2 p(box.x1_min + (ci + 0.5 + 0.5 * gp[a]) * dx1,
                     box.x2_min + (cj + 0.5 + 0.5 * gp[b]) * dx2);
            Mat3 Ainv = metric_sqrt(M.at(p)).inverse();
            double wp = gw[a] * gw[b] * 0.25 * dx1 * dx2;
            for (int c = 0; c < quad.q_thick; ++c) {
              double x3 = 0.5 * h * 0.5 * tp[c] * 2.0;  // map [-1,1] -> (-h/2, h/2)
              Mat3 F = def.grad(Vec3(p[0], p[1], x3)) * Ainv;
              acc += wp * (0.5 * h * tw[c]) * W(F);
            }
          }
        return acc;
      },
      threads);
  return total / h;
}

Deformation3 recovery_parabolic(const BlockDiagParams& params) {
  Poly2 lam = params.lambda;
  Deformation3 def;
  def.label = "parabolic-recovery";
  def.domain = params.domain;
  def.u = [lam](const Vec3& x) {
    Point2 p(x[0], x[1]);
    Jet2 l = lam.eval(Jet2::variable(p[0], 0), Jet2::variable(p[1], 1));
    double x3 = x[2];
    return Vec3(x[0] - 0.25 * x3 * x3 * l.g[0], x[1] - 0.25 * x3 * x3 * l.g[1],
                std::sqrt(l.v) * x3);
  };
  def.grad = [lam](const Vec3& x) {
    Jet2 l = lam.eval(Jet2::variable(x[0], 0), Jet2::variable(x[1], 1));
    Jet2 sl = sqrt(l);
    double x3 = x[2];
    Mat3 g;
    // columns: d1 u, d2 u, d3 u
    g << 1.0 - 0.25 * x3 * x3 * l.h(0, 0), -0.25 * x3 * x3 * l.h(0, 1), -0.5 * x3 * l.g[0],
        -0.25 * x3 * x3 * l.h(1, 0), 1.0 - 0.25 * x3 * x3 * l.h(1, 1), -0.5 * x3 * l.g[1],
        x3 * sl.g[0], x3 * sl.g[1], sl.v;
    return g;
  };
  return def;
}

Deformation3 recovery_conformal(const ConformalParams& params) {
  const Poly2& e = params.exponent;
  if (e.c20 != 0.0 || e.c02 != 0.0 || e.c11 != 0.0)
    throw ValidationError(
        "conformal recovery needs a linear exponent (log lambda harmonic with a closed-form "
        "flat immersion)");
  double a = e.c10, b = e.c01, c0 = e.c00;
  std::complex<double> w(0.5 * a, -0.5 * b);
  double scale = std::exp(0.5 * c0);  // constant conformal factor

  // Flat immersion y of lambda Id2 and its first/second derivatives from the
  // holomorphic primitive F with F' = scale * exp(w z).
  auto frame = [w, scale, a, b](const Point2& p) {
    std::complex<double> z(p[0], p[1]);
    std::complex<double> d1;  // F'
    std::complex<double> y;   // F
    if (std::abs(w) == 0.0) {
      y = scale * z;
      d1 = scale;
    } else {
      d1 = scale * std::exp(w * z);
      y = d1 / w;
    }
    std::complex<double> d2 = w * d1;  // F''
    struct Frame {
      Vec2 y, d1y, d2y, d11y, d12y, d22y;
    } f;
    f.y = Vec2(y.real(), y.imag());
    f.d1y = Vec2(d1.real(), d1.imag());
    std::complex<double> i_d1 = d1 * std::complex<double>(0, 1);
    f.d2y = Vec2(i_d1.real(), i_d1.imag());
    f.d11y = Vec2(d2.real(), d2.imag());
    std::complex<double> i_d2 = d2 * std::complex<double>(0, 1);
    f.d12y = Vec2(i_d2.real(), i_d2.imag());
    f.d22y = Vec2(-d2.real(), -d2.imag());
    return f;
  };

  auto lambda_at = [e](const Point2& p) { return std::exp(e(p)); };

  Deformation3 def;
  def.label = "conformal-recovery";
  def.domain = params.domain;
  def.u = [frame, lambda_at, a, b](const Vec3& x) {
    Point2 p(x[0], x[1]);
    auto f = frame(p);
    double x3 = x[2];
    // (grad y)^{-T} grad lambda = a d1 y + b d2 y for the exponential family.
    Vec2 v = a * f.d1y + b * f.d2y;
    Vec2 plane = f.y - 0.25 * x3 * x3 * v;
    return Vec3(plane[0], plane[1], x3 * std::sqrt(lambda_at(p)));
  };
  def.grad = [frame, lambda_at, a, b](const Vec3& x) {
    Point2 p(x[0], x[1]);
    auto f = frame(p);
    double x3 = x[2];
    Vec2 v = a * f.d1y + b * f.d2y;
    Vec2 d1v = a * f.d11y + b * f.d12y;
    Vec2 d2v = a * f.d12y + b * f.d22y;
    double sl = std::sqrt(lambda_at(p));
    Mat3 g;
    g << f.d1y[0] - 0.25 * x3 * x3 * d1v[0], f.d2y[0] - 0.25 * x3 * x3 * d2v[0], -0.5 * x3 * v[0],
        f.d1y[1] - 0.25 * x3 * x3 * d1v[1], f.d2y[1] - 0.25 * x3 * x3 * d2v[1], -0.5 * x3 * v[1],
        x3 * 0.5 * a * sl, x3 * 0.5 * b * sl, sl;
    return g;
  };
  return def;
}

namespace {

// Tensor-product 4-point cubic interpolation of nodal fields with analytic
// in-plane derivatives of the interpolant.
class CubicField {
 public:
  CubicField(const Grid2& grid, std::vector<Vec3> values)
      : grid_(grid), values_(std::move(values)) {}

  void eval(const Point2& p, Vec3& value, Vec3& d1, Vec3& d2) const {
    double s = (p[0] - grid_.box.x1_min) / grid_.h1();
    double t = (p[1] - grid_.box.x2_min) / grid_.h2();
    int i0 = stencil_start(s, grid_.nx);
    int j0 = stencil_start(t, grid_.ny);
    double ls = s - i0, lt = t - j0;
    double wx[4], dwx[4], wy[4], dwy[4];
    lagrange4(ls, wx, dwx);
    lagrange4(lt, wy, dwy);
    value.setZero();
    d1.setZero();
    d2.setZero();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const Vec3& f = values_[grid_.index(i0 + a, j0 + b)];
        value += wx[a] * wy[b] * f;
        d1 += dwx[a] * wy[b] * f;
        d2 += wx[a] * dwy[b] * f;
      }
    d1 /= grid_.h1();
    d2 /= grid_.h2();
  }

 private:
  static int stencil_start(double s, int n) {
    int i = static_cast<int>(std::floor(s)) - 1;
    return std::clamp(i, 0, n - 4);
  }

  // Cubic Lagrange basis on integer abscissae 0..3 evaluated at t, plus
  // derivatives.
  static void lagrange4(double t, double* w, double* dw) {
    for (int k = 0; k < 4; ++k) {
      double num = 1.0, den = 1.0, dnum = 0.0;
      for (int j = 0; j < 4; ++j) {
        if (j == k) continue;
        den *= (k - j);
      }
      for (int j = 0; j < 4; ++j) {
        if (j == k) continue;
        double prod = 1.0;
        for (int l = 0; l < 4; ++l) {
          if (l == k || l == j) continue;
          prod *= (t - l);
        }
        dnum += prod;
        num *= (t - j);
      }
      w[k] = num / den;
      dw[k] = dnum / den;
    }
  }

  Grid2 grid_;
  std::vector<Vec3> values_;
};

}  // namespace

Deformation3 recovery_kirchhoff(const MetricField& M, const QuadraticForm3& qf,
                                const Immersion& im) {
  im.validate();
  if (im.grid.nx < 4 || im.grid.ny < 4)
    throw ValidationError("kirchhoff recovery needs at least a 4x4 grid");
  BendingSetup setup = BendingSetup::make(M, qf, im.grid);
  CosseratField cf = cosserat(setup, im);
  int n = im.grid.size();

  // Nodal warp direction d = Q^{-T}(c0 - 1/2 (d1|b|^2, d2|b|^2, 0)).
  std::vector<Vec3> db1 = grid_derivative(im.grid, cf.b, 0);
  std::vector<Vec3> db2 = grid_derivative(im.grid, cf.b, 1);
  std::vector<double> bsq(n);
  for (int idx = 0; idx < n; ++idx) bsq[idx] = cf.b[idx].squaredNorm();
  std::vector<double> dbsq1 = grid_derivative(im.grid, bsq, 0);
  std::vector<double> dbsq2 = grid_derivative(im.grid, bsq, 1);

  std::vector<Vec3> warp(n);
  for (int i = 0; i < im.grid.nx; ++i)
    for (int j = 0; j < im.grid.ny; ++j) {
      int idx = im.grid.index(i, j);
      Point2 p = im.grid.node(i, j);
      Mat2 F;
      F << cf.J[idx].col(0).dot(db1[idx]), cf.J[idx].col(0).dot(db2[idx]),
          cf.J[idx].col(1).dot(db1[idx]), cf.J[idx].col(1).dot(db2[idx]);
      EffectiveDensityContext ctx = EffectiveDensityContext::from_metric(qf, M.at(p));
      Vec3 c0 = minimizer_c0(ctx, F);
      Mat3 Q;
      Q.col(0) = cf.J[idx].col(0);
      Q.col(1) = cf.J[idx].col(1);
      Q.col(2) = cf.b[idx];
      if (!(Q.determinant() > 0.0))
        throw NumericalError("kirchhoff recovery: frame [grad y, b] not orientation-preserving");
      Vec3 rhs = c0 - 0.5 * Vec3(dbsq1[idx], dbsq2[idx], 0.0);
      warp[idx] = Q.transpose().fullPivLu().solve(rhs);
    }

  auto Y = std::make_shared<CubicField>(im.grid, im.y);
  auto B = std::make_shared<CubicField>(im.grid, cf.b);
  auto D = std::make_shared<CubicField>(im.grid, warp);

  Deformation3 def;
  def.label = "kirchhoff-recovery";
  def.domain = im.grid.box;
  def.u = [Y, B, D](const Vec3& x) {
    Point2 p(x[0], x[1]);
    Vec3 y, b, d, t1, t2;
    Y->eval(p, y, t1, t2);
    B->eval(p, b, t1, t2);
    D->eval(p, d, t1, t2);
    return y + x[2] * b + 0.5 * x[2] * x[2] * d;
  };
  def.grad = [Y, B, D](const Vec3& x) {
    Point2 p(x[0], x[1]);
    Vec3 y, b, d, y1, y2, b1, b2, d1, d2;
    Y->eval(p, y, y1, y2);
    B->eval(p, b, b1, b2);
    D->eval(p, d, d1, d2);
    double x3 = x[2];
    Mat3 g;
    g.col(0) = y1 + x3 * b1 + 0.5 * x3 * x3 * d1;
    g.col(1) = y2 + x3 * b2 + 0.5 * x3 * x3 * d2;
    g.col(2) = b + x3 * d;
    return g;
  };
  return def;
}

ScalingFit fit_scaling(const std::vector<double>& h, const std::vector<double>& E,
                       double floor) {
  if (h.size() != E.size() || h.size() < 2)
    throw ValidationError("scaling fit needs matching h/E samples");
  std::vector<double> lx, ly;
  for (size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) throw ValidationError("thickness samples must be positive");
    if (E[i] > floor) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(E[i]));
    }
  }
  ScalingFit fit;
  fit.samples_used = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    fit.all_below_floor = lx.empty();
    return fit;
  }
  LineFit lf = fit_line(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.max_log_residual = lf.max_abs_residual;
  return fit;
}

}  // namespace prestrain
