#include "prestrain/immersion.hpp"

#include <cmath>

namespace prestrain {

namespace {

// One grid line: n entries starting at `base` with stride `stride`.
struct Line {
  int base, stride, n;
  double h;
};

std::vector<Line> lines(const Grid2& g, int axis) {
  std::vector<Line> out;
  if (axis == 0) {
    for (int j = 0; j < g.ny; ++j) out.push_back({j, g.ny, g.nx, g.h1()});
  } else {
    for (int i = 0; i < g.nx; ++i) out.push_back({i * g.ny, 1, g.ny, g.h2()});
  }
  return out;
}

template <typename T>
void apply_derivative(const Grid2& g, const std::vector<T>& f, int axis, std::vector<T>& out) {
  out.resize(f.size());
  for (const Line& L : lines(g, axis)) {
    auto at = [&](int t) -> const T& { return f[L.base + t * L.stride]; };
    double a = 0.5 / L.h;
    out[L.base] = a * (-3.0 * at(0) + 4.0 * at(1) - at(2));
    for (int t = 1; t + 1 < L.n; ++t)
      out[L.base + t * L.stride] = a * (at(t + 1) - at(t - 1));
    out[L.base + (L.n - 1) * L.stride] =
        a * (3.0 * at(L.n - 1) - 4.0 * at(L.n - 2) + at(L.n - 3));
  }
}

template <typename T>
void apply_derivative_adjoint(const Grid2& g, const std::vector<T>& r, int axis,
                              std::vector<T>& out) {
  for (const Line& L : lines(g, axis)) {
    auto idx = [&](int t) { return L.base + t * L.stride; };
    double a = 0.5 / L.h;
    out[idx(0)] += -3.0 * a * r[idx(0)];
    out[idx(1)] += 4.0 * a * r[idx(0)];
    out[idx(2)] += -a * r[idx(0)];
    for (int t = 1; t + 1 < L.n; ++t) {
      out[idx(t - 1)] += -a * r[idx(t)];
      out[idx(t + 1)] += a * r[idx(t)];
    }
    out[idx(L.n - 1)] += 3.0 * a * r[idx(L.n - 1)];
    out[idx(L.n - 2)] += -4.0 * a * r[idx(L.n - 1)];
    out[idx(L.n - 3)] += a * r[idx(L.n - 1)];
  }
}

}  // namespace

Immersion make_immersion(const Grid2& grid, const std::function<Vec3(const Point2&)>& f) {
  grid.validate();
  Immersion im;
  im.grid = grid;
  im.y.resize(grid.size());
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) im.y[grid.index(i, j)] = f(grid.node(i, j));
  return im;
}

std::vector<Vec3> grid_derivative(const Grid2& grid, const std::vector<Vec3>& f, int axis) {
  std::vector<Vec3> out;
  apply_derivative(grid, f, axis, out);
  return out;
}

std::vector<double> grid_derivative(const Grid2& grid, const std::vector<double>& f, int axis) {
  std::vector<double> out;
  apply_derivative(grid, f, axis, out);
  return out;
}

void grid_derivative_adjoint(const Grid2& grid, const std::vector<Vec3>& r, int axis,
                             std::vector<Vec3>& out) {
  apply_derivative_adjoint(grid, r, axis, out);
}

BendingSetup BendingSetup::make(const MetricField& M, const QuadraticForm3& qf,
                                const Grid2& grid) {
  grid.validate();
  BendingSetup s;
  s.grid = grid;
  s.qf = qf;
  s.isotropic = qf.is_isotropic();
  if (s.isotropic) s.moduli = qf.moduli();
  int n = grid.size();
  s.minor.resize(n);
  s.minor_inv.resize(n);
  s.shear_w.resize(n);
  s.normal_s.resize(n);
  s.weight.resize(n);
  if (!s.isotropic) s.ctx.reserve(n);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      int idx = grid.index(i, j);
      Point2 p = grid.node(i, j);
      Mat3 G = M.at(p);
      require_spd(G, M.label + " at bending node");
      Mat2 g2 = principal_minor(G);
      double det2 = g2.determinant();
      s.minor[idx] = g2;
      s.minor_inv[idx] = g2.inverse();
      s.shear_w[idx] = s.minor_inv[idx] * Vec2(G(0, 2), G(1, 2));
      s.normal_s[idx] = std::sqrt(G.determinant() / det2);
      s.weight[idx] = grid.trapezoid_weight(i, j);
      if (!s.isotropic) s.ctx.push_back(EffectiveDensityContext::from_metric(qf, G));
    }
  return s;
}

CosseratField cosserat(const BendingSetup& setup, const Immersion& im) {
  im.validate();
  int n = setup.grid.size();
  CosseratField out;
  out.b.resize(n);
  out.normal.resize(n);
  out.J.resize(n);
  std::vector<Vec3> u = grid_derivative(setup.grid, im.y, 0);
  std::vector<Vec3> v = grid_derivative(setup.grid, im.y, 1);
  for (int idx = 0; idx < n; ++idx) {
    Vec3 c = u[idx].cross(v[idx]);
    double c2 = c.squaredNorm();
    double det2 = setup.minor[idx].determinant();
    if (c2 < 1e-12 * det2) ++out.degenerate_nodes;
    Vec3 N = c / std::sqrt(std::max(c2, 1e-300));
    out.J[idx].col(0) = u[idx];
    out.J[idx].col(1) = v[idx];
    out.normal[idx] = N;
    out.b[idx] = setup.shear_w[idx][0] * u[idx] + setup.shear_w[idx][1] * v[idx] +
                 setup.normal_s[idx] * N;
  }
  return out;
}

CosseratField cosserat(const MetricField& M, const QuadraticForm3& qf, const Immersion& im) {
  return cosserat(BendingSetup::make(M, qf, im.grid), im);
}

std::vector<Mat2> second_fundamental_form(const Immersion& im) {
  im.validate();
  std::vector<Vec3> u = grid_derivative(im.grid, im.y, 0);
  std::vector<Vec3> v = grid_derivative(im.grid, im.y, 1);
  std::vector<Vec3> N(im.y.size());
  for (size_t idx = 0; idx < im.y.size(); ++idx) {
    Vec3 c = u[idx].cross(v[idx]);
    N[idx] = c / std::sqrt(std::max(c.squaredNorm(), 1e-300));
  }
  std::vector<Vec3> dN1 = grid_derivative(im.grid, N, 0);
  std::vector<Vec3> dN2 = grid_derivative(im.grid, N, 1);
  std::vector<Mat2> Pi(im.y.size());
  for (size_t idx = 0; idx < im.y.size(); ++idx) {
    Pi[idx] << u[idx].dot(dN1[idx]), u[idx].dot(dN2[idx]), v[idx].dot(dN1[idx]),
        v[idx].dot(dN2[idx]);
  }
  return Pi;
}

double bending_objective(const BendingSetup& setup, const std::vector<Vec3>& y, double inv_eps,
                         std::vector<Vec3>* grad, BendingEnergy* parts) {
  const Grid2& g = setup.grid;
  int n = g.size();
  if (static_cast<int>(y.size()) != n)
    throw ValidationError("bending_objective: node count mismatch");

  std::vector<Vec3> u = grid_derivative(g, y, 0);
  std::vector<Vec3> v = grid_derivative(g, y, 1);

  // Frame, normal, Cosserat field.
  std::vector<Vec3> N(n), b(n);
  std::vector<double> cnorm(n);
  int degenerate = 0;
  for (int idx = 0; idx < n; ++idx) {
    Vec3 c = u[idx].cross(v[idx]);
    double c2 = c.squaredNorm();
    if (c2 < 1e-12 * setup.minor[idx].determinant()) ++degenerate;
    cnorm[idx] = std::sqrt(std::max(c2, 1e-300));
    N[idx] = c / cnorm[idx];
    b[idx] = setup.shear_w[idx][0] * u[idx] + setup.shear_w[idx][1] * v[idx] +
             setup.normal_s[idx] * N[idx];
  }

  std::vector<Vec3> p = grid_derivative(g, b, 0);
  std::vector<Vec3> q = grid_derivative(g, b, 1);

  double energy = 0.0, resid2 = 0.0;
  std::vector<Vec3> du(grad ? n : 0, Vec3::Zero()), dv(grad ? n : 0, Vec3::Zero());
  std::vector<Vec3> dp(grad ? n : 0, Vec3::Zero()), dq(grad ? n : 0, Vec3::Zero());

  for (int idx = 0; idx < n; ++idx) {
    double w = setup.weight[idx];
    Mat2 F;
    F << u[idx].dot(p[idx]), u[idx].dot(q[idx]), v[idx].dot(p[idx]), v[idx].dot(q[idx]);
    Q2Eval q2 = setup.isotropic
                    ? q2_iso_minor_with_grad(setup.moduli, setup.minor_inv[idx], F)
                    : q2_general_with_grad(setup.ctx[idx], F);
    energy += w / 24.0 * q2.value;

    Mat2 E;  // isometry defect (grad y)^T grad y - G_2x2
    E << u[idx].squaredNorm() - setup.minor[idx](0, 0),
        u[idx].dot(v[idx]) - setup.minor[idx](0, 1),
        u[idx].dot(v[idx]) - setup.minor[idx](1, 0),
        v[idx].squaredNorm() - setup.minor[idx](1, 1);
    resid2 += w * E.squaredNorm();

    if (grad) {
      Mat2 dF = (w / 24.0) * q2.grad;
      dp[idx] = dF(0, 0) * u[idx] + dF(1, 0) * v[idx];
      dq[idx] = dF(0, 1) * u[idx] + dF(1, 1) * v[idx];
      du[idx] = dF(0, 0) * p[idx] + dF(0, 1) * q[idx];
      dv[idx] = dF(1, 0) * p[idx] + dF(1, 1) * q[idx];
      double pen = 4.0 * inv_eps * w;
      du[idx] += pen * (E(0, 0) * u[idx] + E(0, 1) * v[idx]);
      dv[idx] += pen * (E(1, 0) * u[idx] + E(1, 1) * v[idx]);
    }
  }

  if (parts) {
    parts->energy = energy;
    parts->isometry_residual = std::sqrt(resid2);
    parts->degenerate_nodes = degenerate;
  }

  double total = energy + inv_eps * resid2;
  if (!grad) return total;

  // Adjoint of the second derivative pass: db = D1^T dp + D2^T dq.
  std::vector<Vec3> db(n, Vec3::Zero());
  grid_derivative_adjoint(g, dp, 0, db);
  grid_derivative_adjoint(g, dq, 1, db);

  // b = w1 u + w2 v + s N,  N = c/|c|,  c = u x v.
  for (int idx = 0; idx < n; ++idx) {
    du[idx] += setup.shear_w[idx][0] * db[idx];
    dv[idx] += setup.shear_w[idx][1] * db[idx];
    Vec3 dN = setup.normal_s[idx] * db[idx];
    Vec3 dc = (dN - N[idx] * N[idx].dot(dN)) / cnorm[idx];
    du[idx] += v[idx].cross(dc);
    dv[idx] += dc.cross(u[idx]);
  }

  grad->assign(n, Vec3::Zero());
  grid_derivative_adjoint(g, du, 0, *grad);
  grid_derivative_adjoint(g, dv, 1, *grad);
  return total;
}

BendingEnergy bending_energy(const BendingSetup& setup, const Immersion& im) {
  im.validate();
  BendingEnergy parts;
  bending_objective(setup, im.y, 0.0, nullptr, &parts);
  return parts;
}

BendingEnergy bending_energy(const MetricField& M, const QuadraticForm3& qf,
                             const Immersion& im) {
  return bending_energy(BendingSetup::make(M, qf, im.grid), im);
}

}  // namespace prestrain
