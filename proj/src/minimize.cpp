#include "prestrain/minimize.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <memory>

namespace prestrain {

LbfgsReport lbfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& value_and_grad,
    Eigen::VectorXd& x, const LbfgsOptions& opts) {
  LbfgsReport rep;
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n), g_new(n), x_new(n), d(n);
  double f = value_and_grad(x, g);
  rep.final_value = f;
  rep.final_grad_norm = g.norm();

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (s, y)
  double h0 = 1.0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (g.norm() <= opts.grad_tol || f <= opts.objective_floor) {
      rep.converged = true;
      break;
    }

    // Two-loop recursion for d = -H g.
    d = -g;
    std::vector<double> alpha(pairs.size());
    for (int k = static_cast<int>(pairs.size()) - 1; k >= 0; --k) {
      const auto& [s, yv] = pairs[k];
      double rho = 1.0 / yv.dot(s);
      alpha[k] = rho * s.dot(d);
      d -= alpha[k] * yv;
    }
    if (opts.apply_h0) {
      opts.apply_h0(d);
    } else {
      d *= h0;
    }
    for (size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, yv] = pairs[k];
      double rho = 1.0 / yv.dot(s);
      double beta = rho * yv.dot(d);
      d += (alpha[k] - beta) * s;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // safeguard: fall back to steepest descent
      d = -g;
      slope = -g.squaredNorm();
    }

    // Armijo backtracking.
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      x_new = x + t * d;
      double f_new = value_and_grad(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opts.armijo_c * t * slope) {
        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd yv = g_new - g;
        double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
          pairs.emplace_back(std::move(s), std::move(yv));
          if (static_cast<int>(pairs.size()) > opts.history) pairs.pop_front();
          h0 = sy / pairs.back().second.squaredNorm();
        }
        if (f_new > f) rep.monotone = false;
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        accepted = true;
        break;
      }
      t *= opts.backtrack_factor;
    }
    if (!accepted) break;  // line search exhausted at machine precision
    ++rep.iterations;
  }

  rep.final_value = f;
  rep.final_grad_norm = g.norm();
  if (g.norm() <= opts.grad_tol || f <= opts.objective_floor) rep.converged = true;
  return rep;
}

namespace {

Eigen::VectorXd flatten(const std::vector<Vec3>& y) {
  Eigen::VectorXd x(3 * y.size());
  for (size_t i = 0; i < y.size(); ++i) x.segment<3>(3 * i) = y[i];
  return x;
}

std::vector<Vec3> unflatten(const Eigen::VectorXd& x) {
  std::vector<Vec3> y(x.size() / 3);
  for (size_t i = 0; i < y.size(); ++i) y[i] = x.segment<3>(3 * i);
  return y;
}

// Per-axis first-derivative stencil matrix used by the immersion assembly
// (second-order central rows, one-sided second-order rows at the ends).
Eigen::MatrixXd axis_derivative(int n, double h) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double a = 0.5 / h;
  d(0, 0) = -3.0 * a;
  d(0, 1) = 4.0 * a;
  d(0, 2) = -a;
  for (int t = 1; t + 1 < n; ++t) {
    d(t, t - 1) = -a;
    d(t, t + 1) = a;
  }
  d(n - 1, n - 1) = 3.0 * a;
  d(n - 1, n - 2) = -4.0 * a;
  d(n - 1, n - 3) = a;
  return d;
}

// Separable spectral model of the stage Hessian. In weighted nodal
// coordinates the constant-coefficient membrane operator (stiffness 1/eps,
// tangential components) and plate operator (stiffness ~1/12, normal
// component) are diagonal in the eigenbasis of the per-axis quadratic forms
// D^T W D built from the actual derivative stencils, so the model reproduces
// the true mode curvatures, including the weak response of the boundary rows
// to grid-frequency oscillation that the interior central differences cannot
// see. Applying the inverse model costs four small dense multiplies per
// component.
class SpectralPreconditioner {
 public:
  // sigma is the RMS isometry defect of the current iterate; it sets the
  // membrane-induced (prestress) stiffness the penalty gives the normal
  // component away from the constraint manifold.
  SpectralPreconditioner(const Grid2& grid, double inv_eps, double mu, double beta, double sigma)
      : nx_(grid.nx), ny_(grid.ny) {
    Eigen::VectorXd lam1 = build_axis(grid.nx, grid.h1(), u1_, si1_);
    Eigen::VectorXd lam2 = build_axis(grid.ny, grid.h2(), u2_, si2_);
    Eigen::ArrayXXd ell(nx_, ny_);
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) ell(i, j) = lam1(i) + lam2(j);
    ell = ell.max(0.0);
    // Model curvatures per mode: membrane 4 (1/eps) ell for the tangential
    // components, plate (mu+beta)/12 ell^2 plus prestress 4 (1/eps) sigma ell
    // for the normal one, floored a little below the softest domain-scale mode
    // so that near-null directions (rigid motions, interior-supported
    // oscillations) are not amplified without bound.
    const double len1 = grid.box.x1_max - grid.box.x1_min;
    const double len2 = grid.box.x2_max - grid.box.x2_min;
    const double pi = 3.14159265358979323846;
    const double ell_floor = 0.25 * (pi * pi) / std::pow(std::max(len1, len2), 2);
    Eigen::ArrayXXd c_plane = 4.0 * inv_eps * (ell + ell_floor);
    Eigen::ArrayXXd c_normal = (mu + beta) / 12.0 * (ell * ell + ell_floor * ell_floor) +
                               4.0 * inv_eps * sigma * (ell + ell_floor);
    gain_plane_ = 1.0 / c_plane;
    gain_normal_ = 1.0 / c_normal;
  }

  void apply(Eigen::VectorXd& v) const {
    Eigen::MatrixXd f(nx_, ny_);
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) f(i, j) = si1_(i) * si2_(j) * v[3 * (i * ny_ + j) + c];
      Eigen::MatrixXd t = u1_.transpose() * f * u2_;
      t.array() *= (c == 2 ? gain_normal_ : gain_plane_);
      f.noalias() = u1_ * t * u2_.transpose();
      for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) v[3 * (i * ny_ + j) + c] = si1_(i) * si2_(j) * f(i, j);
    }
  }

 private:
  // Eigen-decomposition of W^{-1/2} D^T W D W^{-1/2} for one axis; W holds the
  // 1D trapezoid weights. Returns the eigenvalues, fills the basis and W^{-1/2}.
  static Eigen::VectorXd build_axis(int n, double h, Eigen::MatrixXd& u, Eigen::VectorXd& si) {
    Eigen::MatrixXd d = axis_derivative(n, h);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
    w(0) *= 0.5;
    w(n - 1) *= 0.5;
    si = w.array().rsqrt();
    Eigen::MatrixXd b = si.asDiagonal() * d.transpose() * w.asDiagonal() * d * si.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
    u = es.eigenvectors();
    return es.eigenvalues();
  }

  int nx_, ny_;
  Eigen::MatrixXd u1_, u2_;
  Eigen::VectorXd si1_, si2_;
  Eigen::ArrayXXd gain_plane_, gain_normal_;
};

// One pass of noise filtering: each node is replaced by the value at its own
// position of the least-squares plane fitted to the 3x3 neighborhood (clipped
// at the boundary). The fit reproduces affine immersions exactly everywhere,
// so it removes grid-frequency noise without distorting the underlying sheet.
std::vector<Vec3> plane_fit_smooth(const Grid2& grid, const std::vector<Vec3>& y) {
  std::vector<Vec3> out(y.size());
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
      Eigen::Matrix3d rhs = Eigen::Matrix3d::Zero();  // columns: y components
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= grid.nx || jj < 0 || jj >= grid.ny) continue;
          Eigen::Vector3d row(1.0, double(di), double(dj));
          m += row * row.transpose();
          rhs += row * y[size_t(ii) * grid.ny + jj].transpose();
        }
      }
      Eigen::Matrix3d coef = m.ldlt().solve(rhs);
      out[size_t(i) * grid.ny + j] = coef.row(0).transpose();  // fit value at (di,dj) = (0,0)
    }
  }
  return out;
}

}  // namespace

BendingResult minimize_bending(const MetricField& M, const QuadraticForm3& qf, Immersion seed,
                               const MinimizeBendingOptions& opts) {
  seed.validate();
  BendingSetup setup = BendingSetup::make(M, qf, seed.grid);
  if (opts.eps_schedule.empty()) throw ValidationError("empty penalty schedule");

  BendingResult result;
  Eigen::VectorXd x = flatten(seed.y);
  std::vector<Vec3> grad_nodes;
  const double area = (seed.grid.box.x1_max - seed.grid.box.x1_min) *
                      (seed.grid.box.x2_max - seed.grid.box.x2_min);
  auto defect_rms = [&](void) {
    BendingEnergy parts = bending_energy(setup, Immersion{seed.grid, unflatten(x)});
    return parts.isometry_residual / std::sqrt(area);
  };

  std::vector<double> schedule = opts.eps_schedule;
  bool has_pre_stage = false;
  if (opts.preconditioned) {
    BendingEnergy parts0 = bending_energy(setup, Immersion{seed.grid, seed.y});
    double sigma0 = parts0.isometry_residual / std::sqrt(area);
    // Strongly non-isometric seeds are usually dominated by node-scale noise.
    // High-frequency roughness at this amplitude is a trap for any descent:
    // the short-wavelength content relaxes into permanent folds before the
    // penalty can pull the sheet taut. Filtering the seed removes that content
    // up front at no cost to smooth seeds (the plane fit is exact on them).
    for (int pass = 0; pass < 2 && sigma0 > 0.1; ++pass) {
      x = flatten(plane_fit_smooth(seed.grid, unflatten(x)));
      sigma0 = defect_rms();
    }
    // If the seed is still strongly non-isometric, first descend a
    // membrane-dominant objective: an extra leading stage whose penalty weight
    // makes the defect term outweigh the bending term about fiftyfold.
    // Weak-penalty descent from such seeds otherwise smooths the bending
    // energy into a folded surface that later stages cannot unfold, and
    // weaker dominance leaves the descent stuck on a crumpled plateau.
    if (sigma0 > 0.1) {
      BendingEnergy parts = bending_energy(setup, Immersion{seed.grid, unflatten(x)});
      double r0 = parts.isometry_residual * parts.isometry_residual;
      double eps_pre = parts.energy > 0.0 ? r0 / (50.0 * parts.energy) : schedule.front();
      schedule.insert(schedule.begin(), std::min(eps_pre, schedule.front()));
      has_pre_stage = true;
    }
  }

  for (size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    if (!(eps > 0.0)) throw ValidationError("penalty eps must be positive");
    const bool is_pre_stage = has_pre_stage && stage == 0;
    double inv_eps = 1.0 / eps;
    auto fn = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& g) {
      std::vector<Vec3> y = unflatten(xv);
      double value = bending_objective(setup, y, inv_eps, &grad_nodes, nullptr);
      g = flatten(grad_nodes);
      return value;
    };
    int remaining = opts.lbfgs.max_iterations;
    bool stage_converged = false;
    double last_value = std::numeric_limits<double>::infinity();
    while (remaining > 0) {
      LbfgsOptions stage_opts = opts.lbfgs;
      stage_opts.max_iterations = remaining;
      std::unique_ptr<SpectralPreconditioner> prec;
      if (opts.preconditioned) {
        // Work in short rounds, re-estimating the isometry defect each time.
        // Far from the constraint manifold the quadratic model is unreliable
        // (the defect term is indefinite there), so those rounds run with the
        // plain secant scaling, as does the whole un-crumpling stage; once the
        // defect is moderate the model becomes faithful and its prestress term
        // tracks the shrinking defect.
        double sigma = defect_rms();
        if (is_pre_stage) {
          if (sigma <= 1e-3) break;  // seed is uncrumpled and near-isometric
          // Penalty bounds the objective from below, so an objective floor at
          // the target defect level stops this stage once it gets there.
          stage_opts.objective_floor = std::max(stage_opts.objective_floor, inv_eps * area * 1e-6);
        }
        if (!is_pre_stage && sigma <= 0.1) {
          IsotropicModuli m = setup.isotropic ? setup.moduli : IsotropicModuli{};
          prec = std::make_unique<SpectralPreconditioner>(seed.grid, inv_eps, m.mu, m.beta(), sigma);
          stage_opts.apply_h0 = [p = prec.get()](Eigen::VectorXd& v) { p->apply(v); };
          stage_opts.max_iterations = std::min(25, remaining);
        }
      }
      LbfgsReport rep = lbfgs_minimize(fn, x, stage_opts);
      if (rep.iterations == 0 && stage_opts.apply_h0) {
        // The model direction could not make any progress here; retry the
        // round with the plain secant scaling before giving up on the stage.
        // Plain rounds keep the full remaining budget so the quasi-second-order
        // memory is not restarted while it is still building curvature pairs.
        stage_opts.apply_h0 = nullptr;
        stage_opts.max_iterations = remaining;
        rep = lbfgs_minimize(fn, x, stage_opts);
      }
      result.iterations += rep.iterations;
      result.monotone = result.monotone && rep.monotone;
      result.objective = rep.final_value;
      remaining -= stage_opts.max_iterations;
      if (rep.converged) {
        stage_converged = true;
        break;
      }
      if (rep.iterations < stage_opts.max_iterations) break;  // line search exhausted
      if (opts.preconditioned && !is_pre_stage && std::isfinite(last_value) &&
          last_value - rep.final_value <= opts.stage_progress_tol * std::abs(last_value)) {
        break;  // stage has stopped making relative progress
      }
      last_value = rep.final_value;
    }
    result.converged = stage_converged;
  }

  result.immersion.grid = seed.grid;
  result.immersion.y = unflatten(x);
  BendingEnergy parts = bending_energy(setup, result.immersion);
  result.energy = parts.energy;
  result.isometry_residual = parts.isometry_residual;
  result.degenerate_nodes = parts.degenerate_nodes;
  return result;
}

Immersion add_noise(Immersion im, double amp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-amp, amp);
  for (auto& p : im.y) p += Vec3(uni(rng), uni(rng), uni(rng));
  return im;
}

}  // namespace prestrain
