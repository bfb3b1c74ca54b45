#pragma once

// Penalized minimization of the bending energy over discrete immersions:
// limited-memory quasi-Newton descent (two-loop recursion) with Armijo
// backtracking, warm-started through a decreasing penalty schedule
// eps = 1e-1 ... 1e-5.

#include "prestrain/immersion.hpp"

#include <functional>
#include <random>

namespace prestrain {

struct LbfgsOptions {
  int history = 10;
  int max_iterations = 150;
  double grad_tol = 1e-10;       // stop when |grad|_2 <= grad_tol
  double objective_floor = 1e-16;  // stop when J_eps falls below this
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_line_search = 50;
  // Optional SPD initial inverse-Hessian model applied inside the two-loop
  // recursion in place of the scalar secant scaling. Must act in place.
  std::function<void(Eigen::VectorXd&)> apply_h0;
};

struct LbfgsReport {
  int iterations = 0;   // accepted steps
  bool converged = false;
  bool monotone = true;
  double final_value = 0.0;
  double final_grad_norm = 0.0;
};

// Minimize a smooth objective f: R^n -> R with analytic gradient.
LbfgsReport lbfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& value_and_grad,
    Eigen::VectorXd& x, const LbfgsOptions& opts);

struct MinimizeBendingOptions {
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  LbfgsOptions lbfgs;  // per-stage settings
  int threads = 0;
  // Grid-structured inverse-Hessian model for the two-loop recursion: membrane
  // stiffness for the tangential components, plate plus prestress stiffness
  // for the normal one, diagonalized in the separable eigenbasis of the
  // per-axis derivative-stencil quadratic forms. Greatly reduces the iteration
  // count on fine grids. Also enables the handling of strongly non-isometric
  // seeds (plane-fit filtering of node noise and an automatic membrane-dominant
  // leading stage, both of which prevent the descent from folding the sheet)
  // and early stage exits once the relative objective progress per round falls
  // below stage_progress_tol. Disable to fall back to the plain secant-scaled
  // recursion over the given schedule.
  bool preconditioned = true;
  double stage_progress_tol = 1e-3;
};

struct BendingResult {
  Immersion immersion;
  double energy = 0.0;             // I(y) at the final iterate
  double isometry_residual = 0.0;  // L2 isometry defect
  double objective = 0.0;          // J_eps at the last stage
  int iterations = 0;              // accepted steps over all stages
  bool converged = false;
  bool monotone = true;  // within each stage, accepted steps never increase J_eps
  int degenerate_nodes = 0;
};

BendingResult minimize_bending(const MetricField& M, const QuadraticForm3& qf, Immersion seed,
                               const MinimizeBendingOptions& opts = {});

// Seed helper: nodal positions perturbed by uniform noise in [-amp, amp]^3.
Immersion add_noise(Immersion im, double amp, unsigned seed);

}  // namespace prestrain
