#pragma once

// Shared small types: planar points, rectangular domains, tensor-product
// grids, error categories, and the deterministic parallel reduction used by
// every grid sweep.

#include <Eigen/Dense>

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prestrain {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Midplane point x' = (x1, x2).
using Point2 = Eigen::Vector2d;

// Configuration / input errors. The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (non-convergence, singular solves). CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Closed axis-aligned rectangle [x1_min,x1_max] x [x2_min,x2_max].
struct Rect {
  double x1_min = 0.0, x1_max = 1.0;
  double x2_min = 0.0, x2_max = 1.0;

  double width1() const { return x1_max - x1_min; }
  double width2() const { return x2_max - x2_min; }
  double diameter() const { return std::hypot(width1(), width2()); }

  bool contains(const Point2& p, double slack = 0.0) const {
    return p[0] >= x1_min - slack && p[0] <= x1_max + slack &&
           p[1] >= x2_min - slack && p[1] <= x2_max + slack;
  }

  void validate() const {
    if (!(x1_max > x1_min) || !(x2_max > x2_min))
      throw ValidationError("degenerate domain rectangle");
  }
};

// Uniform tensor-product grid with nodes on the closed rectangle, x1-major
// storage: index(i, j) = i * ny + j for i in [0, nx), j in [0, ny).
struct Grid2 {
  Rect box;
  int nx = 2, ny = 2;

  void validate() const {
    box.validate();
    if (nx < 2 || ny < 2) throw ValidationError("grid needs at least 2x2 nodes");
  }

  double h1() const { return box.width1() / (nx - 1); }
  double h2() const { return box.width2() / (ny - 1); }
  int size() const { return nx * ny; }
  int index(int i, int j) const { return i * ny + j; }

  Point2 node(int i, int j) const {
    return Point2(box.x1_min + i * h1(), box.x2_min + j * h2());
  }

  // Composite trapezoid weight of node (i, j), already scaled by h1*h2.
  double trapezoid_weight(int i, int j) const {
    double w1 = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    double w2 = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    return w1 * w2 * h1() * h2();
  }
};

// Worker count: explicit argument wins, then PRESTRAIN_THREADS, then 1.
int resolve_thread_count(int requested = 0);

// Deterministic parallel sum of term(i) for i in [0, n): the index range is
// split into contiguous chunks, each chunk accumulates in index order, and
// chunk sums are combined in chunk order. Bitwise reproducible for a fixed
// (n, threads) pair regardless of scheduling.
double parallel_sum(int n, const std::function<double(int)>& term, int threads = 0);

// Apply fn(i) for i in [0, n) across threads (no reduction).
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

// Least-squares line fit for log-log scaling data.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace prestrain
