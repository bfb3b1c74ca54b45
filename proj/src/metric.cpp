#include "prestrain/metric.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

namespace prestrain {

namespace {

Mat3 sym_from_entries(double e11, double e22, double e33, double e12, double e13, double e23) {
  Mat3 m;
  m << e11, e12, e13, e12, e22, e23, e13, e23, e33;
  return m;
}

}  // namespace

Mat3 sym_jet_value(const SymJet3& s) {
  return sym_from_entries(s[0].v, s[1].v, s[2].v, s[3].v, s[4].v, s[5].v);
}

std::array<Mat3, 2> sym_jet_deriv(const SymJet3& s) {
  std::array<Mat3, 2> d;
  for (int axis = 0; axis < 2; ++axis)
    d[axis] = sym_from_entries(s[0].g[axis], s[1].g[axis], s[2].g[axis], s[3].g[axis],
                               s[4].g[axis], s[5].g[axis]);
  return d;
}

std::array<Mat3, 3> sym_jet_second(const SymJet3& s) {
  auto pick = [&](int a, int b) {
    return sym_from_entries(s[0].h(a, b), s[1].h(a, b), s[2].h(a, b), s[3].h(a, b), s[4].h(a, b),
                            s[5].h(a, b));
  };
  return {pick(0, 0), pick(0, 1), pick(1, 1)};
}

Mat3 MetricField::at(const Point2& p) const {
  if (!domain.contains(p, 1e-12 * domain.diameter())) {
    std::ostringstream os;
    os << label << ": evaluation point (" << p[0] << ", " << p[1] << ") outside domain";
    throw ValidationError(os.str());
  }
  return value(p);
}

MetricField make_metric_from_jets(std::string label, Rect domain,
                                  std::function<SymJet3(const Point2&)> entries) {
  MetricField M;
  M.label = std::move(label);
  M.domain = domain;
  M.value = [entries](const Point2& p) { return sym_jet_value(entries(p)); };
  M.deriv = [entries](const Point2& p) { return sym_jet_deriv(entries(p)); };
  M.second = [entries](const Point2& p) { return sym_jet_second(entries(p)); };
  return M;
}

void require_spd(const Mat3& G, const std::string& context) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(G);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-10 * hi) || !(hi > 0.0)) {
    std::ostringstream os;
    os << context << ": matrix not SPD (eigenvalues " << es.eigenvalues().transpose() << ")";
    throw ValidationError(os.str());
  }
}

Mat3 metric_sqrt(const Mat3& G) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(G);
  require_spd(G, "metric_sqrt");
  Vec3 roots = es.eigenvalues().cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

// Second-order stencil for d/dx_axis f(p) that keeps all probes inside the
// closed domain: central when possible, else one-sided 3-point.
template <typename F, typename R>
R directional_derivative(const F& f, const Point2& p, int axis, double h, const Rect& domain) {
  Point2 step = Point2::Zero();
  step[axis] = h;
  bool room_plus = domain.contains(p + step);
  bool room_minus = domain.contains(p - step);
  if (room_plus && room_minus) return (f(p + step) - f(p - step)) / (2.0 * h);
  if (room_plus) return (-3.0 * f(p) + 4.0 * f(p + step) - f(p + 2.0 * step)) / (2.0 * h);
  if (room_minus) return (3.0 * f(p) - 4.0 * f(p - step) + f(p - 2.0 * step)) / (2.0 * h);
  throw ValidationError("finite-difference step exceeds domain extent");
}

}  // namespace

MetricDerivs metric_derivatives_fd(const MetricField& M, const Point2& p, double h) {
  MetricDerivs d;
  d.d1 = directional_derivative<decltype(M.value), Mat3>(M.value, p, 0, h, M.domain);
  d.d2 = directional_derivative<decltype(M.value), Mat3>(M.value, p, 1, h, M.domain);
  return d;
}

MetricDerivs metric_derivatives(const MetricField& M, const Point2& p) {
  if (M.has_analytic_deriv()) {
    auto d = M.deriv(p);
    return {d[0], d[1]};
  }
  return metric_derivatives_fd(M, p, M.fd_step_or_default());
}

std::array<Mat3, 3> metric_second_derivatives(const MetricField& M, const Point2& p) {
  if (M.has_analytic_second()) return M.second(p);
  // Nested differences of the first-derivative field. The outer step is
  // widened to sqrt(h_fd * diameter) so the amplified rounding noise of the
  // inner difference stays below the outer truncation error.
  double h = std::sqrt(M.fd_step_or_default() * M.domain.diameter());
  auto d1_field = [&](const Point2& q) { return metric_derivatives(M, q).d1; };
  auto d2_field = [&](const Point2& q) { return metric_derivatives(M, q).d2; };
  Mat3 d11 = directional_derivative<decltype(d1_field), Mat3>(d1_field, p, 0, h, M.domain);
  Mat3 d12 = directional_derivative<decltype(d1_field), Mat3>(d1_field, p, 1, h, M.domain);
  Mat3 d21 = directional_derivative<decltype(d2_field), Mat3>(d2_field, p, 0, h, M.domain);
  Mat3 d22 = directional_derivative<decltype(d2_field), Mat3>(d2_field, p, 1, h, M.domain);
  return {d11, 0.5 * (d12 + d21), d22};
}

Mat2 principal_minor(const Mat3& G) { return G.topLeftCorner<2, 2>(); }

Mat3 embed_star(const Mat2& F) {
  Mat3 out = Mat3::Zero();
  out.topLeftCorner<2, 2>() = F;
  return out;
}

double fd_scalar_derivative(const std::function<double(const Point2&)>& f, const Point2& p,
                            int axis, double h, const Rect& domain) {
  return directional_derivative<decltype(f), double>(f, p, axis, h, domain);
}

}  // namespace prestrain
