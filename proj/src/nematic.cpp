#include "prestrain/nematic.hpp"

#include "prestrain/diffgeo.hpp"
#include "prestrain/elastic.hpp"

#include <cmath>
#include <sstream>

namespace prestrain {

namespace {

// Director component jets at p for a pattern built from an in-plane angle
// theta and an out-of-plane tilt phi: n = (cos phi cos theta, cos phi sin theta, sin phi).
std::array<Jet2, 3> director_from_angles(const Jet2& theta, const Jet2& phi) {
  Jet2 cp = cos(phi);
  return {cp * cos(theta), cp * sin(theta), sin(phi)};
}

}  // namespace

void DirectorField::validate() const {
  domain.validate();
  if (!(r > 0.0)) throw ValidationError("director order parameter r must be positive");
  if (!nhat) throw ValidationError("director field has no evaluator");
  // Unit-length sanity probes at the corners and the center.
  Point2 probes[5] = {{domain.x1_min, domain.x2_min},
                      {domain.x1_max, domain.x2_min},
                      {domain.x1_min, domain.x2_max},
                      {domain.x1_max, domain.x2_max},
                      {0.5 * (domain.x1_min + domain.x1_max), 0.5 * (domain.x2_min + domain.x2_max)}};
  for (const Point2& p : probes) {
    auto n = nhat(p);
    double norm2 = n[0].v * n[0].v + n[1].v * n[1].v + n[2].v * n[2].v;
    if (std::abs(norm2 - 1.0) > 1e-9)
      throw ValidationError("director field is not unit length on the domain");
  }
}

bool DirectorField::planar_at(const Point2& p, double tol) const {
  return std::abs(nhat(p)[2].v) <= tol;
}

double delta_from_poisson(double nu) {
  if (std::abs(nu + 1.0) < 1e-12)
    throw ValidationError("Poisson ratio nu = -1 has no exponent delta");
  return -nu / (nu + 1.0);
}

DirectorField make_director(const PatternSpec& spec, double r, double delta, Rect domain) {
  domain.validate();
  DirectorField dir;
  dir.domain = domain;
  dir.r = r;
  dir.delta = delta;
  Poly2 tilt = spec.tilt;
  switch (spec.kind) {
    case PatternSpec::Kind::Radial:
    case PatternSpec::Kind::Azimuthal:
    case PatternSpec::Kind::Spiral: {
      // Disclination patterns are singular at the center, which therefore
      // must stay outside the closed domain.
      if (domain.contains(Point2(spec.center), 0.0))
        throw ValidationError("disclination center lies inside the domain");
      double offset = 0.0;
      if (spec.kind == PatternSpec::Kind::Azimuthal) offset = 0.5 * M_PI;
      if (spec.kind == PatternSpec::Kind::Spiral) offset = spec.psi;
      Vec2 center = spec.center;
      dir.label = spec.kind == PatternSpec::Kind::Radial
                      ? "radial"
                      : (spec.kind == PatternSpec::Kind::Azimuthal ? "azimuthal" : "spiral");
      dir.nhat = [center, offset, tilt](const Point2& p) {
        Jet2 x1 = Jet2::variable(p[0], 0), x2 = Jet2::variable(p[1], 1);
        Jet2 theta = atan2(x2 - center[1], x1 - center[0]) + offset;
        return director_from_angles(theta, tilt.eval(x1, x2));
      };
      break;
    }
    case PatternSpec::Kind::Custom: {
      Poly2 theta = spec.theta;
      dir.label = "custom";
      dir.nhat = [theta, tilt](const Point2& p) {
        Jet2 x1 = Jet2::variable(p[0], 0), x2 = Jet2::variable(p[1], 1);
        return director_from_angles(theta.eval(x1, x2), tilt.eval(x1, x2));
      };
      break;
    }
  }
  dir.validate();
  return dir;
}

MetricField nematic_metric(const DirectorField& dir) {
  dir.validate();
  double s = std::pow(dir.r, 2.0 * dir.delta);
  double gc = dir.r * dir.r - 1.0;
  auto nhat = dir.nhat;
  return make_metric_from_jets("nematic:" + dir.label, dir.domain, [s, gc, nhat](const Point2& p) {
    auto n = nhat(p);
    SymJet3 e;
    e[0] = s * (1.0 + gc * n[0] * n[0]);  // G11
    e[1] = s * (1.0 + gc * n[1] * n[1]);  // G22
    e[2] = s * (1.0 + gc * n[2] * n[2]);  // G33
    e[3] = s * gc * n[0] * n[1];          // G12
    e[4] = s * gc * n[0] * n[2];          // G13
    e[5] = s * gc * n[1] * n[2];          // G23
    return e;
  });
}

Mat3 nematic_prestrain(const DirectorField& dir, const Point2& p) {
  auto n = dir.nhat(p);
  Vec3 nv(n[0].v, n[1].v, n[2].v);
  return std::pow(dir.r, dir.delta) *
         (Mat3::Identity() + (dir.r - 1.0) * nv * nv.transpose());
}

double curl_t_curl(const SymField2& field, const Point2& p) {
  auto efg = field.entries(p);
  return efg[0].h(1, 1) - 2.0 * efg[1].h(0, 1) + efg[2].h(0, 0);
}

SymField2 nematic_minor_field(const DirectorField& dir) {
  double s = std::pow(dir.r, 2.0 * dir.delta);
  double gc = dir.r * dir.r - 1.0;
  auto nhat = dir.nhat;
  SymField2 field;
  field.domain = dir.domain;
  field.entries = [s, gc, nhat](const Point2& p) {
    auto n = nhat(p);
    return std::array<Jet2, 3>{s * (1.0 + gc * n[0] * n[0]), s * gc * n[0] * n[1],
                               s * (1.0 + gc * n[1] * n[1])};
  };
  return field;
}

double curl_t_curl_fd(const std::function<Mat2(const Point2&)>& field, const Point2& p, double h,
                      const Rect& domain) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  Point2 probes[4] = {{p[0] + h, p[1]}, {p[0] - h, p[1]}, {p[0], p[1] + h}, {p[0], p[1] - h}};
  for (const Point2& q : probes)
    if (!domain.contains(q, 1e-12 * domain.diameter()))
      throw ValidationError("finite-difference stencil leaves the domain");
  Mat2 c = field(p);
  double e22 = (field(Point2(p[0], p[1] + h))(0, 0) - 2.0 * c(0, 0) +
                field(Point2(p[0], p[1] - h))(0, 0)) /
               (h * h);
  double g11 = (field(Point2(p[0] + h, p[1]))(1, 1) - 2.0 * c(1, 1) +
                field(Point2(p[0] - h, p[1]))(1, 1)) /
               (h * h);
  double f12 = (field(Point2(p[0] + h, p[1] + h))(0, 1) - field(Point2(p[0] + h, p[1] - h))(0, 1) -
                field(Point2(p[0] - h, p[1] + h))(0, 1) +
                field(Point2(p[0] - h, p[1] - h))(0, 1)) /
               (4.0 * h * h);
  return e22 - 2.0 * f12 + g11;
}

double nematic_kappa_unscaled(const DirectorField& dir, const Point2& p) {
  double gc = dir.r * dir.r - 1.0;
  auto n = dir.nhat(p);
  std::array<Jet2, 3> efg = {1.0 + gc * n[0] * n[0], gc * n[0] * n[1], 1.0 + gc * n[1] * n[1]};
  return brioschi_curvature(efg);
}

double nematic_kappa_identity_rhs(const DirectorField& dir, const Point2& p) {
  double gc = dir.r * dir.r - 1.0;
  auto n = dir.nhat(p);
  Jet2 e = n[0] * n[0], f = n[0] * n[1], g = n[1] * n[1];
  double ctc = e.h(1, 1) - 2.0 * f.h(0, 1) + g.h(0, 0);
  return -0.5 * (gc / (gc + 1.0)) * ctc;
}

NematicClassification nematic_classify(const DirectorField& dir, const Grid2& grid) {
  dir.validate();
  grid.validate();
  if (!(grid.box.x1_min >= dir.domain.x1_min - 1e-12 && grid.box.x1_max <= dir.domain.x1_max + 1e-12 &&
        grid.box.x2_min >= dir.domain.x2_min - 1e-12 && grid.box.x2_max <= dir.domain.x2_max + 1e-12))
    throw ValidationError("classification grid extends beyond the director domain");

  MetricField M = nematic_metric(dir);
  SymField2 minor_field = nematic_minor_field(dir);

  NematicClassification out;
  out.subunit_r = dir.r < 1.0;
  double dG_sup = 0.0, d2G_sup = 0.0, G_sup = 0.0;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      Point2 p = grid.node(i, j);
      if (!dir.planar_at(p, 1e-12))
        throw ValidationError("flatness classification requires a planar director");

      out.riemann_sup = std::max(out.riemann_sup, riemann(M, p).sup_abs());
      out.triple_sup = std::max(out.triple_sup, curvature_triple(M, p).sup_abs());
      out.kappa_sup = std::max(out.kappa_sup, std::abs(nematic_kappa_unscaled(dir, p)));
      out.curlcurl_sup = std::max(out.curlcurl_sup, std::abs(curl_t_curl(minor_field, p)));

      MetricDerivs d = metric_derivatives(M, p);
      dG_sup = std::max(dG_sup, d.d1.squaredNorm() + d.d2.squaredNorm());
      auto dd = metric_second_derivatives(M, p);
      d2G_sup = std::max(d2G_sup, std::sqrt(dd[0].squaredNorm() + 2.0 * dd[1].squaredNorm() +
                                            dd[2].squaredNorm()));
      G_sup = std::max(G_sup, M.at(p).cwiseAbs().maxCoeff());
    }

  out.threshold = 1e-6 * (1.0 + dG_sup + d2G_sup);
  double triple_threshold = out.threshold * (1.0 + G_sup);
  bool c1 = out.riemann_sup <= out.threshold;
  bool c2 = out.kappa_sup <= out.threshold;
  bool c3 = out.curlcurl_sup <= out.threshold;
  bool c4 = out.triple_sup <= triple_threshold;
  out.immersible = c1;
  out.conditions_consistent = (c1 == c2) && (c2 == c3) && (c3 == c4);
  return out;
}

double nematic_q2(const DirectorField& dir, const IsotropicModuli& m, const Point2& p,
                  const Mat2& F) {
  m.validate();
  auto nj = dir.nhat(p);
  Vec2 n(nj[0].v, nj[1].v);  // in-plane part of the unit director
  double n3 = nj[2].v;
  double r = dir.r;
  double gc = r * r - 1.0;
  double nn = n.squaredNorm();
  double gamma = 1.0 / (n3 * n3 + nn * r * r);
  double scale = std::pow(r, -4.0 * dir.delta);
  double a = gc * gamma;

  // Direct planar-form evaluation.
  Mat2 S = 0.5 * (F + F.transpose());
  double Fn2 = (S * n).squaredNorm();
  double nFn = n.dot(S * n);
  double trF = S.trace();
  double q_direct = scale * (m.mu * (S.squaredNorm() - 2.0 * a * Fn2 + a * a * nFn * nFn) +
                             m.beta() * (trF - a * nFn) * (trF - a * nFn));

  // Square-root-of-minor route.
  double q_sqrt;
  if (nn < 1e-10) {
    q_sqrt = scale * q2_iso0(m, S);
  } else {
    double gtilde = (1.0 - std::sqrt(gamma)) / nn;
    Mat2 T = Mat2::Identity() - gtilde * n * n.transpose();
    q_sqrt = scale * q2_iso0(m, T * S * T);
  }

  // General isotropic reduction from the full 3x3 metric.
  MetricField M = nematic_metric(dir);
  double q_general = q2_isotropic_closed(m, M.at(p), F);

  double ref = 1.0 + std::abs(q_general);
  if (std::abs(q_direct - q_general) > 1e-9 * ref || std::abs(q_sqrt - q_general) > 1e-9 * ref) {
    std::ostringstream msg;
    msg << "nematic effective form routes disagree: direct=" << q_direct << " sqrt=" << q_sqrt
        << " general=" << q_general;
    throw NumericalError(msg.str());
  }
  return q_general;
}

Vec3 nematic_cosserat(const DirectorField& dir, const Point2& p, const Mat32& J, const Vec3& N) {
  auto nj = dir.nhat(p);
  Vec2 n(nj[0].v, nj[1].v);
  double n3 = nj[2].v;
  double r = dir.r;
  double gamma = 1.0 / (n3 * n3 + n.squaredNorm() * r * r);
  return (r * r - 1.0) * n3 * gamma * (J * n) +
         r * std::sqrt(gamma) * std::pow(r, dir.delta) * N;
}

}  // namespace prestrain
