#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "prestrain/catalog.hpp"
#include "prestrain/diffgeo.hpp"
#include "prestrain/elastic.hpp"
#include "prestrain/immersion.hpp"
#include "prestrain/nematic.hpp"

#include <cmath>
#include <random>

using namespace prestrain;

namespace {

const Rect kBox{0.5, 1.5, 0.5, 1.5};

Grid2 box_grid(int n) {
  Grid2 g;
  g.box = kBox;
  g.nx = n;
  g.ny = n;
  return g;
}

DirectorField spiral(double psi, double r = 1.3, double delta = -0.5) {
  PatternSpec spec;
  spec.kind = PatternSpec::Kind::Spiral;
  spec.psi = psi;
  return make_director(spec, r, delta, kBox);
}

DirectorField custom_theta(const Poly2& theta, double r = 1.3, double delta = -0.5,
                           const Poly2& tilt = {}) {
  PatternSpec spec;
  spec.kind = PatternSpec::Kind::Custom;
  spec.theta = theta;
  spec.tilt = tilt;
  return make_director(spec, r, delta, kBox);
}

std::vector<Point2> sample_points() {
  return {Point2(0.6, 0.7), Point2(1.0, 1.0), Point2(1.4, 0.55), Point2(0.8, 1.35)};
}

Vec3 director_value(const DirectorField& dir, const Point2& p) {
  auto n = dir.nhat(p);
  return Vec3(n[0].v, n[1].v, n[2].v);
}

}  // namespace

TEST_CASE("poisson exponent map matches its definition") {
  CHECK(delta_from_poisson(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(delta_from_poisson(0.5) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(delta_from_poisson(2.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(delta_from_poisson(-1.0), ValidationError);
}

TEST_CASE("pattern directors are unit length with consistent jet derivatives") {
  std::vector<DirectorField> fields;
  PatternSpec radial;
  fields.push_back(make_director(radial, 1.2, -0.5, kBox));
  PatternSpec azimuthal;
  azimuthal.kind = PatternSpec::Kind::Azimuthal;
  fields.push_back(make_director(azimuthal, 1.2, -0.5, kBox));
  fields.push_back(spiral(0.7));
  fields.push_back(custom_theta(Poly2{0.3, 0, 0, 0, 1, 0}, 1.3, -0.5, Poly2{0.2, 0.3, 0, 0, 0, 0}));

  for (const DirectorField& dir : fields) {
    CAPTURE(dir.label);
    for (const Point2& p : sample_points()) {
      auto n = dir.nhat(p);
      // The squared norm must be the constant jet 1: value, gradient, Hessian.
      Jet2 norm2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
      CHECK(norm2.v == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(norm2.g.norm() < 1e-12);
      CHECK(norm2.h.norm() < 1e-11);
    }
  }

  CHECK(fields[0].planar_at(Point2(1.0, 1.0)));
  CHECK_FALSE(fields[3].planar_at(Point2(1.0, 1.0)));
}

TEST_CASE("director construction rejects degenerate input") {
  PatternSpec inside;
  inside.center = Vec2(1.0, 1.0);
  CHECK_THROWS_AS(make_director(inside, 1.2, -0.5, kBox), ValidationError);
  PatternSpec ok;
  CHECK_THROWS_AS(make_director(ok, 0.0, -0.5, kBox), ValidationError);
  CHECK_THROWS_AS(make_director(ok, -1.0, -0.5, kBox), ValidationError);
}

TEST_CASE("director metric matches the rank-one closed form and determinants") {
  DirectorField dir = custom_theta(Poly2{0.4, 0.5, 0, 0, 1, 0}, 1.3, -0.5,
                                   Poly2{0.3, 0, 0.4, 0, 0, 0});
  MetricField M = nematic_metric(dir);
  double r = dir.r;
  double s = std::pow(r, 2 * dir.delta);
  for (const Point2& p : sample_points()) {
    Vec3 n = director_value(dir, p);
    Mat3 expected = s * (Mat3::Identity() + (r * r - 1) * n * n.transpose());
    CHECK((M.at(p) - expected).cwiseAbs().maxCoeff() < 1e-13);

    double detG = M.at(p).determinant();
    CHECK(detG == doctest::Approx(std::pow(r, 2 + 6 * dir.delta)).epsilon(1e-12));

    double det_minor = principal_minor(M.at(p)).determinant();
    double expected_minor =
        std::pow(r, 4 * dir.delta) * (r * r - (r * r - 1) * n[2] * n[2]);
    CHECK(det_minor == doctest::Approx(expected_minor).epsilon(1e-12));
  }
}

TEST_CASE("closed-form prestrain is the spd square root of the metric") {
  for (double r : {1.3, 0.8}) {
    DirectorField dir = spiral(0.7, r);
    MetricField M = nematic_metric(dir);
    for (const Point2& p : sample_points()) {
      Mat3 A = nematic_prestrain(dir, p);
      CHECK((A * A - M.at(p)).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((A - metric_sqrt(M.at(p))).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("minor square root identity holds wherever the planar part survives") {
  DirectorField dir = custom_theta(Poly2{0.4, 0.5, 0, 0, 1, 0}, 1.4, -0.5,
                                   Poly2{0.25, 0.3, 0, 0, 0, 0});
  double r = dir.r;
  for (const Point2& p : sample_points()) {
    Vec3 nv = director_value(dir, p);
    Vec2 n = nv.head<2>();
    double nn = n.squaredNorm();
    REQUIRE(nn > 1e-10);
    double gamma = 1.0 / (nv[2] * nv[2] + nn * r * r);
    double gtilde = (1.0 - std::sqrt(gamma)) / nn;
    Mat2 T = Mat2::Identity() - gtilde * n * n.transpose();
    Mat2 product = T * T * (Mat2::Identity() + (r * r - 1) * n * n.transpose());
    CHECK((product - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("curl curl operator matches finite differences and kills constants") {
  DirectorField constant = custom_theta(Poly2{0.9, 0, 0, 0, 0, 0});
  SymField2 const_minor = nematic_minor_field(constant);
  for (const Point2& p : sample_points()) CHECK(std::abs(curl_t_curl(const_minor, p)) < 1e-13);

  DirectorField wavy = custom_theta(Poly2{0, 0, 0, 0, 1, 0});  // theta = x1 x2
  SymField2 minor = nematic_minor_field(wavy);
  MetricField M = nematic_metric(wavy);
  auto minor_value = [&](const Point2& p) { return principal_minor(M.at(p)).eval(); };
  bool saw_nonzero = false;
  for (const Point2& p : sample_points()) {
    double analytic = curl_t_curl(minor, p);
    double fd = curl_t_curl_fd(minor_value, p, 1e-4, kBox);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
    if (std::abs(analytic) > 1e-3) saw_nonzero = true;
  }
  CHECK(saw_nonzero);

  CHECK_THROWS_AS(curl_t_curl_fd(minor_value, Point2(0.5, 1.0), 1e-4, kBox), ValidationError);
  CHECK_THROWS_AS(curl_t_curl_fd(minor_value, Point2(1.0, 1.0), 0.0, kBox), ValidationError);
}

TEST_CASE("disclination minors are curl free away from the center") {
  for (DirectorField dir : {spiral(0.0), spiral(0.7), spiral(1.5707963267948966)}) {
    SymField2 minor = nematic_minor_field(dir);
    // The raw alignment tensor n (x) n is curl-free as well.
    auto nhat = dir.nhat;
    SymField2 alignment;
    alignment.domain = dir.domain;
    alignment.entries = [nhat](const Point2& p) {
      auto n = nhat(p);
      return std::array<Jet2, 3>{n[0] * n[0], n[0] * n[1], n[1] * n[1]};
    };
    for (const Point2& p : sample_points()) {
      CHECK(std::abs(curl_t_curl(minor, p)) < 1e-10);
      CHECK(std::abs(curl_t_curl(alignment, p)) < 1e-10);
    }
  }
}

TEST_CASE("curvature identity links the minor curvature to the alignment tensor") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int k = 0; k < 6; ++k) {
    Poly2 theta{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    DirectorField dir = custom_theta(theta, 1.25 + 0.1 * k);
    for (const Point2& p : sample_points()) {
      double lhs = nematic_kappa_unscaled(dir, p);
      double rhs = nematic_kappa_identity_rhs(dir, p);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }

  // Unit-curvature sanity: theta = x1 x2 produces a visibly curved minor.
  DirectorField wavy = custom_theta(Poly2{0, 0, 0, 0, 1, 0});
  bool curved = false;
  for (const Point2& p : sample_points())
    if (std::abs(nematic_kappa_unscaled(wavy, p)) > 1e-3) curved = true;
  CHECK(curved);
}

TEST_CASE("flatness classification accepts disclinations and rejects generic fields") {
  Grid2 g = box_grid(17);

  for (DirectorField dir : {spiral(0.0, 1.3), spiral(0.7, 1.3)}) {
    NematicClassification c = nematic_classify(dir, g);
    CHECK(c.immersible);
    CHECK(c.conditions_consistent);
    CHECK(c.riemann_sup <= c.threshold);
    CHECK(c.kappa_sup <= c.threshold);
    CHECK(c.curlcurl_sup <= c.threshold);
    CHECK_FALSE(c.subunit_r);
  }

  NematicClassification constant = nematic_classify(custom_theta(Poly2{0.7, 0, 0, 0, 0, 0}), g);
  CHECK(constant.immersible);
  CHECK(constant.conditions_consistent);

  NematicClassification wavy = nematic_classify(custom_theta(Poly2{0, 0, 0, 0, 1, 0}), g);
  CHECK_FALSE(wavy.immersible);
  CHECK(wavy.conditions_consistent);
  CHECK(wavy.riemann_sup > wavy.threshold);
  CHECK(wavy.curlcurl_sup > wavy.threshold);

  NematicClassification oblate = nematic_classify(spiral(0.7, 0.8), g);
  CHECK(oblate.immersible);
  CHECK(oblate.subunit_r);

  // Tilted directors are outside the planar flatness theorem.
  DirectorField tilted = custom_theta(Poly2{0.3, 0, 0, 0, 0, 0}, 1.3, -0.5,
                                      Poly2{0.2, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(nematic_classify(tilted, g), ValidationError);

  Grid2 outside = box_grid(9);
  outside.box = Rect{0.0, 2.0, 0.5, 1.5};
  CHECK_THROWS_AS(nematic_classify(spiral(0.7), outside), ValidationError);
}

TEST_CASE("effective quadratic form routes agree for generic directors") {
  IsotropicModuli m{1.2, 0.9};
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 25; ++k) {
    Poly2 theta{u(rng), u(rng), u(rng), 0, u(rng), 0};
    Poly2 tilt{0.4 * u(rng), 0.3 * u(rng), 0, 0, 0, 0};
    DirectorField dir = custom_theta(theta, 1.3, -1.0 / 3.0, tilt);
    Mat2 F;
    double a = u(rng), b = u(rng), c = u(rng);
    F << a, c, c, b;
    Point2 p(0.7 + 0.3 * std::abs(u(rng)), 0.8 + 0.3 * std::abs(u(rng)));
    // The evaluator itself cross-checks the direct, sqrt-minor, and general
    // routes to 1e-9 and throws on drift.
    double q = nematic_q2(dir, m, p, F);
    CHECK(q >= -1e-12);
    CHECK(q == doctest::Approx(q2_isotropic_closed(m, nematic_metric(dir).at(p), F))
                   .epsilon(1e-9));
  }
}

TEST_CASE("effective form reduces to the scaled flat form for normal directors") {
  // tilt pi/2 points the director along e3; the in-plane part vanishes.
  IsotropicModuli m{1.5, 0.8};
  DirectorField dir = custom_theta(Poly2{0.2, 0, 0, 0, 0, 0}, 1.3, -0.5,
                                   Poly2{M_PI / 2, 0, 0, 0, 0, 0});
  double scale = std::pow(dir.r, -4.0 * dir.delta);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    Mat2 F;
    double a = u(rng), b = u(rng), c = u(rng);
    F << a, c, c, b;
    double expected = scale * (m.mu * F.squaredNorm() + m.beta() * F.trace() * F.trace());
    CHECK(nematic_q2(dir, m, Point2(1.0, 1.0), F) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("planar directors shrink the correction factor to one minus inverse r") {
  // For n3 = 0 the square-root reduction uses T = Id - (1 - 1/r) n n^T.
  IsotropicModuli m{1.1, 0.6};
  DirectorField dir = custom_theta(Poly2{0.5, 0.4, 0, 0, 0, 0}, 1.4, -0.5);
  double scale = std::pow(dir.r, -4.0 * dir.delta);
  double alpha = 1.0 - 1.0 / dir.r;
  for (const Point2& p : sample_points()) {
    Vec2 n = director_value(dir, p).head<2>();
    Mat2 T = Mat2::Identity() - alpha * n * n.transpose();
    Mat2 F;
    F << 0.7, -0.2, -0.2, 1.1;
    double expected = scale * q2_iso0(m, T * F * T);
    CHECK(nematic_q2(dir, m, p, F) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("cosserat vector reduces to the scaled normal for planar directors") {
  DirectorField dir = spiral(0.7, 1.3);
  Mat32 J;
  J << 1.1, 0.2, -0.1, 0.9, 0.05, -0.3;
  Vec3 N = (J.col(0).cross(J.col(1))).normalized();
  for (const Point2& p : sample_points()) {
    Vec3 b = nematic_cosserat(dir, p, J, N);
    Vec3 expected = std::pow(dir.r, dir.delta) * N;
    CHECK((b - expected).norm() < 1e-12);
  }
}

TEST_CASE("cosserat vector matches the metric route on a constant tilted director") {
  // A constant director gives a constant metric whose minor has the exact
  // flat immersion y = sqrt(G_2x2) x, so the frame route is available as an
  // independent oracle for the closed-form vector.
  DirectorField dir = custom_theta(Poly2{0.6, 0, 0, 0, 0, 0}, 1.3, -0.5,
                                   Poly2{0.35, 0, 0, 0, 0, 0});
  MetricField M = nematic_metric(dir);
  Mat2 root = principal_minor(M.at(Point2(1.0, 1.0))).llt().matrixL();
  Grid2 g = box_grid(9);
  Immersion im = make_immersion(g, [&](const Point2& p) {
    Vec2 y = root.transpose() * Vec2(p[0], p[1]);
    return Vec3(y[0], y[1], 0.0);
  });
  CosseratField frame_route = cosserat(M, QuadraticForm3::isotropic({1.0, 1.0}), im);
  CHECK(frame_route.degenerate_nodes == 0);
  for (int i = 2; i < g.nx - 2; i += 3)
    for (int j = 2; j < g.ny - 2; j += 3) {
      int idx = g.index(i, j);
      Vec3 closed = nematic_cosserat(dir, g.node(i, j), frame_route.J[idx],
                                     frame_route.normal[idx]);
      CHECK((closed - frame_route.b[idx]).norm() < 1e-10);
    }
}
