#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "prestrain/elastic.hpp"
#include "prestrain/metric.hpp"

#include <cmath>
#include <random>

using namespace prestrain;

namespace {

Mat3 random_spd3(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 B;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B(i, j) = u(rng);
  return B * B.transpose() + 0.4 * Mat3::Identity();
}

Mat2 random_sym2(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Mat2 S;
  double a = u(rng), b = u(rng), c = u(rng);
  S << a, c, c, b;
  return S;
}

IsotropicModuli random_moduli(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  return IsotropicModuli{u(rng), u(rng)};
}

// Independent minimization oracle: the out-of-plane correction enters Q3
// through A^{-1}(F* + sym(c (x) e3))A^{-1}, a quadratic function of c, so the
// exact minimum follows from one dense 3x3 solve with derivatives formed by
// differencing (central differences are exact on quadratics).
double q2_direct_minimization(const QuadraticForm3& qf, const Mat3& A, const Mat2& F,
                              Vec3* argmin = nullptr) {
  Mat3 Ainv = A.inverse();
  auto phi = [&](const Vec3& c) {
    Mat3 X = embed_star(F);
    X.col(2) += 0.5 * c;
    X.row(2) += 0.5 * c.transpose();
    return qf.q3(Ainv * X * Ainv);
  };
  double p0 = phi(Vec3::Zero());
  Vec3 b;
  Mat3 H;
  for (int i = 0; i < 3; ++i) {
    Vec3 ei = Vec3::Unit(i);
    double pp = phi(ei), pm = phi(-ei);
    b[i] = 0.5 * (pp - pm);
    H(i, i) = pp - 2 * p0 + pm;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Vec3 ei = Vec3::Unit(i), ej = Vec3::Unit(j);
      H(i, j) = H(j, i) = phi(ei + ej) - phi(ei) - phi(ej) + p0;
    }
  Vec3 cstar = -H.ldlt().solve(b);
  if (argmin) *argmin = cstar;
  return phi(cstar);
}

}  // namespace

TEST_CASE("three dimensional quadratic form reproduces hand values") {
  QuadraticForm3 qf = QuadraticForm3::isotropic({1.0, 1.0});
  CHECK(q3(qf, Mat3::Identity()) == doctest::Approx(12.0).epsilon(1e-14));

  Mat3 skew;
  skew << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
  CHECK(q3(qf, skew) == doctest::Approx(0.0));

  QuadraticForm3 shear_only = QuadraticForm3::isotropic({2.0, 0.0});
  Mat3 e12 = Vec3::UnitX() * Vec3::UnitY().transpose();
  CHECK(q3(shear_only, e12) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stress map is linear, kills skew parts, and generates the form") {
  QuadraticForm3 qf = QuadraticForm3::isotropic({1.7, 0.6});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Mat3 F, G;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        F(i, j) = u(rng);
        G(i, j) = u(rng);
      }
    Mat3 sym = 0.5 * (F + F.transpose());
    Mat3 skew = 0.5 * (F - F.transpose());
    CHECK((qf.l3(F) - qf.l3(sym)).norm() < 1e-13);
    CHECK(qf.l3(skew).norm() < 1e-13);
    CHECK((qf.l3(F + G) - qf.l3(F) - qf.l3(G)).norm() < 1e-12);
    // The form is the pairing of the stress with the symmetric part.
    CHECK(q3(qf, F) == doctest::Approx((qf.l3(F).array() * sym.array()).sum()).epsilon(1e-12));
    CHECK(q3(qf, F) >= 0.0);
  }
}

TEST_CASE("matrix-encoded forms match the isotropic fast path") {
  IsotropicModuli m{1.3, 0.8};
  // L3(S) = mu S + lambda tr(S) Id in the orthonormal symmetric basis: the
  // trace couples only the three diagonal coordinates.
  Mat6 Q = m.mu * Mat6::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Q(i, j) += m.lambda;
  QuadraticForm3 general = QuadraticForm3::general(Q);
  QuadraticForm3 iso = QuadraticForm3::isotropic(m);
  CHECK_FALSE(general.is_isotropic());
  CHECK(iso.is_isotropic());

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Mat3 F;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) F(i, j) = u(rng);
    CHECK(q3(general, F) == doctest::Approx(q3(iso, F)).epsilon(1e-12));
    CHECK((general.l3(F) - iso.l3(F)).norm() < 1e-12);
  }
}

TEST_CASE("matrix-encoded forms reject asymmetric or indefinite input") {
  Mat6 asym = Mat6::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(QuadraticForm3::general(asym), ValidationError);
  Mat6 indef = Mat6::Identity();
  indef(5, 5) = -1.0;
  CHECK_THROWS_AS(QuadraticForm3::general(indef), ValidationError);
  CHECK_THROWS_AS(QuadraticForm3::isotropic({-1.0, 0.5}), ValidationError);
}

TEST_CASE("basis conversion between symmetric matrices and coordinates is isometric") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    Mat3 S;
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng), f = u(rng);
    S << a, d, e, d, b, f, e, f, c;
    Vec6 v = sym_to_basis(S);
    CHECK((basis_to_sym(v) - S).norm() < 1e-14);
    // Orthonormal coordinates preserve the Frobenius norm.
    CHECK(v.squaredNorm() == doctest::Approx(S.squaredNorm()).epsilon(1e-13));
  }
}

TEST_CASE("out-of-plane minimizer matches the flat-metric closed form") {
  IsotropicModuli m{1.8, 0.7};
  EffectiveDensityContext ctx =
      EffectiveDensityContext::from_prestrain(QuadraticForm3::isotropic(m), Mat3::Identity());

  CHECK(minimizer_c0(ctx, Mat2::Zero()).norm() < 1e-14);

  // For A = Id the correction is purely normal: c0 = -lambda tr(F)/(lambda+mu) e3.
  std::mt19937 rng(17);
  for (int k = 0; k < 10; ++k) {
    Mat2 F = random_sym2(rng);
    Vec3 c0 = minimizer_c0(ctx, F);
    Vec3 expected = -(m.lambda * F.trace() / (m.lambda + m.mu)) * Vec3::UnitZ();
    CHECK((c0 - expected).norm() < 1e-12);
  }

  // And the reduced value collapses to mu|sym F|^2 + beta tr(F)^2.
  Mat2 id2 = Mat2::Identity();
  EffectiveDensityContext unit =
      EffectiveDensityContext::from_prestrain(QuadraticForm3::isotropic({1.0, 1.0}),
                                              Mat3::Identity());
  CHECK(q2_general(unit, id2) == doctest::Approx(4.0).epsilon(1e-13));
  for (int k = 0; k < 10; ++k) {
    Mat2 F = random_sym2(rng);
    CHECK(q2_general(unit, F) ==
          doctest::Approx(q2_iso0({1.0, 1.0}, F)).epsilon(1e-12));
  }
}

TEST_CASE("reduced density agrees with direct minimization on random inputs") {
  std::mt19937 rng(2024);
  for (int k = 0; k < 50; ++k) {
    Mat3 G = random_spd3(rng);
    Mat3 A = metric_sqrt(G);
    Mat2 F = random_sym2(rng);
    IsotropicModuli m = random_moduli(rng);
    QuadraticForm3 qf = QuadraticForm3::isotropic(m);
    EffectiveDensityContext ctx = EffectiveDensityContext::from_prestrain(qf, A);

    Vec3 oracle_arg;
    double oracle = q2_direct_minimization(qf, A, F, &oracle_arg);
    double scale = std::max(1.0, std::abs(oracle));
    CHECK(std::abs(q2_general(ctx, F) - oracle) < 1e-10 * scale);
    CHECK((minimizer_c0(ctx, F) - oracle_arg).norm() < 1e-8 * (1.0 + oracle_arg.norm()));

    // The closed-form value can never exceed any other candidate correction.
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec3 c_other = oracle_arg + 0.1 * Vec3(u(rng), u(rng), u(rng));
    Mat3 X = embed_star(F);
    X.col(2) += 0.5 * c_other;
    X.row(2) += 0.5 * c_other.transpose();
    CHECK(q2_general(ctx, F) <= qf.q3(A.inverse() * X * A.inverse()) + 1e-12 * scale);
  }
}

TEST_CASE("anisotropic forms also match the minimization oracle") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int k = 0; k < 20; ++k) {
    // SPD 6x6 with a dominant diagonal keeps the form well conditioned.
    Mat6 B;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) B(i, j) = u(rng);
    Mat6 Q = B * B.transpose() + Mat6::Identity();
    QuadraticForm3 qf = QuadraticForm3::general(Q);
    Mat3 G = random_spd3(rng);
    Mat3 A = metric_sqrt(G);
    Mat2 F = random_sym2(rng);
    EffectiveDensityContext ctx = EffectiveDensityContext::from_prestrain(qf, A);
    double oracle = q2_direct_minimization(qf, A, F);
    CHECK(std::abs(q2_general(ctx, F) - oracle) < 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("reduced density is a positive quadratic in the symmetric part") {
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 30; ++k) {
    Mat3 G = random_spd3(rng);
    EffectiveDensityContext ctx =
        EffectiveDensityContext::from_metric(QuadraticForm3::isotropic(random_moduli(rng)), G);
    Mat2 F;
    F << u(rng), u(rng), u(rng), u(rng);
    Mat2 S = 0.5 * (F + F.transpose());
    Mat2 W = 0.5 * (F - F.transpose());

    double qF = q2_general(ctx, F);
    double qS = q2_general(ctx, S);
    CHECK(qF == doctest::Approx(qS).epsilon(1e-11));
    CHECK(std::abs(q2_general(ctx, W)) < 1e-12);
    if (S.norm() > 1e-8) CHECK(qS > 0.0);
  }
  // Zero argument gives exactly zero.
  EffectiveDensityContext ctx =
      EffectiveDensityContext::from_metric(QuadraticForm3::isotropic({1.0, 1.0}),
                                           Mat3::Identity());
  CHECK(q2_general(ctx, Mat2::Zero()) == doctest::Approx(0.0));
}

TEST_CASE("the three isotropic closed forms agree with the general reduction") {
  std::mt19937 rng(414);
  for (int k = 0; k < 50; ++k) {
    Mat3 G = random_spd3(rng);
    Mat2 F = random_sym2(rng);
    IsotropicModuli m = random_moduli(rng);
    IsoQ2Routes r = q2_isotropic_routes(m, G, F);
    EffectiveDensityContext ctx =
        EffectiveDensityContext::from_metric(QuadraticForm3::isotropic(m), G);
    double general = q2_general(ctx, F);
    double scale = std::max(1.0, std::abs(general));
    CHECK(std::abs(r.prestrain - general) < 1e-10 * scale);
    CHECK(std::abs(r.invariant - general) < 1e-10 * scale);
    CHECK(std::abs(r.sqrt_minor - general) < 1e-10 * scale);
    CHECK(q2_isotropic_closed(m, G, F) == doctest::Approx(general).epsilon(1e-10));
  }
}

TEST_CASE("the reduced density depends on the metric only through its minor") {
  // Shear and thickness entries of G must not change the isotropic value.
  std::mt19937 rng(88);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int k = 0; k < 20; ++k) {
    Mat3 G = random_spd3(rng);
    Mat3 H = G;
    H(0, 2) = H(2, 0) = u(rng);
    H(1, 2) = H(2, 1) = u(rng);
    H(2, 2) = G(2, 2) + 1.0;
    require_spd(H, "test input");
    Mat2 F = random_sym2(rng);
    IsotropicModuli m = random_moduli(rng);
    CHECK(q2_isotropic_closed(m, G, F) ==
          doctest::Approx(q2_isotropic_closed(m, H, F)).epsilon(1e-10));
  }
}

TEST_CASE("value-and-gradient evaluators are consistent with their values") {
  std::mt19937 rng(99);
  Mat3 G = random_spd3(rng);
  IsotropicModuli m{1.4, 0.9};
  EffectiveDensityContext ctx =
      EffectiveDensityContext::from_metric(QuadraticForm3::isotropic(m), G);
  Mat2 minor_inv = principal_minor(G).inverse();

  for (int k = 0; k < 10; ++k) {
    Mat2 F = random_sym2(rng);
    Q2Eval gen = q2_general_with_grad(ctx, F);
    CHECK(gen.value == doctest::Approx(q2_general(ctx, F)).epsilon(1e-11));

    Q2Eval fast = q2_iso_minor_with_grad(m, minor_inv, F);
    CHECK(fast.value == doctest::Approx(gen.value).epsilon(1e-10));

    // Both quadratic values differentiate exactly under central differences.
    double h = 1e-3;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Mat2 E = Mat2::Zero();
        // Keep the probe symmetric: the gradient is reported on symmetric inputs.
        E(a, b) += 0.5;
        E(b, a) += 0.5;
        double fd_gen =
            (q2_general(ctx, F + h * E) - q2_general(ctx, F - h * E)) / (2 * h);
        double pair_gen = (gen.grad.array() * E.array()).sum();
        CHECK(pair_gen == doctest::Approx(fd_gen).epsilon(1e-8));
        double fd_fast = (q2_iso_minor_with_grad(m, minor_inv, F + h * E).value -
                          q2_iso_minor_with_grad(m, minor_inv, F - h * E).value) /
                         (2 * h);
        double pair_fast = (fast.grad.array() * E.array()).sum();
        CHECK(pair_fast == doctest::Approx(fd_fast).epsilon(1e-8));
      }
  }
}
