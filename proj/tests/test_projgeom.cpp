#include <doctest.h>

#include <cmath>
#include <random>

#include "kkflows/projgeom.hpp"
#include "oracles.hpp"

using namespace kkflows;

namespace {

SeriesVec3 d(const SeriesVec3& x) { return {x[0].derivative(), x[1].derivative(), x[2].derivative()}; }

Series det3(const SeriesVec3& x, const SeriesVec3& y, const SeriesVec3& z) {
  return x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0]) +
         x[2] * (y[0] * z[1] - y[1] * z[0]);
}

// a - b'/2 from Wilczynski's semi-invariants of the unnormalized lift:
// G''' + 3 p1 G'' + 3 p2 G' + p3 G = 0, P2 = p2 - p1^2 - p1',
// P3 = p3 - 3 p1 p2 + 2 p1^3 - p1'', theta3 = P3 - 3/2 P2' = -(a - b'/2).
double wilczynski_radicand(const Curve& c, double t) {
  SeriesVec3 G = c.jet(t, 8), G1 = d(G), G2 = d(G1), G3 = d(G2);
  Series W = det3(G, G1, G2);
  Series c0 = det3(G3, G1, G2) / W, c1 = det3(G, G3, G2) / W, c2 = det3(G, G1, G3) / W;
  Series p1 = -c2 / 3.0, p2 = -c1 / 3.0, p3 = -c0;
  Series P2 = p2 - p1 * p1 - p1.derivative();
  Series P3 = p3 - 3.0 * p1 * p2 + 2.0 * p1 * p1 * p1 - p1.derivative().derivative();
  Series theta = P3 - 1.5 * P2.derivative();
  return -theta[0];
}

Mat3 random_unimodular(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (;;) {
    Mat3 M;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) = U(rng) + (i == j ? 1.5 : 0.0);
    double det = M.determinant();
    if (std::abs(det) < 0.2) continue;
    return M / std::cbrt(det);
  }
}

Mat3 normalize_conic(Mat3 C) {
  C /= C.norm();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(C(i, j)) > 1e-12) return C(i, j) < 0 ? Mat3(-C) : C;
  return C;
}

// Roots of the exp-cos curve from a symbolic computation (sympy + mpmath).
const double kRoot2 = 1.2729688880227989, kRoot3 = 2.2905128866541089;

}  // namespace

TEST_CASE("normalized lift") {
  auto conic = builtin_curve("conic");
  for (double t : {-1.0, 0.0, 2.5}) {
    auto L = normalized_lift(conic, t);
    CHECK(L.det_G == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((L.gamma[0] - conic(t)).norm() < 1e-14);
    CHECK(L.gamma[3].norm() < 1e-14);
  }
  auto c = builtin_curve("exp-cos");
  for (double t : {0.1, 0.785, 2.0, 4.4}) {
    auto L = normalized_lift(c, t);
    CHECK(std::abs(L.gamma[0].dot(L.gamma[1].cross(L.gamma[2])) - 1.0) < 1e-9);
  }
  // Any other lift of the same curve gives the same Gamma.
  auto scaled = c.rescaled([](const Series& t) { return 2.0 + 0.5 * sin(t); });
  auto constant = c.rescaled([](const Series& t) { return Series(t.order(), 7.0); });
  for (double t : {0.3, 1.9}) {
    auto a = normalized_lift(c, t), b = normalized_lift(scaled, t), e = normalized_lift(constant, t);
    for (int k = 0; k < 4; ++k) {
      CHECK((a.gamma[k] - b.gamma[k]).norm() < 1e-12);
      CHECK((a.gamma[k] - e.gamma[k]).norm() < 1e-12);
    }
  }
  auto cubic = builtin_curve("cubic");
  CHECK_THROWS_AS(normalized_lift(cubic, 0.0), InflectionPoint);
  try {
    normalized_lift(cubic, 0.0);
  } catch (const InflectionPoint& e) {
    CHECK(e.where() == 0.0);
  }
}

TEST_CASE("a and b coefficients") {
  auto conic = builtin_curve("conic");
  auto ab = ab_coefficients(conic, 0.7);
  CHECK(std::abs(ab.a) < 1e-14);
  CHECK(std::abs(ab.b) < 1e-14);

  auto c = builtin_curve("exp-cos");
  ab = ab_coefficients(c, M_PI / 4);
  CHECK(std::isfinite(ab.a));
  CHECK(std::isfinite(ab.b));
  CHECK(std::abs(ab.c) <= 1e-8);
  CHECK(ab.residual <= 1e-8);

  auto cubic = builtin_curve("cubic");
  for (double t : {0.5, 1.0, 2.0}) {
    auto r = ab_coefficients(cubic, t);
    CHECK(r.residual <= 1e-8);
    CHECK(std::abs(r.c) <= 1e-8);
  }
  // Differences of Gamma'' reproduce Gamma''' = a Gamma + b Gamma'.
  auto L = normalized_lift(c, 1.3);
  for (int i = 0; i < 3; ++i) {
    double fd = oracle::derivative([&](double t) { return normalized_lift(c, t).gamma[2][i]; }, 1.3, 1);
    CHECK(std::abs(fd - L.gamma[3][i]) < 1e-8);
  }
}

TEST_CASE("speed radicand against the semi-invariant route") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  auto c = builtin_curve("exp-cos");
  for (int i = 0; i < 50; ++i) {
    double t = U(rng);
    CHECK(std::abs(sextatic_function(c, t) - wilczynski_radicand(c, t)) < 1e-12);
  }
  auto cubic = builtin_curve("cubic");
  for (double t : {0.5, 1.5}) CHECK(std::abs(sextatic_function(cubic, t) - wilczynski_radicand(cubic, t)) < 1e-10);

  auto s = speed_and_arc(c, M_PI / 4);
  CHECK(s.v > 0);
  CHECK(s.v * s.v * s.v == doctest::Approx(s.radicand).epsilon(1e-14));
  // Signed cube root on the other side of a sextatic point.
  auto n = speed_and_arc(c, 1.5);
  CHECK(n.radicand < 0);
  CHECK(n.v == doctest::Approx(-std::cbrt(-n.radicand)));
  CHECK_THROWS_AS(speed_and_arc(c, 0.0, true), SextaticPoint);
  CHECK_NOTHROW(speed_and_arc(c, 0.0, false));

  auto conic = builtin_curve("conic");
  for (double t : {-2.0, 0.0, 1.0}) CHECK(sextatic_function(conic, t) == 0.0);
}

TEST_CASE("sextatic points of the exp-cos curve") {
  auto c = builtin_curve("exp-cos");
  auto scan = find_sextatic(c, 0.0, 2 * M_PI);
  REQUIRE(scan.roots.size() == 6);
  CHECK_FALSE(scan.degenerate);
  const auto& r = scan.roots;
  CHECK(std::abs(r[0]) < 1e-12);
  CHECK(std::abs(r[3] - M_PI) < 1e-12);
  CHECK(std::abs(r[1] - kRoot2) < 1e-10);
  CHECK(std::abs(r[2] - kRoot3) < 1e-10);
  // Reflection t -> -t.
  CHECK(std::abs(r[4] - (2 * M_PI - r[2])) < 1e-8);
  CHECK(std::abs(r[5] - (2 * M_PI - r[1])) < 1e-8);
  for (double t : r) CHECK(std::abs(sextatic_function(c, t)) <= 1e-12 * scan.max_abs);
  // Same roots on a shifted window and from the semi-invariant radicand.
  auto shifted = find_sextatic(c, -0.5, 2 * M_PI - 0.5, 500);
  REQUIRE(shifted.roots.size() == 6);
  CHECK(std::abs(shifted.roots[1] - r[1]) < 1e-10);
  CHECK(std::abs(wilczynski_radicand(c, r[1])) < 1e-12);

  auto conic = find_sextatic(builtin_curve("conic"), -1.0, 1.0, 50);
  CHECK(conic.degenerate);
  CHECK(conic.roots.empty());
  CHECK_THROWS_AS(find_sextatic(c, 1.0, 0.0), InvalidInput);
}

TEST_CASE("projective curvature") {
  auto c = builtin_curve("exp-cos");
  double k0 = curvature(c, M_PI / 4);
  CHECK(std::isfinite(k0));
  // Blows up at the sextatic points.
  double near1 = std::abs(curvature(c, kRoot2 + 1e-3)), near2 = std::abs(curvature(c, kRoot2 + 1e-5));
  CHECK(near2 > 10 * near1);
  CHECK(near2 > 1e4);
  CHECK_THROWS_AS(curvature(c, 0.0), SextaticPoint);

  // Formula check: k from the Schwarzian of s(t) = int v, with v from the radicand.
  double t = 0.6;
  auto v = [&](double x) { return std::cbrt(sextatic_function(c, x)); };
  double v0 = v(t), v1 = oracle::derivative(v, t, 1, 0.02), v2 = oracle::derivative(v, t, 2, 0.05);
  double S = v2 / v0 - 1.5 * (v1 / v0) * (v1 / v0);
  double kfd = -(S + 0.5 * ab_coefficients(c, t).b) / (v0 * v0);
  CHECK(std::abs(curvature(c, t) - kfd) < 1e-6 * std::max(1.0, std::abs(kfd)));
}

TEST_CASE("invariance under the projective group") {
  std::mt19937 rng(37);
  auto c = builtin_curve("exp-cos");
  const double ts[] = {0.4, M_PI / 4, 1.8, 3.6};
  double ks[4], vs[4], as[4], bs[4];
  Mat3 Fs[4], Cs[4];
  for (int i = 0; i < 4; ++i) {
    ks[i] = curvature(c, ts[i]);
    auto s = speed_and_arc(c, ts[i]);
    vs[i] = s.v;
    auto ab = ab_coefficients(c, ts[i]);
    as[i] = ab.a;
    bs[i] = ab.b;
    Fs[i] = canonical_frame(c, ts[i]);
    Cs[i] = osculating_conic(c, ts[i]);
  }
  double worst_scalar = 0, worst_frame = 0, worst_conic = 0;
  for (int n = 0; n < 100; ++n) {
    Mat3 A = random_unimodular(rng);
    Curve g = c.transformed(A);
    Mat3 Ainv = A.inverse();
    for (int i = 0; i < 4; ++i) {
      auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
      worst_scalar = std::max({worst_scalar, rel(curvature(g, ts[i]), ks[i]), rel(speed_and_arc(g, ts[i]).v, vs[i])});
      auto ab = ab_coefficients(g, ts[i]);
      worst_scalar = std::max({worst_scalar, rel(ab.a, as[i]), rel(ab.b, bs[i])});
      worst_frame = std::max(worst_frame, (canonical_frame(g, ts[i]) - A * Fs[i]).norm() / (A * Fs[i]).norm());
      Mat3 expected = normalize_conic(Ainv.transpose() * Cs[i] * Ainv);
      worst_conic = std::max(worst_conic, (osculating_conic(g, ts[i]) - expected).norm());
    }
  }
  CHECK(worst_scalar < 1e-8);
  CHECK(worst_frame < 1e-10);
  CHECK(worst_conic < 1e-10);
}

TEST_CASE("reparameterization invariance") {
  auto c = builtin_curve("exp-cos");
  auto phi = [](const Series& t) { return t + 0.3 * sin(t); };
  auto g = c.reparameterized(phi);
  for (double tau : {0.5, 1.0, 2.7, 4.0}) {
    double t = tau + 0.3 * std::sin(tau);
    CHECK(std::abs(curvature(g, tau) - curvature(c, t)) < 1e-6);
    // Frames agree as well; the speed picks up the Jacobian.
    CHECK((canonical_frame(g, tau) - canonical_frame(c, t)).norm() < 1e-9);
    CHECK(speed_and_arc(g, tau).v == doctest::Approx(speed_and_arc(c, t).v * (1 + 0.3 * std::cos(tau))));
  }
}

TEST_CASE("canonical frame") {
  auto c = builtin_curve("exp-cos");
  for (double t : {0.3, M_PI / 4, 2.6, 4.9}) {
    Mat3 F = canonical_frame(c, t);
    CHECK(std::abs(F.determinant() - 1.0) < 1e-8);
    Mat3 dF;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        dF(i, j) = oracle::derivative([&](double x) { return canonical_frame(c, x)(i, j); }, t, 1, 0.01);
    Mat3 rhs = F * frenet_matrix(curvature(c, t)) * speed_and_arc(c, t).v;
    CHECK((dF - rhs).norm() / rhs.norm() < 1e-6);
  }
  CHECK_THROWS_AS(canonical_frame(c, M_PI), SextaticPoint);
}

TEST_CASE("osculating conic") {
  auto c = builtin_curve("exp-cos");
  for (double t : {M_PI / 4, 2.0}) {
    Mat3 C = osculating_conic(c, t);
    CHECK(C.norm() == doctest::Approx(1.0));
    CHECK((C - C.transpose()).norm() < 1e-15);
    auto J = projective_jets(c, t, 10);
    Series q(J.gamma[0].order(), 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q = q + C(i, j) * (J.gamma[i] * J.gamma[j]);
    double scale = 0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(J.gamma[i][0]) * std::abs(J.gamma[i][0]));
    for (int k = 0; k <= 4; ++k) CHECK(std::abs(q.derivative_at(k)) <= 1e-7 * scale);
    // Contact is exactly fourth order away from sextatic points.
    CHECK(std::abs(q.derivative_at(5)) > 1e-4 * scale);
  }
  // A conic is its own osculating conic.
  auto conic = builtin_curve("conic");
  Mat3 C = osculating_conic(conic, 0.3);
  for (double t : {-2.0, 0.0, 1.0, 3.0}) {
    Vec3 x = conic(t);
    CHECK(std::abs(x.dot(C * x)) < 1e-12 * x.squaredNorm());
  }
  CHECK((osculating_conic(conic, 1.7) - C).norm() < 1e-12);
  // The osculating curve is stationary at the sextatic points.
  auto speed = [&](double t) {
    Mat3 dC;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        dC(i, j) = oracle::derivative([&](double x) { return osculating_conic(c, x)(i, j); }, t, 1, 0.01);
    return dC.norm();
  };
  CHECK(speed(kRoot2) < 1e-7);
  CHECK(speed(M_PI) < 1e-7);
  CHECK(speed(M_PI / 4) > 1e-3);
  CHECK(speed(kRoot2 - 0.05) > speed(kRoot2));
  CHECK(speed(kRoot2 + 0.05) > speed(kRoot2));
}

TEST_CASE("finite-difference mode") {
  auto c = builtin_curve("exp-cos");
  auto f = Curve::finite_difference([](double t) { return Vec3(std::cos(t), std::sin(t), std::exp(-std::cos(t) / 4)); });
  CHECK(f.mode() == Curve::Mode::RichardsonFD);
  for (double t : {0.5, M_PI / 4, 2.8}) {
    CHECK(std::abs(speed_and_arc(f, t).v - speed_and_arc(c, t).v) < 1e-7);
    CHECK(std::abs(curvature(f, t) - curvature(c, t)) < 1e-3 * std::max(1.0, std::abs(curvature(c, t))));
    CHECK((canonical_frame(f, t) - canonical_frame(c, t)).norm() < 1e-5);
  }
  auto scan = find_sextatic(f, -0.1, 2 * M_PI - 0.1, 360);
  REQUIRE(scan.roots.size() == 6);
  CHECK(std::abs(scan.roots[0]) < 1e-6);
  CHECK(std::abs(scan.roots[1] - kRoot2) < 1e-6);
  CHECK_THROWS_AS(Curve::finite_difference([](double) { return Vec3::Ones().eval(); }, -1.0), InvalidInput);
}

TEST_CASE("arc length and full analysis") {
  auto c = builtin_curve("exp-cos");
  double L = arc_length(c, 0.3, 1.1);
  double ref = oracle::integrate_real([&](double t) { return speed_and_arc(c, t).v; }, 0.3, 1.1, 1e-13);
  CHECK(std::abs(L - ref) < 1e-10);
  CHECK(std::abs(arc_length(c, 0.3, 0.7) + arc_length(c, 0.7, 1.1) - L) < 1e-12);
  auto d = analyze(c, M_PI / 4, 0.3);
  CHECK(d.v == doctest::Approx(speed_and_arc(c, M_PI / 4).v));
  CHECK(d.k == doctest::Approx(curvature(c, M_PI / 4)));
  CHECK(d.sigma == doctest::Approx(arc_length(c, 0.3, M_PI / 4)));
  CHECK(std::abs(d.frame.determinant() - 1) < 1e-8);
  CHECK_THROWS_AS(builtin_curve("spiral"), InvalidInput);
}
