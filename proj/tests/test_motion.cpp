#include <doctest.h>

#include <cmath>
#include <random>

#include "kkflows/motion.hpp"
#include "oracles.hpp"

using namespace kkflows;
using cplx = std::complex<double>;

namespace {

CurvatureProfile cn_profile(double m) {
  ProfileParams p;
  p.m = m;
  return make_profile(Family::CnA, p);
}

CurvatureProfile constant_profile(double c) {
  ProfileParams p;
  p.value = c;
  return make_profile(Family::Constant, p);
}

double max_abs(const Mat3& M) { return M.cwiseAbs().maxCoeff(); }

// Random polynomial jets: derivatives of a random degree-12 polynomial at 0.
std::vector<double> random_jet(std::mt19937& rng, int order) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> j(static_cast<std::size_t>(order) + 1);
  for (auto& x : j) x = U(rng);
  return j;
}

}  // namespace

TEST_CASE("Frenet integration of constant curvature") {
  for (double c : {0.0, 0.7, -1.3}) {
    auto F = integrate_frenet(constant_profile(c), constant_function(1.0), 0.0, 3.0, 6);
    for (std::size_t i = 0; i < F.grid().size(); ++i) {
      Mat3 exact = matrix_exp(F.grid()[i] * frenet_matrix(c));
      CHECK(max_abs(F.frames()[i] - exact) < 1e-9 * std::max(1.0, max_abs(exact)));
    }
  }
  // A constant speed rescales the parameter.
  auto k = cn_profile(0.4);
  auto F2 = integrate_frenet(k, constant_function(2.0), std::vector<double>{0.0, 0.8}, 0.0);
  Mat3 P = propagate_frenet(k, constant_function(1.0), Mat3::Identity(), 0.0, 1.6);
  CHECK(max_abs(F2.frames()[1] - P) > 1e-3);
  auto Ftime = integrate_frenet(constant_profile(0.5), constant_function(2.0), std::vector<double>{0.0, 0.8}, 0.0);
  CHECK(max_abs(Ftime.frames()[1] - matrix_exp(1.6 * frenet_matrix(0.5))) < 1e-9);
}

TEST_CASE("Frenet integration of the soliton stays unimodular") {
  ProfileParams p;
  p.m = 0.8;
  auto k = make_profile(Family::Soliton, p);
  auto F = integrate_frenet(k, constant_function(1.0), -20.0, 20.0, 400);
  CHECK(F.stats().accepted > 100);
  // |F| grows like exp(s + 20), so det F is checked against its own rounding level.
  double worst_rel = 0, worst_small = 0;
  for (const auto& M : F.frames()) {
    double n = M.norm(), d = std::abs(M.determinant() - 1.0);
    worst_rel = std::max(worst_rel, d / std::max(1.0, n * n * n));
    if (n * n * n < 1e5) worst_small = std::max(worst_small, d);
  }
  CHECK(worst_rel < 1e-12);
  CHECK(worst_small < 1e-8);
  // The spherical lift is stable under a tighter tolerance.
  FrenetOptions tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  auto G = integrate_frenet(k, constant_function(1.0), -20.0, 20.0, 400, tight);
  double worst_dir = 0;
  for (std::size_t i = 0; i < F.grid().size(); ++i) worst_dir = std::max(worst_dir, (F.curve(i) - G.curve(i)).norm());
  CHECK(worst_dir < 1e-8);
  CHECK(F.curve(17).norm() == doctest::Approx(1.0));
}

TEST_CASE("frame fields around an interior anchor") {
  auto k = cn_profile(0.5);
  std::vector<double> grid{-2.0, -1.0, 0.5, 1.0, 3.0};
  auto F = integrate_frenet(k, constant_function(1.0), grid, 0.5);
  CHECK(max_abs(F.frames()[2] - Mat3::Identity()) == 0.0);
  Mat3 direct = propagate_frenet(k, constant_function(1.0), Mat3::Identity(), 0.5, -2.0);
  CHECK(max_abs(F.frames()[0] - direct) < 1e-10);
  CHECK(max_abs(F.frame_at(2.0) - propagate_frenet(k, constant_function(1.0), Mat3::Identity(), 0.5, 2.0)) < 1e-8);
  CHECK_THROWS_AS(integrate_frenet(k, constant_function(1.0), std::vector<double>{}, 0.0), InvalidInput);
}

TEST_CASE("Taylor jets of the frame") {
  auto k = cn_profile(0.6);
  auto F = integrate_frenet(k, constant_function(1.0), 0.0, 4.0, 8);
  double s = 1.7;
  SeriesMat3 J = F.frame_jet(s, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto f = [&](double x) { return F.frame_at(x)(i, j); };
      CHECK(std::abs(J[i][j].derivative_at(1) - oracle::derivative(f, s, 1, 0.05)) < 1e-7);
      CHECK(std::abs(J[i][j].derivative_at(2) - oracle::derivative(f, s, 2, 0.05)) < 1e-6);
    }
  Mat3 d1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d1(i, j) = J[i][j].derivative_at(1);
  CHECK(max_abs(d1 - F.frame_at(s) * frenet_matrix(k.value(s))) < 1e-12);
}

TEST_CASE("Frenet round trip through projective curvature") {
  auto k = cn_profile(0.5);
  auto F = integrate_frenet(k, constant_function(1.0), 0.0, 4.0, 40);
  Curve c = F.as_curve();
  double worst = 0;
  for (int i = 0; i <= 80; ++i) {
    double s = 4.0 * i / 80;
    worst = std::max(worst, std::abs(curvature(c, s) - k.value(s)));
    CHECK(speed_and_arc(c, s).v == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(worst <= 1e-5);
  MESSAGE("round-trip sup error " << worst);
}

TEST_CASE("Phi-tilde basic structure") {
  std::mt19937 rng(5);
  auto kj = random_jet(rng, 6);
  std::vector<double> zero(8, 0.0);
  auto P0 = phi_tilde(kj, zero, 0.0);
  CHECK(max_abs(P0.phi) == 0.0);
  auto Pl = phi_tilde(kj, zero, 0.0, 0.7);
  CHECK(max_abs(Pl.phi + 0.7 * frenet_matrix(kj[0])) < 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    auto k = random_jet(rng, 6), y = random_jet(rng, 8);
    double I = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto P = phi_tilde(k, y, I);
    CHECK(std::abs(P.phi.trace()) < 1e-14);
    CHECK(P.upsilon() == y[0]);
  }
  CHECK_THROWS_AS(phi_tilde(std::vector<double>(4), std::vector<double>(7), 0.0), MissingJetOrder);
}

TEST_CASE("zero-curvature relations hold identically in the jets") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    Series k = Series::from_derivatives(random_jet(rng, 7));
    Series y = Series::from_derivatives(random_jet(rng, 9));
    double I0 = std::uniform_real_distribution<double>(-1, 1)(rng);
    Series dI = k.truncated(2) * y.derivative().derivative().derivative().truncated(2) +
                4.0 * k.truncated(2) * k.truncated(2) * y.derivative().truncated(2);
    Series I = dI.integral(I0);
    SeriesMat3 P = phi_tilde_series(k, y, I);
    auto v = [&](int i, int j) { return P[i][j][0]; };
    auto d = [&](int i, int j) { return P[i][j].derivative_at(1); };
    double K = k[0];
    double tol = 1e-11;
    CHECK(std::abs(d(0, 0) - K * v(1, 0) + v(2, 0) - v(0, 1)) < tol);
    CHECK(std::abs(d(0, 2) - 2 * v(0, 0) - v(1, 1) + K * (v(0, 1) - v(1, 2))) < tol);
    CHECK(std::abs(d(1, 0) + v(0, 0) - K * v(2, 0) - v(1, 1)) < tol);
    CHECK(std::abs(d(1, 1) + v(0, 1) + K * (v(1, 0) - v(2, 1)) - v(1, 2)) < tol);
    CHECK(std::abs(d(2, 0) + v(1, 0) - v(2, 1)) < tol);
    CHECK(std::abs(d(2, 1) + v(0, 0) + K * v(2, 0) + 2 * v(1, 1)) < tol);
    CHECK(std::abs(d(0, 1) - d(1, 2) - 3 * K * v(1, 1) + v(2, 1) + v(1, 0) - 2 * v(0, 2)) < tol);
    // The remaining entry gives the curvature evolution: kappa_t = -Theta.
    double kt = -(d(1, 2) - v(1, 0) + K * (v(0, 0) + 2 * v(1, 1)) + v(0, 2));
    CHECK(std::abs(kt + theta(k.derivatives(), y.derivatives(), I0)) < 1e-10);
  }
}

TEST_CASE("Theta with constant velocity is the fifth-order operator") {
  auto k = cn_profile(0.3);
  std::vector<double> nine(8, 0.0);
  nine[0] = 9.0;
  for (double s : {0.1, 0.9, 2.3}) {
    CHECK(theta(k.jet(s, 5), nine, 0.0) == doctest::Approx(k1_operator(k, s)).epsilon(1e-13));
    CHECK(theta(k.jet(s, 5), std::vector<double>(8, 0.0), 0.0) == 0.0);
  }
  CHECK_THROWS_AS(theta(std::vector<double>(5), nine, 0.0), MissingJetOrder);
}

TEST_CASE("zero-curvature residual of exact motions") {
  auto k = cn_profile(0.5);
  double vA = k.velocity();
  auto nine = [](double, double, int order) {
    std::vector<double> y(static_cast<std::size_t>(order) + 1, 0.0);
    y[0] = 9.0;
    return y;
  };
  auto zero = [](double, double, int order) { return std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0); };
  std::vector<double> S{0.0, 0.4, 1.1, 1.9, 2.6}, T{0.0, 0.3, 0.7};
  for (double lambda : {0.0, -1.0, 0.5, 2.0}) {
    double speed = vA - lambda;
    SpaceTimeJet kappa = [&](double s, double t, int order) { return k.jet(s + speed * t, order); };
    double r = zero_curvature_residual(kappa, nine, lambda, S, T);
    CHECK(r <= 1e-5);
    if (lambda != 0.0) {
      // The same motion with the wrong internal parameter.
      CHECK(zero_curvature_residual(kappa, nine, 0.0, S, T) > 1e-2);
    }
  }
  // Pure reparameterization.
  for (double lambda : {0.0, 0.8, -1.5}) {
    SpaceTimeJet kappa = [&](double s, double t, int order) { return k.jet(s - lambda * t, order); };
    CHECK(zero_curvature_residual(kappa, zero, lambda, S, T) <= 1e-6);
  }
  // Negative control.
  SpaceTimeJet bogus = [](double s, double t, int order) {
    std::vector<double> j(static_cast<std::size_t>(order) + 1);
    for (int i = 0; i <= order; ++i) j[i] = std::cos(t) * std::sin(s + i * M_PI / 2) + (i == 0 ? 0.3 * t : 0.0);
    return j;
  };
  CHECK(zero_curvature_residual(bogus, nine, 0.0, S, T) > 0.1);
}

TEST_CASE("zero-curvature residual with a nonconstant normal velocity") {
  // upsilon = kappa; kappa(s, t) = k(s) - t Theta(k, k)(s) has the right time
  // derivative at t = 0.
  auto k = cn_profile(0.4);
  SpaceTimeJet ups = [&](double s, double, int order) { return k.jet(s, order); };
  SpaceTimeJet kap0 = [&](double s, double, int order) { return k.jet(s, order); };
  auto I = [&](double s) { return integral_term(kap0, ups, s, 0.0); };
  SpaceTimeJet kappa = [&](double s, double t, int order) {
    auto j = k.jet(s, order);
    if (t != 0.0) j[0] -= t * theta(k.jet(s, 5), k.jet(s, 7), I(s));
    return j;
  };
  std::vector<double> S{0.2, 0.9, 1.7}, T{0.0};
  CHECK(zero_curvature_residual(kappa, ups, 0.0, S, T, 1e-3) <= 1e-6);
  SpaceTimeJet wrong = [&](double s, double t, int order) {
    auto j = k.jet(s, order);
    if (t != 0.0) j[0] += t * theta(k.jet(s, 5), k.jet(s, 7), I(s));
    return j;
  };
  CHECK(zero_curvature_residual(wrong, ups, 0.0, S, T, 1e-3) > 1e-2);
}

TEST_CASE("Hamiltonian of the cnoidal congruence curves") {
  for (double m : {0.3, 0.5, 0.7}) {
    CnoidalCongruence cc(m);
    auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
    CHECK(max_abs(data.xi - cc.xi()) < 1e-12);
    std::mt19937 rng(static_cast<unsigned>(m * 100));
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    for (int i = 0; i < 20; ++i) {
      double s = U(rng);
      Mat3 H = data.H(s);
      CHECK(max_abs(H - cc.H(s)) < 1e-12);
      CHECK(std::abs(H.trace()) < 1e-13);
    }
    // H + (lambda + v) K equals phi_tilde with upsilon = 9.
    std::vector<double> nine(7, 0.0);
    nine[0] = 9.0;
    double s = 0.77;
    auto P = phi_tilde(cc.curvature().jet(s, 4), nine, 0.0);
    CHECK(max_abs(P.phi - (cc.H(s) + cc.v() * frenet_matrix(cc.curvature().value(s)))) < 1e-12);
  }
  CnoidalCongruence cc(0.5);
  CHECK_THROWS_AS(hamiltonian(cc.curvature(), DiffPoly(9L), cc.v() + 0.1), NotCongruence);
  CHECK_THROWS_AS(hamiltonian(cc.curvature(), DiffPoly::u(1), cc.v()), NotInP);
  // The same curve is a congruence curve for any split of lambda + v.
  CHECK_NOTHROW(hamiltonian(cc.curvature(), DiffPoly(9L), cc.v() - 0.4, 0.4));
}

TEST_CASE("Lax equation, conservation law and spectrum") {
  for (double m : {0.3, 0.5, 0.7}) {
    CnoidalCongruence cc(m);
    auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
    double K2 = 2 * complete_K(m);
    auto F = integrate_frenet(cc.curvature(), constant_function(1.0), 0.0, K2, 50);
    std::vector<double> samples;
    for (int i = 0; i < 50; ++i) samples.push_back(-3.0 + 9.0 * i / 49);
    auto res = lax_residual(data, samples, &F);
    CHECK(res.lax <= 1e-7);
    CHECK(res.conservation <= 1e-7);
    auto taus = eigen3(data.xi);
    for (double s : samples) {
      auto t = eigen3(data.H(s));
      for (int j = 0; j < 3; ++j) CHECK(std::abs(t[j] - taus[j]) < 1e-8);
    }
    // Perturbing the velocity breaks the Lax equation.
    CongruenceData bad{Hamiltonian(cc.curvature(), DiffPoly(9L), cc.v() + 0.01), data.xi};
    CHECK(lax_residual(bad, samples).lax >= 1e-3);
  }
}

TEST_CASE("eigenvalues of trace-free matrices") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    Mat3 A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = U(rng);
    A -= A.trace() / 3.0 * Mat3::Identity();
    auto t = eigen3(A);
    CHECK(std::abs(t[0] + t[1] + t[2]) < 1e-12);
    Eigen::EigenSolver<Mat3> es(A);
    for (int j = 0; j < 3; ++j) {
      double best = 1e300;
      for (int i = 0; i < 3; ++i) best = std::min(best, std::abs(es.eigenvalues()[i] - t[j]));
      CHECK(best < 1e-10);
    }
  }
  Mat3 D = Mat3::Zero();
  D.diagonal() << 1.0, 1.0, -2.0;
  CHECK_THROWS_AS(eigen3(D), RepeatedEigenvalue);
  D.diagonal() << -1.0, 3.0, -2.0;
  auto t = eigen3(D);
  CHECK(t[0] == cplx(-2.0));
  CHECK(t[1] == cplx(-1.0));
  CHECK(t[2] == cplx(3.0));
}

TEST_CASE("eigenvalues of the cnoidal momentum") {
  CnoidalCongruence c3(0.3);
  CHECK(c3.delta() == doctest::Approx(-28.7239).epsilon(1e-6));
  for (double m : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CnoidalCongruence cc(m);
    CHECK(cc.delta() < 0);
    auto t = cc.taus();
    CHECK(t[0].imag() == 0.0);
    CHECK(t[1] == std::conj(t[2]));
    CHECK(std::abs(t[0] + t[1] + t[2]) < 1e-12);
    auto cf = cc.closed_form_taus();
    CHECK(std::abs(cf[1].imag()) < 1e-12);
    CHECK(std::abs(cf[1] - t[0]) < 1e-8);
    CHECK(std::abs(cf[0] - t[1]) < 1e-8);
    CHECK(std::abs(cf[2] - t[2]) < 1e-8);
    for (const auto& tau : t) CHECK(std::abs((cc.xi() - tau * Mat3::Identity()).cast<cplx>().determinant()) < 1e-9);
  }
  CHECK_THROWS_AS(CnoidalCongruence(1.0), DomainError);
}

TEST_CASE("integration by quadratures") {
  for (double m : {0.3, 0.5, 0.7}) {
    CnoidalCongruence cc(m);
    auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
    double K2 = 2 * complete_K(m);
    auto Q = quadrature_integrate(data, [&] {
      std::vector<double> g;
      for (int i = 0; i <= 40; ++i) g.push_back(K2 * i / 40);
      return g;
    }());
    auto F = integrate_frenet(cc.curvature(), constant_function(1.0), Q.grid, 0.0);
    double worst = 0, eig = 0, dir = 0;
    std::array<CVec3, 3> sigma0;
    for (int j = 0; j < 3; ++j) sigma0[j] = Q.S[0].col(j).normalized();
    for (std::size_t i = 0; i < Q.grid.size(); ++i) {
      worst = std::max(worst, max_abs(Q.frames[i] - F.frames()[i]));
      CMat3 Sigma = F.frames()[i].cast<cplx>() * Q.S[i];
      for (int j = 0; j < 3; ++j) {
        CVec3 col = Sigma.col(j);
        eig = std::max(eig, (data.xi.cast<cplx>() * col - Q.taus[j] * col).norm() / col.norm());
        // |u ^ w| for unit complex vectors: 1 - |<u, w>|^2.
        CVec3 u = col.normalized();
        dir = std::max(dir, std::sqrt(std::max(0.0, 1.0 - std::norm(u.dot(sigma0[j])))));
      }
    }
    CHECK(worst <= 1e-6);
    CHECK(eig <= 1e-7);
    CHECK(dir <= 1e-7);
    CHECK(Q.max_imag < 1e-8);
    CHECK(Q.max_nonproportional < 1e-8);
    CHECK(max_abs(Q.frames[0] - Mat3::Identity()) < 1e-13);
    MESSAGE("m = " << m << ": frame " << worst << ", eigenvector " << eig << ", direction " << dir);
  }
}

TEST_CASE("closed forms of the cnoidal example") {
  for (double m : {0.3, 0.5, 0.7}) {
    CnoidalCongruence cc(m);
    const auto& taus = cc.taus();
    for (double s : {0.0, 0.45, 1.3, 2.2}) {
      Mat3 H = cc.H(s);
      for (int j = 0; j < 3; ++j) {
        CMat3 A = H.cast<cplx>() - taus[j] * CMat3::Identity();
        CVec3 a = A.row(1).transpose(), b = A.row(2).transpose();
        CVec3 cross(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
        CHECK((cross - cc.S(j, s)).norm() < 1e-10 * cross.norm());
        // S' + K S = r S with S' by differences.
        CVec3 dS = (cc.S(j, s - 2e-3) - 8.0 * cc.S(j, s - 1e-3) + 8.0 * cc.S(j, s + 1e-3) - cc.S(j, s + 2e-3)) / 12e-3;
        CVec3 W = dS + frenet_matrix(cc.curvature().value(s)).cast<cplx>() * cc.S(j, s);
        CHECK((W - cc.r(j, s) * cc.S(j, s)).norm() < 1e-7 * W.norm());
      }
      CMat3 S;
      for (int j = 0; j < 3; ++j) S.col(j) = cc.S(j, s);
      CHECK((S.inverse().col(0) - cc.inverse_S_first_column()).norm() < 1e-10 * cc.inverse_S_first_column().norm());
    }
    // d/ds log rho = r for the complex pair, where no pole lies on the path.
    for (int j : {1, 2}) {
      for (double s : {0.3, 1.1}) {
        cplx dl = (std::log(cc.rho(j, s + 1e-4)) - std::log(cc.rho(j, s - 1e-4))) / 2e-4;
        CHECK(std::abs(dl - cc.r(j, s)) < 1e-6 * std::abs(cc.r(j, s)));
      }
    }
    // M~ = S(0) diag(1/rho(0)).
    CMat3 M = cc.M_tilde();
    for (int j = 0; j < 3; ++j) {
      if (std::abs(cc.rho(j, 0.0)) == 0.0) continue;
      CHECK((M.col(j) - cc.S(j, 0.0) / cc.rho(j, 0.0)).norm() < 1e-10 * M.col(j).norm());
    }
  }
}

TEST_CASE("closed-form congruence curve against the integrated frame") {
  for (double m : {0.3, 0.5, 0.7}) {
    CnoidalCongruence cc(m);
    double K2 = 2 * complete_K(m);
    auto F = integrate_frenet(cc.curvature(), constant_function(1.0), 0.0, K2, 20);
    int compared = 0;
    for (std::size_t i = 0; i < F.grid().size(); ++i) {
      CVec3 x;
      try {
        x = cc.curve(F.grid()[i]);
      } catch (const PoleOnPath&) {
        continue;
      }
      ++compared;
      Vec3 ref = F.frames()[i].col(0);
      CHECK(x.imag().norm() < 1e-8 * x.norm());
      CHECK((x.real() - ref).norm() < 1e-6 * ref.norm());
    }
    CHECK(compared > 0);
    MESSAGE("m = " << m << ": compared " << compared << " of " << F.grid().size() << " samples");
  }
}

TEST_CASE("motion of a congruence curve") {
  CnoidalCongruence cc(0.5);
  auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
  for (double t : {0.0, 0.3, 1.0, -0.7}) {
    Mat3 E = matrix_exp(t * data.xi);
    double n = E.norm();
    CHECK(std::abs(E.determinant() - 1.0) < 1e-10 * std::max(1.0, n * n * n));
    Eigen::EigenSolver<Mat3> es(t * data.xi);
    CMat3 V = es.eigenvectors();
    CMat3 D = es.eigenvalues().array().exp().matrix().asDiagonal();
    CHECK(max_abs((V * D * V.inverse()).real() - E) < 1e-10 * std::max(1.0, max_abs(E)));
  }
  std::vector<double> grid;
  for (int i = 0; i <= 70; ++i) grid.push_back(-2.0 + 0.1 * i);
  auto Fz = integrate_frenet(cc.curvature(), constant_function(1.0), grid, 0.0);
  std::vector<double> S, T;
  for (int i = 0; i < 50; ++i) S.push_back(4.0 * i / 49);
  for (int i = 0; i < 20; ++i) T.push_back(1.0 * i / 19);
  auto x = [&](double s) -> Vec3 { return Fz.frame_at(s).col(0); };
  auto g = motion_evolve(data.xi, cc.v(), x, S, T);
  REQUIRE(g.size() == T.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    Vec3 x0 = x(S[i]);
    CHECK((g[0][i] - x0 / x0.norm()).norm() < 1e-15);
  }
  auto res = motion_structure_residual(data, Fz, S, T);
  CHECK(res.ds <= 1e-5);
  CHECK(res.dt <= 1e-5);
  MESSAGE("structure residuals " << res.ds << " " << res.dt);
  // A wrong speed breaks the time equation.
  CongruenceData bad{Hamiltonian(cc.curvature(), DiffPoly(9L), cc.v() + 0.2), data.xi};
  CHECK(motion_structure_residual(bad, Fz, {0.5, 1.5}, {0.2, 0.6}).dt > 1e-3);
}
