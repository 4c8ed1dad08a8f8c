#include "kkflows/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace kkflows {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_parameter(double m) {
  if (!(m >= 0.0 && m < 1.0)) throw DomainError("Jacobi parameter m must lie in [0, 1), got " + std::to_string(m));
}

bool on_negative_real_axis(cplx z) { return z.imag() == 0.0 && z.real() < 0.0; }

}  // namespace

double complete_K(double m) {
  check_parameter(m);
  double a = 1.0, b = std::sqrt(1.0 - m);
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (a + b);
}

namespace {

// Amplitude for |u| <= K by descending Landen transformation.
double amplitude_reduced(double u, double m) {
  if (m == 0.0) return u;
  std::array<double, 40> a{}, c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (std::abs(c[n]) > 1e-17 * a[n] && n < 38) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int k = n; k >= 1; --k) phi = 0.5 * (phi + std::asin(c[k] / a[k] * std::sin(phi)));
  return phi;
}

}  // namespace

JacobiValues jacobi(double u, double m) {
  check_parameter(m);
  if (!std::isfinite(u)) throw DomainError("Jacobi argument must be finite");
  JacobiValues r;
  if (m == 0.0) {
    r.sn = std::sin(u);
    r.cn = std::cos(u);
    r.dn = 1.0;
    r.am = u;
    return r;
  }
  double K = complete_K(m);
  double j = std::nearbyint(u / (2.0 * K));
  double ur = u - j * 2.0 * K;
  double phi = amplitude_reduced(ur, m);
  double sign = (static_cast<long long>(j) % 2 == 0) ? 1.0 : -1.0;
  r.sn = sign * std::sin(phi);
  r.cn = sign * std::cos(phi);
  r.dn = std::sqrt((1.0 - m) + m * r.cn * r.cn);
  r.am = phi + j * kPi;
  return r;
}

JacobiSeries jacobi_series(const Series& u, double m) {
  int n = u.order();
  JacobiValues v = jacobi(u[0], m);
  JacobiSeries r{Series(n, v.sn), Series(n, v.cn), Series(n, v.dn), Series(n, v.am)};
  Series du = u.derivative();
  // Coefficient k of products known so far.
  auto prod = [](const Series& a, const Series& b, int k) {
    double s = 0;
    for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
    return s;
  };
  std::vector<double> cd(n + 1), sd(n + 1), sc(n + 1);
  for (int k = 0; k < n; ++k) {
    cd[k] = prod(r.cn, r.dn, k);
    sd[k] = prod(r.sn, r.dn, k);
    sc[k] = prod(r.sn, r.cn, k);
    double a_cd = 0, a_sd = 0, a_sc = 0, a_d = 0;
    for (int i = 0; i <= k; ++i) {
      double w = du[k - i];
      a_cd += cd[i] * w;
      a_sd += sd[i] * w;
      a_sc += sc[i] * w;
      a_d += r.dn[i] * w;
    }
    double inv = 1.0 / (k + 1);
    r.sn[k + 1] = a_cd * inv;
    r.cn[k + 1] = -a_sd * inv;
    r.dn[k + 1] = -m * a_sc * inv;
    r.am[k + 1] = a_d * inv;
  }
  return r;
}

cplx carlson_rf(cplx x, cplx y, cplx z) {
  if (on_negative_real_axis(x) || on_negative_real_axis(y) || on_negative_real_axis(z))
    throw BranchCutError("R_F argument on the negative real axis");
  int zeros = (x == 0.0) + (y == 0.0) + (z == 0.0);
  if (zeros > 1) throw BranchCutError("R_F with more than one zero argument");
  cplx A0 = (x + y + z) / 3.0;
  double Q = std::pow(3.0e-16, -1.0 / 6.0) * std::max({std::abs(A0 - x), std::abs(A0 - y), std::abs(A0 - z)});
  cplx A = A0;
  double f = 1.0;
  for (int i = 0; i < 100 && f * Q >= std::abs(A); ++i) {
    cplx sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    cplx lam = sx * sy + sx * sz + sy * sz;
    A = 0.25 * (A + lam);
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    f *= 0.25;
  }
  cplx dx = (A - x) / A, dy = (A - y) / A;
  cplx dz = -dx - dy;
  cplx E2 = dx * dy - dz * dz;
  cplx E3 = dx * dy * dz;
  return (1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0) / std::sqrt(A);
}

cplx carlson_rc(cplx x, cplx y) {
  if (on_negative_real_axis(x)) throw BranchCutError("R_C first argument on the negative real axis");
  if (y == 0.0) throw BranchCutError("R_C second argument is zero");
  if (on_negative_real_axis(y)) throw BranchCutError("R_C principal value not supported");
  cplx A0 = (x + 2.0 * y) / 3.0;
  double Q = std::pow(3.0e-16, -1.0 / 8.0) * std::abs(A0 - x);
  cplx A = A0;
  double f = 1.0;
  for (int i = 0; i < 100 && f * Q >= std::abs(A); ++i) {
    cplx lam = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
    A = 0.25 * (A + lam);
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    f *= 0.25;
  }
  cplx s = (y - A) / A;
  cplx s2 = s * s;
  cplx poly = 1.0 + s2 * (3.0 / 10.0) + s2 * s / 7.0 + s2 * s2 * (3.0 / 8.0) + s2 * s2 * s * (9.0 / 22.0) +
              s2 * s2 * s2 * (159.0 / 208.0) + s2 * s2 * s2 * s * (9.0 / 8.0);
  return poly / std::sqrt(A);
}

cplx carlson_rj(cplx x, cplx y, cplx z, cplx p) {
  if (on_negative_real_axis(x) || on_negative_real_axis(y) || on_negative_real_axis(z))
    throw BranchCutError("R_J argument on the negative real axis");
  if (p == 0.0 || on_negative_real_axis(p)) throw BranchCutError("R_J fourth argument on the negative real axis");
  int zeros = (x == 0.0) + (y == 0.0) + (z == 0.0);
  if (zeros > 1) throw BranchCutError("R_J with more than one zero argument");
  cplx A0 = (x + y + z + 2.0 * p) / 5.0;
  cplx delta = (p - x) * (p - y) * (p - z);
  double Q = std::pow(0.25e-16, -1.0 / 6.0) *
             std::max({std::abs(A0 - x), std::abs(A0 - y), std::abs(A0 - z), std::abs(A0 - p)});
  cplx A = A0;
  cplx sum = 0.0;
  double f = 1.0;    // 4^-m
  double f3 = 1.0;   // 4^-3m
  for (int i = 0; i < 100 && f * Q >= std::abs(A); ++i) {
    cplx sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z), sp = std::sqrt(p);
    cplx lam = sx * sy + sx * sz + sy * sz;
    cplx d = (sp + sx) * (sp + sy) * (sp + sz);
    cplx e = f3 * delta / (d * d);
    sum += f * carlson_rc(1.0, 1.0 + e) / d;
    A = 0.25 * (A + lam);
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    p = 0.25 * (p + lam);
    f *= 0.25;
    f3 *= 1.0 / 64.0;
  }
  cplx X = (A - x) / A, Y = (A - y) / A, Z = (A - z) / A;
  cplx P = -(X + Y + Z) / 2.0;
  cplx E2 = X * Y + X * Z + Y * Z - 3.0 * P * P;
  cplx E3 = X * Y * Z + 2.0 * E2 * P + 4.0 * P * P * P;
  cplx E4 = (2.0 * X * Y * Z + E2 * P + 3.0 * P * P * P) * P;
  cplx E5 = X * Y * Z * P * P;
  cplx series = 1.0 - 3.0 * E2 / 14.0 + E3 / 6.0 + 9.0 * E2 * E2 / 88.0 - 3.0 * E4 / 22.0 - 9.0 * E2 * E3 / 52.0 +
                3.0 * E5 / 26.0;
  return f * series / (A * std::sqrt(A)) + 6.0 * sum;
}

cplx carlson_rd(cplx x, cplx y, cplx z) { return carlson_rj(x, y, z, z); }

double incomplete_F(double phi, double m) {
  check_parameter(m);
  double j = std::nearbyint(phi / kPi);
  double pr = phi - j * kPi;
  double s = std::sin(pr), c = std::cos(pr);
  double value = s * carlson_rf(c * c, 1.0 - m * s * s, 1.0).real();
  return value + 2.0 * j * complete_K(m);
}

cplx complete_Pi(cplx zeta, double m) {
  check_parameter(m);
  if (zeta.imag() == 0.0 && zeta.real() >= 1.0)
    throw PoleOnPath("complete_Pi: real characteristic >= 1 puts a pole on the path");
  return carlson_rf(0.0, 1.0 - m, 1.0) + zeta / 3.0 * carlson_rj(0.0, 1.0 - m, 1.0, 1.0 - zeta);
}

cplx incomplete_Pi(cplx zeta, double phi, double m) {
  check_parameter(m);
  if (!std::isfinite(phi)) throw DomainError("incomplete_Pi: amplitude must be finite");
  double j = std::nearbyint(phi / kPi);
  double pr = phi - j * kPi;
  if (zeta.imag() == 0.0 && zeta.real() >= 1.0) {
    double reach = (j != 0.0) ? 1.0 : std::sin(pr) * std::sin(pr);
    if (zeta.real() * reach >= 1.0) throw PoleOnPath("incomplete_Pi: 1 - zeta sin^2 vanishes on the path");
  }
  double s = std::sin(pr), c = std::cos(pr);
  double s2 = s * s;
  cplx value = s * carlson_rf(c * c, 1.0 - m * s2, 1.0);
  if (zeta != 0.0 && s != 0.0) value += zeta / 3.0 * s * s2 * carlson_rj(c * c, 1.0 - m * s2, 1.0, 1.0 - zeta * s2);
  if (j != 0.0) value += 2.0 * j * complete_Pi(zeta, m);
  return value;
}

WeierstrassLattice weierstrass_lattice(double g2, double g3) {
  WeierstrassLattice L;
  L.g2 = g2;
  L.g3 = g3;
  L.delta = -g2 * g2 * g2 + 27.0 * g3 * g3;
  double scale = std::max(std::abs(g2 * g2 * g2), 27.0 * g3 * g3);
  if (scale == 0.0 || std::abs(L.delta) <= 1e-12 * scale)
    throw DegenerateInvariants("Weierstrass invariants with vanishing discriminant");
  auto polish = [&](double t) {
    for (int i = 0; i < 4; ++i) {
      double f = 4 * t * t * t - g2 * t - g3, df = 12 * t * t - g2;
      if (df == 0.0) break;
      t -= f / df;
    }
    return t;
  };
  if (L.delta < 0.0) {
    L.three_real_roots = true;
    double r = std::sqrt(g2 / 12.0);
    double arg = std::clamp(g3 / (8.0 * r * r * r), -1.0, 1.0);
    double a0 = std::acos(arg) / 3.0;
    L.e1 = polish(2.0 * r * std::cos(a0));
    L.e2 = polish(2.0 * r * std::cos(a0 - 2.0 * kPi / 3.0));
    L.e3 = polish(2.0 * r * std::cos(a0 + 2.0 * kPi / 3.0));
    L.m = (L.e2 - L.e3) / (L.e1 - L.e3);
    L.scale = std::sqrt(L.e1 - L.e3);
    L.real_half_period = complete_K(L.m) / L.scale;
  } else {
    // Single real root of 4t^3 - g2 t - g3 by Cardano.
    double p = -g2 / 4.0, q = -g3 / 4.0;
    double disc = q * q / 4.0 + p * p * p / 27.0;
    double sd = std::sqrt(disc);
    double t = std::cbrt(-q / 2.0 + sd) + std::cbrt(-q / 2.0 - sd);
    L.e2 = polish(t);
    double H2 = std::sqrt(3.0 * L.e2 * L.e2 - g2 / 4.0);
    L.m = 0.5 - 3.0 * L.e2 / (4.0 * H2);
    L.scale = 2.0 * std::sqrt(H2);
    L.e1 = L.e3 = std::numeric_limits<double>::quiet_NaN();
    L.real_half_period = 2.0 * complete_K(L.m) / L.scale;
  }
  return L;
}

namespace {

void check_pole(double x, const WeierstrassLattice& L) {
  double period = 2.0 * L.real_half_period;
  double r = x - period * std::nearbyint(x / period);
  if (std::abs(r) < 1e-8 * period) throw NearPole("Weierstrass p evaluated at a lattice point");
}

}  // namespace

double weierstrass_p(double x, const WeierstrassLattice& L) {
  check_pole(x, L);
  if (L.three_real_roots) {
    double sn = jacobi(x * L.scale, L.m).sn;
    return L.e3 + (L.e1 - L.e3) / (sn * sn);
  }
  double cn = jacobi(x * L.scale, L.m).cn;
  double H2 = 0.25 * L.scale * L.scale;
  return L.e2 + H2 * (1.0 + cn) / (1.0 - cn);
}

double weierstrass_p(double x, double g2, double g3) { return weierstrass_p(x, weierstrass_lattice(g2, g3)); }

double weierstrass_p_bounded(double x, const WeierstrassLattice& L) {
  if (!L.three_real_roots) throw DomainError("bounded real branch needs three real roots (delta < 0)");
  double sn = jacobi(x * L.scale, L.m).sn;
  return L.e3 + (L.e2 - L.e3) * sn * sn;
}

Series weierstrass_p_series(const Series& x, const WeierstrassLattice& L) {
  check_pole(x[0], L);
  if (L.three_real_roots) {
    Series sn = jacobi_series(x * L.scale, L.m).sn;
    return L.e3 + (L.e1 - L.e3) / (sn * sn);
  }
  Series cn = jacobi_series(x * L.scale, L.m).cn;
  double H2 = 0.25 * L.scale * L.scale;
  return L.e2 + H2 * (1.0 + cn) / (1.0 - cn);
}

Series weierstrass_p_bounded_series(const Series& x, const WeierstrassLattice& L) {
  if (!L.three_real_roots) throw DomainError("bounded real branch needs three real roots (delta < 0)");
  Series sn = jacobi_series(x * L.scale, L.m).sn;
  return L.e3 + (L.e2 - L.e3) * (sn * sn);
}

}  // namespace kkflows
