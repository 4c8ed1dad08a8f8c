// Independent reference computations used only by the tests.

#ifndef KKFLOWS_TESTS_ORACLES_HPP
#define KKFLOWS_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
template <typename T>
T integrate(const std::function<T(double)>& f, double a, double b, double tol = 1e-14, int depth = 0) {
  static const double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                               0.207784955007898467600689403773245, 0.0};
  static const double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                               0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T k = fc * wk[7];
  T g = fc * wg[3];
  for (int i = 0; i < 7; ++i) {
    T f1 = f(c - h * xk[i]), f2 = f(c + h * xk[i]);
    k += (f1 + f2) * wk[i];
    if (i % 2 == 1) g += (f1 + f2) * wg[i / 2];
  }
  k *= h;
  g *= h;
  double err = std::abs(k - g);
  if (err <= tol * std::max(1.0, std::abs(k)) || depth > 40 || std::abs(h) < 1e-12) return k;
  return integrate<T>(f, a, c, tol, depth + 1) + integrate<T>(f, c, b, tol, depth + 1);
}

inline double integrate_real(const std::function<double(double)>& f, double a, double b, double tol = 1e-14) {
  return integrate<double>(f, a, b, tol);
}

inline std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                                              double b, double tol = 1e-14) {
  return integrate<std::complex<double>>(f, a, b, tol);
}

// F(phi|m) by quadrature.
inline double elliptic_F(double phi, double m) {
  return integrate_real([m](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); }, 0.0, phi,
                        1e-15);
}

// am(u|m) by Newton iteration on the quadrature F.
inline double amplitude(double u, double m) {
  double phi = u;
  for (int i = 0; i < 60; ++i) {
    double r = elliptic_F(phi, m) - u;
    double step = r * std::sqrt(1.0 - m * std::sin(phi) * std::sin(phi));
    phi -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(phi))) break;
  }
  return phi;
}

// Weierstrass p from its Laurent series near 0 and the duplication formula.
inline double weierstrass_p(double x, double g2, double g3) {
  std::vector<double> c(20, 0.0);
  c[2] = g2 / 20.0;
  c[3] = g3 / 28.0;
  for (int k = 4; k < 20; ++k) {
    double s = 0;
    for (int j = 2; j <= k - 2; ++j) s += c[j] * c[k - j];
    c[k] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
  }
  int halvings = 0;
  double z = x;
  while (std::abs(z) > 0.05) {
    z *= 0.5;
    ++halvings;
  }
  double z2 = z * z;
  double p = 1.0 / z2, zk = z2;
  for (int k = 2; k < 20; ++k) {
    p += c[k] * zk;
    zk *= z2;
  }
  for (int i = 0; i < halvings; ++i) {
    double num = 6.0 * p * p - g2 / 2.0;
    p = num * num / (4.0 * (4.0 * p * p * p - g2 * p - g3)) - 2.0 * p;
  }
  return p;
}

// k-th derivative of f at x by Richardson-extrapolated central differences.
inline double derivative(const std::function<double(double)>& f, double x, int k, double h = 0.05) {
  auto stencil = [&](double step) {
    // Central difference of order k from binomial coefficients.
    double s = 0;
    double binom = 1;
    for (int j = 0; j <= k; ++j) {
      double sign = (j % 2 == 0) ? 1.0 : -1.0;
      s += sign * binom * f(x + (0.5 * k - j) * step);
      binom = binom * (k - j) / (j + 1);
    }
    return s / std::pow(step, k);
  };
  const int levels = 5;
  double T[levels][levels];
  for (int i = 0; i < levels; ++i) {
    T[i][0] = stencil(h / std::pow(2.0, i));
    for (int j = 1; j <= i; ++j) {
      double fac = std::pow(4.0, j);
      T[i][j] = (fac * T[i][j - 1] - T[i - 1][j - 1]) / (fac - 1.0);
    }
  }
  return T[levels - 1][levels - 1];
}

}  // namespace oracle

#endif  // KKFLOWS_TESTS_ORACLES_HPP
