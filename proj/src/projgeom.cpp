#include "kkflows/projgeom.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace kkflows {

namespace {

SeriesVec3 derivative(const SeriesVec3& x) { return {x[0].derivative(), x[1].derivative(), x[2].derivative()}; }

Series det3(const SeriesVec3& x, const SeriesVec3& y, const SeriesVec3& z) {
  return x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0]) +
         x[2] * (y[0] * z[1] - y[1] * z[0]);
}

Vec3 value(const SeriesVec3& x) { return Vec3(x[0][0], x[1][0], x[2][0]); }

double det3(const Vec3& x, const Vec3& y, const Vec3& z) { return x.dot(y.cross(z)); }

// k-th derivative of f at t by central differences extrapolated over `levels` halvings.
double richardson(const std::function<Vec3(double)>& f, double t, int k, double h, int levels, int comp) {
  auto stencil = [&](double step) {
    double s = 0, binom = 1;
    for (int j = 0; j <= k; ++j) {
      double sign = (j % 2 == 0) ? 1.0 : -1.0;
      s += sign * binom * f(t + (0.5 * k - j) * step)[comp];
      binom = binom * (k - j) / (j + 1);
    }
    return s / std::pow(step, k);
  };
  if (k == 0) return f(t)[comp];
  std::vector<std::vector<double>> T(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    T[i].resize(static_cast<std::size_t>(i) + 1);
    T[i][0] = stencil(h / std::pow(2.0, i));
    for (int j = 1; j <= i; ++j) {
      double fac = std::pow(4.0, j);
      T[i][j] = (fac * T[i][j - 1] - T[i - 1][j - 1]) / (fac - 1.0);
    }
  }
  return T[static_cast<std::size_t>(levels) - 1][static_cast<std::size_t>(levels) - 1];
}

// Gauss-Legendre nodes and weights on [-1, 1], five points.
constexpr double kGLx[5] = {-0.906179845938663992797627, -0.538469310105683091036314, 0.0,
                            0.538469310105683091036314, 0.906179845938663992797627};
constexpr double kGLw[5] = {0.236926885056189087514264, 0.478628670499366468041292, 0.568888888888888888888889,
                            0.478628670499366468041292, 0.236926885056189087514264};

// Weight-3 reference magnitude for the sextatic threshold.
double radicand_scale(const ProjectiveJets& J) {
  double b = std::abs(J.b[0]);
  return std::abs(J.a[0]) + 0.5 * std::abs(J.b.derivative_at(1)) + b * std::sqrt(b);
}

}  // namespace

Curve Curve::closed_form(std::function<SeriesVec3(const Series&)> g, std::string name) {
  Curve c;
  c.mode_ = Mode::ClosedForm;
  c.series_ = std::move(g);
  c.name_ = std::move(name);
  return c;
}

Curve Curve::finite_difference(std::function<Vec3(double)> g, double step, int levels, std::string name) {
  if (!(step > 0.0) || levels < 1) throw InvalidInput("finite-difference mode needs a positive step and levels >= 1");
  Curve c;
  c.mode_ = Mode::RichardsonFD;
  c.values_ = std::move(g);
  c.step_ = step;
  c.levels_ = levels;
  c.name_ = std::move(name);
  return c;
}

Vec3 Curve::operator()(double t) const {
  if (mode_ == Mode::RichardsonFD) return values_(t);
  return value(series_(Series::variable(0, t)));
}

SeriesVec3 Curve::jet(double t, int order) const {
  if (mode_ == Mode::ClosedForm) return series_(Series::variable(order, t));
  SeriesVec3 out{Series(order), Series(order), Series(order)};
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> coeffs = out[c].coeffs();
      coeffs[static_cast<std::size_t>(k)] = richardson(values_, t, k, step_, levels_, c) / fact;
      out[c] = Series(coeffs);
    }
  }
  return out;
}

Curve Curve::transformed(const Mat3& A) const {
  Curve c = *this;
  if (mode_ == Mode::ClosedForm) {
    auto g = series_;
    c.series_ = [g, A](const Series& t) {
      SeriesVec3 x = g(t);
      SeriesVec3 y;
      for (int i = 0; i < 3; ++i) y[i] = A(i, 0) * x[0] + A(i, 1) * x[1] + A(i, 2) * x[2];
      return y;
    };
  } else {
    auto g = values_;
    c.values_ = [g, A](double t) -> Vec3 { return A * g(t); };
  }
  return c;
}

Curve Curve::reparameterized(std::function<Series(const Series&)> phi) const {
  Curve c = *this;
  if (mode_ == Mode::ClosedForm) {
    auto g = series_;
    c.series_ = [g, phi](const Series& t) { return g(phi(t)); };
  } else {
    auto g = values_;
    c.values_ = [g, phi](double t) { return g(phi(Series::variable(0, t))[0]); };
  }
  return c;
}

Curve Curve::rescaled(std::function<Series(const Series&)> lambda) const {
  Curve c = *this;
  if (mode_ == Mode::ClosedForm) {
    auto g = series_;
    c.series_ = [g, lambda](const Series& t) {
      SeriesVec3 x = g(t);
      Series l = lambda(t);
      return SeriesVec3{l * x[0], l * x[1], l * x[2]};
    };
  } else {
    auto g = values_;
    c.values_ = [g, lambda](double t) -> Vec3 { return lambda(Series::variable(0, t))[0] * g(t); };
  }
  return c;
}

Curve builtin_curve(const std::string& name) {
  if (name == "exp-cos") {
    return Curve::closed_form(
        [](const Series& t) {
          Series s(t.order()), c(t.order());
          sin_cos(t, s, c);
          return SeriesVec3{c, s, exp(-0.25 * c)};
        },
        name);
  }
  if (name == "conic") {
    return Curve::closed_form(
        [](const Series& t) { return SeriesVec3{Series(t.order(), 1.0), t, 0.5 * (t * t)}; }, name);
  }
  if (name == "cubic") {
    return Curve::closed_form(
        [](const Series& t) { return SeriesVec3{Series(t.order(), 1.0), t, t * t * t}; }, name);
  }
  throw InvalidInput("unknown builtin curve '" + name + "'");
}

ProjectiveJets projective_jets(const Curve& curve, double t, int order) {
  if (order < 5) throw InvalidInput("projective jets need the lift to order 5 at least");
  SeriesVec3 G = curve.jet(t, order);
  SeriesVec3 G1 = derivative(G), G2 = derivative(G1);
  Series d = det3(G, G1, G2);
  double scale = value(G).norm() * value(G1).norm() * value(G2).norm();
  if (!(std::abs(d[0]) >= 1e-10 * scale) || scale == 0.0) throw InflectionPoint(t);

  ProjectiveJets J;
  Series lam = 1.0 / cbrt(d);
  for (int i = 0; i < 3; ++i) J.gamma[i] = lam * G[i];
  SeriesVec3 g1 = derivative(J.gamma), g2 = derivative(g1), g3 = derivative(g2);
  J.a = det3(g3, g1, g2);
  J.b = det3(J.gamma, g3, g2);
  J.c = det3(J.gamma, g1, g3);
  J.radicand = J.a - 0.5 * J.b.derivative();
  J.v = Series(J.radicand.order(), std::cbrt(J.radicand[0]));
  if (J.radicand[0] != 0.0) J.v = cbrt(J.radicand);
  return J;
}

NormalizedLift normalized_lift(const Curve& curve, double t) {
  SeriesVec3 G = curve.jet(t, 5);
  SeriesVec3 G1 = derivative(G), G2 = derivative(G1);
  NormalizedLift out;
  out.det_G = det3(value(G), value(G1), value(G2));
  ProjectiveJets J = projective_jets(curve, t, 5);
  SeriesVec3 x = J.gamma;
  for (int k = 0; k < 4; ++k) {
    out.gamma[static_cast<std::size_t>(k)] = value(x);
    if (k < 3) x = derivative(x);
  }
  return out;
}

ABCoefficients ab_coefficients(const Curve& curve, double t) {
  NormalizedLift L = normalized_lift(curve, t);
  const auto& g = L.gamma;
  ABCoefficients r;
  r.a = det3(g[3], g[1], g[2]);
  r.b = det3(g[0], g[3], g[2]);
  r.c = det3(g[0], g[1], g[3]);
  r.residual = (g[3] - r.a * g[0] - r.b * g[1] - r.c * g[2]).norm();
  return r;
}

Speed speed_and_arc(const Curve& curve, double t, bool require_nonzero) {
  ProjectiveJets J = projective_jets(curve, t, 6);
  Speed s;
  s.radicand = J.radicand[0];
  s.v = std::cbrt(s.radicand);
  s.scale = radicand_scale(J);
  if (require_nonzero && std::abs(s.radicand) <= 1e-12 * s.scale) throw SextaticPoint(t);
  return s;
}

double sextatic_function(const Curve& curve, double t) { return projective_jets(curve, t, 6).radicand[0]; }

SextaticScan find_sextatic(const Curve& curve, double lo, double hi, int grid) {
  if (!(hi > lo) || grid < 2) throw InvalidInput("sextatic scan needs hi > lo and at least two grid points");
  std::vector<double> ts(static_cast<std::size_t>(grid) + 1), fs(ts.size());
  const double h = (hi - lo) / grid;
  SextaticScan out;
  for (int i = 0; i <= grid; ++i) {
    ts[i] = (i == grid) ? hi : lo + i * h;
    fs[i] = sextatic_function(curve, ts[i]);
    out.max_abs = std::max(out.max_abs, std::abs(fs[i]));
  }
  const double tol = 1e-12 * out.max_abs;
  if (out.max_abs == 0.0 || std::all_of(fs.begin(), fs.end(), [&](double f) { return std::abs(f) <= 1e-300; })) {
    out.degenerate = true;
    return out;
  }
  auto push = [&](double r) {
    if (r >= hi) return;
    if (!out.roots.empty() && std::abs(out.roots.back() - r) < 1e-9 * std::max(1.0, std::abs(r))) return;
    out.roots.push_back(r);
  };
  for (int i = 0; i < grid; ++i) {
    double a = ts[i], b = ts[i + 1], fa = fs[i], fb = fs[i + 1];
    if (std::abs(fa) <= tol) {
      push(a);
      continue;
    }
    if (std::abs(fb) <= tol || (fa > 0) == (fb > 0)) continue;
    // Illinois: regula falsi with halving of the stale end.
    int side = 0;
    double x = a;
    for (int it = 0; it < 60; ++it) {
      x = (a * fb - b * fa) / (fb - fa);
      double fx = sextatic_function(curve, x);
      if (std::abs(fx) <= tol || b - a < 1e-15 * std::max(1.0, std::abs(x))) break;
      if ((fx > 0) == (fb > 0)) {
        b = x;
        fb = fx;
        if (side == -1) fa *= 0.5;
        side = -1;
      } else {
        a = x;
        fa = fx;
        if (side == 1) fb *= 0.5;
        side = 1;
      }
    }
    push(x);
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

double curvature(const Curve& curve, double t) {
  ProjectiveJets J = projective_jets(curve, t, 8);
  if (std::abs(J.radicand[0]) <= 1e-12 * radicand_scale(J)) throw SextaticPoint(t);
  Series w = J.v.derivative() / J.v;
  Series S = w.derivative() - 0.5 * (w * w);
  return -(S[0] + 0.5 * J.b[0]) / (J.v[0] * J.v[0]);
}

Mat3 canonical_frame(const Curve& curve, double t) {
  ProjectiveJets J = projective_jets(curve, t, 7);
  if (std::abs(J.radicand[0]) <= 1e-12 * radicand_scale(J)) throw SextaticPoint(t);
  Vec3 g0 = value(J.gamma);
  SeriesVec3 d1 = derivative(J.gamma);
  Vec3 g1 = value(d1), g2 = value(derivative(d1));
  double v = J.v[0], v1 = J.v.derivative_at(1), b = J.b[0];
  Mat3 F;
  F.col(0) = v * g0;
  F.col(1) = (v1 / v) * g0 + g1;
  F.col(2) = (0.5 / v) * (v1 * v1 / (v * v) - b) * g0 + (v1 / (v * v)) * g1 + g2 / v;
  return F;
}

Mat3 frenet_matrix(double k) {
  Mat3 K;
  K << 0, -k, 1, 1, 0, -k, 0, 1, 0;
  return K;
}

Mat3 osculating_conic(const Curve& curve, double t) {
  NormalizedLift L = normalized_lift(curve, t);
  double b = det3(L.gamma[0], L.gamma[3], L.gamma[2]);
  Mat3 B;
  B.col(0) = L.gamma[0];
  B.col(1) = L.gamma[1];
  B.col(2) = L.gamma[2] - 0.5 * b * L.gamma[0];
  Mat3 Q0;
  Q0 << 0, 0, -1, 0, 1, 0, -1, 0, 0;
  Mat3 Binv = B.inverse();
  Mat3 C = Binv.transpose() * Q0 * Binv;
  C = 0.5 * (C + C.transpose());
  C /= C.norm();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(C(i, j)) > 1e-12) {
        if (C(i, j) < 0) C = -C;
        return C;
      }
  return C;
}

double arc_length(const Curve& curve, double t0, double t1, int panels) {
  if (panels < 1) throw InvalidInput("arc length needs at least one panel");
  double h = (t1 - t0) / panels, sum = 0;
  for (int p = 0; p < panels; ++p) {
    double mid = t0 + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) sum += kGLw[i] * speed_and_arc(curve, mid + 0.5 * h * kGLx[i]).v;
  }
  return 0.5 * h * sum;
}

ProjectiveData analyze(const Curve& curve, double t, double t0) {
  ProjectiveJets J = projective_jets(curve, t, 8);
  ProjectiveData d;
  d.t = t;
  d.gamma = value(J.gamma);
  d.a = J.a[0];
  d.b = J.b[0];
  d.v = J.v[0];
  d.sigma = arc_length(curve, t0, t);
  d.k = curvature(curve, t);
  d.frame = canonical_frame(curve, t);
  return d;
}

}  // namespace kkflows
