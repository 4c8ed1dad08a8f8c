#include "kkflows/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "kkflows/quadrature.hpp"

namespace kkflows {

using cplx = std::complex<double>;

namespace {

Mat3 frenet_generator(double k, double v) { return v * frenet_matrix(k); }

double value_of(const ScalarFunction& f, double s) { return f(Series(0, s))[0]; }

Mat3 values(const SeriesMat3& A) {
  Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = A[i][j][0];
  return M;
}

Mat3 coefficient(const SeriesMat3& A, int n) {
  Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = n <= A[i][j].order() ? A[i][j][static_cast<std::size_t>(n)] : 0.0;
  return M;
}

int order_of(const SeriesMat3& A) {
  int n = A[0][0].order();
  for (const auto& row : A)
    for (const auto& e : row) n = std::min(n, e.order());
  return n;
}

SeriesMat3 frenet_series(const Series& k, const Series& v) {
  int n = std::min(k.order(), v.order());
  Series zero(n);
  Series kv = k * v, vv = v.truncated(n);
  return {{{zero, -kv, vv}, {vv, zero, -kv}, {zero, vv, zero}}};
}

double frobenius(const Mat3& M) { return M.norm(); }

std::vector<double> sorted_unique(std::vector<double> g) {
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

ScalarFunction constant_function(double value) {
  return [value](const Series& s) { return Series(s.order(), value); };
}

// ---------------------------------------------------------------------------
// Frenet integration

Mat3 propagate_frenet(const CurvatureProfile& k, const ScalarFunction& v, const Mat3& F0, double s0, double s1,
                      const FrenetOptions& o, FrenetStats* stats) {
  if (s0 == s1) return F0;
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double e[7] = {71.0 / 57600,  0.0,           -71.0 / 16695, 71.0 / 1920,
                                  -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

  auto rhs = [&](double s, const Mat3& F) -> Mat3 { return F * frenet_generator(k.value(s), value_of(v, s)); };

  double dir = s1 > s0 ? 1.0 : -1.0;
  double s = s0, h = dir * std::min(o.initial_step, std::abs(s1 - s0));
  Mat3 F = F0;
  Mat3 K[7];
  FrenetStats local;
  long since_renorm = 0;
  while (dir * (s1 - s) > 0) {
    if (local.accepted + local.rejected > o.max_steps) throw StepFailure("Frenet integration exceeded the step budget");
    bool last = dir * (s + h - s1) >= 0;
    if (last) h = s1 - s;
    K[0] = rhs(s, F);
    for (int i = 1; i < 7; ++i) {
      Mat3 y = F;
      for (int j = 0; j < i; ++j) y += h * a[i][j] * K[j];
      K[i] = rhs(s + c[i] * h, y);
    }
    Mat3 next = F;
    for (int j = 0; j < 6; ++j) next += h * a[6][j] * K[j];
    Mat3 err = Mat3::Zero();
    for (int j = 0; j < 7; ++j) err += h * e[j] * K[j];
    double acc = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double sc = o.atol + o.rtol * std::max(std::abs(F(i, j)), std::abs(next(i, j)));
        acc += (err(i, j) / sc) * (err(i, j) / sc);
      }
    double en = std::sqrt(acc / 9.0);
    if (en <= 1.0) {
      s = last ? s1 : s + h;
      F = next;
      ++local.accepted;
      if (o.renormalize_every > 0 && ++since_renorm >= o.renormalize_every) {
        // det(F) is only meaningful while its rounding error is small
        double n = F.norm();
        if (n * n * n < 1e5) F /= std::cbrt(F.determinant());
        since_renorm = 0;
      }
    } else {
      ++local.rejected;
    }
    double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (last && en <= 1.0) break;
    h *= fac;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(s)))
      throw StepFailure("Frenet step size underflow at s = " + std::to_string(s));
  }
  if (stats) {
    stats->accepted += local.accepted;
    stats->rejected += local.rejected;
  }
  return F;
}

FrameField integrate_frenet(const CurvatureProfile& k, const ScalarFunction& v, const std::vector<double>& grid,
                            double anchor, const Mat3& F_anchor, const FrenetOptions& options) {
  if (grid.empty()) throw InvalidInput("Frenet integration needs at least one grid point");
  FrameField out;
  out.grid_ = sorted_unique(grid);
  out.frames_.resize(out.grid_.size());
  out.k_ = k;
  out.v_ = v;
  out.anchor_ = anchor;
  out.options_ = options;
  auto first_up = std::lower_bound(out.grid_.begin(), out.grid_.end(), anchor) - out.grid_.begin();
  Mat3 F = F_anchor;
  double s = anchor;
  for (auto i = first_up; i < static_cast<std::ptrdiff_t>(out.grid_.size()); ++i) {
    F = propagate_frenet(k, v, F, s, out.grid_[i], options, &out.stats_);
    s = out.grid_[i];
    out.frames_[i] = F;
  }
  F = F_anchor;
  s = anchor;
  for (auto i = first_up - 1; i >= 0; --i) {
    F = propagate_frenet(k, v, F, s, out.grid_[i], options, &out.stats_);
    s = out.grid_[i];
    out.frames_[i] = F;
  }
  return out;
}

FrameField integrate_frenet(const CurvatureProfile& k, const ScalarFunction& v, double lo, double hi, int n,
                            const FrenetOptions& options) {
  if (n < 1 || !(hi > lo)) throw InvalidInput("Frenet integration needs hi > lo and n >= 1");
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) grid[i] = lo + (hi - lo) * i / n;
  grid.back() = hi;
  return integrate_frenet(k, v, grid, lo, Mat3::Identity(), options);
}

Vec3 FrameField::curve(std::size_t i) const {
  Vec3 x = frames_.at(i).col(0);
  return x / x.norm();
}

Mat3 FrameField::frame_at(double s) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), s);
  std::size_t i;
  if (it == grid_.end()) {
    i = grid_.size() - 1;
  } else if (it == grid_.begin()) {
    i = 0;
  } else {
    i = static_cast<std::size_t>(it - grid_.begin());
    if (std::abs(grid_[i - 1] - s) < std::abs(grid_[i] - s)) --i;
  }
  if (grid_[i] == s) return frames_[i];
  return propagate_frenet(k_, v_, frames_[i], grid_[i], s, options_);
}

SeriesMat3 linear_ode_jet(const Mat3& F0, const SeriesMat3& A) {
  int n = order_of(A) + 1;
  std::vector<Mat3> Fc(static_cast<std::size_t>(n) + 1), Ac(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) Ac[j] = coefficient(A, j);
  Fc[0] = F0;
  for (int q = 0; q < n; ++q) {
    Mat3 acc = Mat3::Zero();
    for (int j = 0; j <= q; ++j) acc += Fc[j] * Ac[q - j];
    Fc[q + 1] = acc / (q + 1.0);
  }
  SeriesMat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::vector<double> c(static_cast<std::size_t>(n) + 1);
      for (int q = 0; q <= n; ++q) c[q] = Fc[q](i, j);
      out[i][j] = Series(std::move(c));
    }
  return out;
}

SeriesMat3 FrameField::frame_jet(double s, int order) const {
  Mat3 F0 = frame_at(s);
  if (order == 0) {
    SeriesMat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = Series(0, F0(i, j));
    return out;
  }
  Series x = Series::variable(order - 1, s);
  return linear_ode_jet(F0, frenet_series(k_.series(x), v_(x)));
}

Curve FrameField::as_curve() const {
  auto self = std::make_shared<const FrameField>(*this);
  return Curve::closed_form(
      [self](const Series& t) {
        int n = t.order();
        SeriesMat3 J = self->frame_jet(t[0], n);
        Series delta = t - t[0];
        SeriesVec3 out;
        for (int i = 0; i < 3; ++i) {
          const Series& c = J[i][0];
          Series acc(n, c[static_cast<std::size_t>(n)]);
          for (int q = n - 1; q >= 0; --q) acc = acc * delta + c[static_cast<std::size_t>(q)];
          out[i] = acc;
        }
        return out;
      },
      "frenet");
}

// ---------------------------------------------------------------------------
// Phi-matrix and zero curvature

SeriesMat3 phi_tilde_series(const Series& kappa, const Series& upsilon, const Series& I) {
  Series K[5], Y[7];
  K[0] = kappa;
  for (int i = 1; i < 5; ++i) K[i] = K[i - 1].derivative();
  Y[0] = upsilon;
  for (int i = 1; i < 7; ++i) Y[i] = Y[i - 1].derivative();
  int n = std::min({kappa.order() - 4, upsilon.order() - 6, I.order()});
  if (n < 0) throw InvalidInput("phi_tilde needs kappa to order 4 and upsilon to order 6");
  for (auto& x : K) x = x.truncated(n);
  for (auto& x : Y) x = x.truncated(n);
  Series In = I.truncated(n);
  const Series& k0 = K[0];
  Series k02 = k0 * k0, k03 = k02 * k0;

  Series f00 = (k0 / 3.0 + (8.0 / 9) * k0 * K[1] + K[3] / 9.0) * Y[0] + (0.5 * K[2] + (8.0 / 9) * k02) * Y[1] +
               (1.0 / 6 + (5.0 / 6) * K[1]) * Y[2] + (5.0 / 9) * k0 * Y[3] + Y[5] / 18.0;
  Series f10 = -In / 9.0 - (K[2] / 9.0 + (4.0 / 9) * k02) * Y[0] - (0.5 + (7.0 / 18) * K[1]) * Y[1] -
               (4.0 / 9) * k0 * Y[2] - Y[4] / 18.0;
  Series common = 1.0 + (4.0 / 9) * k03 + (8.0 / 9) * K[1] * K[1] + k0 * K[2] + K[4] / 9.0;
  Series f01 = k0 * In / 9.0 + (common + K[1] / 3.0) * Y[0] +
               ((5.0 / 6) * k0 + (55.0 / 18) * k0 * K[1] + (11.0 / 18) * K[3]) * Y[1] +
               (4.0 / 3) * (k02 + K[2]) * Y[2] + (1.0 / 6 + (25.0 / 18) * K[1]) * Y[3] + (11.0 / 18) * k0 * Y[4] +
               Y[6] / 18.0;
  Series f11 = -(2.0 / 3) * k0 * Y[0] - Y[2] / 3.0;
  Series f21 = -In / 9.0 - ((4.0 / 9) * k02 + K[2] / 9.0) * Y[0] + (0.5 - (7.0 / 18) * K[1]) * Y[1] -
               (4.0 / 9) * k0 * Y[2] - Y[4] / 18.0;
  Series f02 = -In / 9.0 + ((5.0 / 9) * k02 + (2.0 / 9) * K[2]) * Y[0] + (7.0 / 9) * K[1] * Y[1] +
               (8.0 / 9) * k0 * Y[2] + Y[4] / 9.0;
  Series f12 = k0 * In / 9.0 + (common - K[1] / 3.0) * Y[0] +
               (-(5.0 / 6) * k0 + (55.0 / 18) * k0 * K[1] + (11.0 / 18) * K[3]) * Y[1] +
               (4.0 / 3) * (k02 + K[2]) * Y[2] - (1.0 / 6 - (25.0 / 18) * K[1]) * Y[3] +
               (11.0 / 18) * k0 * Y[4] + Y[6] / 18.0;
  return {{{f00, f01, f02}, {f10, f11, f12}, {Y[0], f21, -(f00 + f11)}}};
}

PhiMatrix phi_tilde(std::span<const double> kappa_jet, std::span<const double> upsilon_jet, double integral_term,
                    double lambda) {
  if (kappa_jet.size() < 5 || upsilon_jet.size() < 7)
    throw MissingJetOrder("phi_tilde needs kappa to order 4 and upsilon to order 6");
  Series k = Series::from_derivatives({kappa_jet.begin(), kappa_jet.begin() + 5});
  Series y = Series::from_derivatives({upsilon_jet.begin(), upsilon_jet.begin() + 7});
  PhiMatrix out;
  out.phi = values(phi_tilde_series(k, y, Series(0, integral_term))) - lambda * frenet_matrix(kappa_jet[0]);
  out.lambda = lambda;
  return out;
}

double theta(std::span<const double> k, std::span<const double> y, double I) {
  if (k.size() < 6 || y.size() < 8) throw MissingJetOrder("theta needs kappa to order 5 and upsilon to order 7");
  double k0 = k[0], k1 = k[1], k2 = k[2], k3 = k[3], k4 = k[4], k5 = k[5];
  return I * k1 / 9.0 + (20 * k0 * k0 * k1 + 25 * k1 * k2 + 10 * k0 * k3 + k5) * y[0] / 9.0 +
         (1.5 + 16.0 / 9 * k0 * k0 * k0 + 71.0 / 18 * k1 * k1 + 41.0 / 9 * k0 * k2 + 13.0 / 18 * k4) * y[1] +
         (59.0 / 9 * k0 * k1 + 35.0 / 18 * k3) * y[2] + (2 * k0 * k0 + 49.0 / 18 * k2) * y[3] + 2 * k1 * y[4] +
         2.0 / 3 * k0 * y[5] + y[7] / 18.0;
}

double integral_term(const SpaceTimeJet& kappa, const SpaceTimeJet& upsilon, double s, double t) {
  if (s == 0.0) return 0.0;
  return gauss_legendre(
      [&](double r) {
        double k = kappa(r, t, 0)[0];
        auto y = upsilon(r, t, 3);
        return k * y[3] + 4 * k * k * y[1];
      },
      0.0, s, panels_for(0.0, s, 8.0));
}

double zero_curvature_residual(const SpaceTimeJet& kappa, const SpaceTimeJet& upsilon, double lambda,
                               const std::vector<double>& s_grid, const std::vector<double>& t_grid, double dt) {
  double worst = 0;
  for (double t : t_grid) {
    for (double s : s_grid) {
      Series k = Series::from_derivatives(kappa(s, t, 5));
      Series y = Series::from_derivatives(upsilon(s, t, 7));
      double I0 = integral_term(kappa, upsilon, s, t);
      double dI = k[0] * y.derivative_at(3) + 4 * k[0] * k[0] * y.derivative_at(1);
      Series I(std::vector<double>{I0, dI});
      SeriesMat3 Phi = phi_tilde_series(k, y, I);
      Mat3 P = values(Phi) - lambda * frenet_matrix(k[0]);
      Mat3 Ps = coefficient(Phi, 1) - lambda * (frenet_matrix(k.derivative_at(1)) - frenet_matrix(0.0));
      auto kv = [&](double tt) { return kappa(s, tt, 0)[0]; };
      double kt = (kv(t - 2 * dt) - 8 * kv(t - dt) + 8 * kv(t + dt) - kv(t + 2 * dt)) / (12 * dt);
      Mat3 Kt = Mat3::Zero();
      Kt(0, 1) = -kt;
      Kt(1, 2) = -kt;
      Mat3 K = frenet_matrix(k[0]);
      Mat3 E = Ps - Kt + K * P - P * K;
      worst = std::max(worst, frobenius(E));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Congruence curves

namespace {
constexpr int kMaxUpsilonOrder = 16;
}

Hamiltonian::Hamiltonian(CurvatureProfile k, const DiffPoly& p, double v, double lambda)
    : k_(std::move(k)), p_(p), v_(v), lambda_(lambda) {
  if (!in_P(p)) throw NotInP("the normal velocity potential is not in P[u]");
  p_order_ = p.max_order();
  constant_ = p.is_constant();
  DiffPoly d = p;
  for (int j = 0; j <= kMaxUpsilonOrder; ++j) {
    dp_.emplace_back(d);
    d = total_derivative(d);
  }
}

std::vector<double> Hamiltonian::upsilon_jet(double s, int order) const {
  if (order > kMaxUpsilonOrder) throw InvalidInput("upsilon jets are available to order 16");
  std::vector<double> y(static_cast<std::size_t>(order) + 1, 0.0);
  if (constant_) {
    std::vector<double> none;
    y[0] = dp_[0](none);
    return y;
  }
  std::vector<double> kj = k_.jet(s, p_order_ + order);
  for (int j = 0; j <= order; ++j) y[j] = dp_[j](kj);
  return y;
}

double Hamiltonian::integral_term(double s) const {
  if (constant_ || s == 0.0) return 0.0;
  return gauss_legendre(
      [&](double r) {
        auto y = upsilon_jet(r, 3);
        double k = k_.value(r);
        return k * y[3] + 4 * k * k * y[1];
      },
      0.0, s, panels_for(0.0, s, 8.0));
}

SeriesMat3 Hamiltonian::series(double s, int order) const {
  Series x = Series::variable(order + 6, s);
  Series k = k_.series(x);
  Series y = Series::from_derivatives(upsilon_jet(s, order + 6));
  Series y1 = y.derivative(), y3 = y1.derivative().derivative();
  Series dI = k.truncated(order) * y3.truncated(order) + 4.0 * k.truncated(order) * k.truncated(order) * y1.truncated(order);
  Series I = dI.truncated(std::max(order - 1, 0)).integral(integral_term(s)).truncated(order);
  SeriesMat3 Phi = phi_tilde_series(k, y, I);
  Series kk = k.truncated(order);
  double c = lambda_ + v_;
  Phi[0][1] += c * kk;
  Phi[1][2] += c * kk;
  Phi[0][2] -= c;
  Phi[1][0] -= c;
  Phi[2][1] -= c;
  return Phi;
}

Mat3 Hamiltonian::operator()(double s) const { return values(series(s, 0)); }

Mat3 Hamiltonian::derivative(double s) const { return coefficient(series(s, 1), 1); }

double Hamiltonian::congruence_residual(double s) const {
  auto kj = k_.jet(s, 5);
  auto y = upsilon_jet(s, 7);
  return theta(kj, y, integral_term(s)) + (lambda_ + v_) * kj[1];
}

CongruenceData hamiltonian(const CurvatureProfile& k, const DiffPoly& p, double v, double lambda, double tol) {
  Hamiltonian H(k, p, v, lambda);
  Interval w = k.sample_window();
  double worst = 0;
  for (int i = 0; i < 64; ++i) {
    double s = w.lo + (w.hi - w.lo) * (i + 0.5) / 64.0;
    if (k.has_poles() && k.pole_distance(s) < 0.25) continue;
    worst = std::max(worst, std::abs(H.congruence_residual(s)));
  }
  if (!(worst <= tol))
    throw NotCongruence("congruence equation residual " + std::to_string(worst) + " exceeds " + std::to_string(tol));
  Mat3 xi = H(0.0);
  return CongruenceData{std::move(H), xi};
}

LaxResiduals lax_residual(const CongruenceData& data, const std::vector<double>& samples, const FrameField* frame) {
  LaxResiduals out;
  const auto& k = data.H.curvature();
  for (double s : samples) {
    SeriesMat3 Hs = data.H.series(s, 1);
    Mat3 H = values(Hs), dH = coefficient(Hs, 1), K = frenet_matrix(k.value(s));
    out.lax = std::max(out.lax, frobenius(dH - (H * K - K * H)));
  }
  if (frame) {
    for (std::size_t i = 0; i < frame->grid().size(); ++i) {
      const Mat3& F = frame->frames()[i];
      Mat3 C = F * data.H(frame->grid()[i]) * F.inverse();
      out.conservation = std::max(out.conservation, frobenius(C - data.xi));
    }
  }
  return out;
}

std::array<cplx, 3> eigen3(const Mat3& xi) {
  double tr = xi.trace();
  double b = 0.5 * (tr * tr - (xi * xi).trace());
  double det = xi.determinant();
  // t^3 + a t^2 + b t + c
  double a = -tr, c = -det;
  auto poly = [&](cplx t) { return ((t + a) * t + b) * t + c; };
  auto dpoly = [&](cplx t) { return (3.0 * t + 2.0 * a) * t + b; };
  double p = b - a * a / 3.0, q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  cplx D = std::sqrt(cplx(q * q / 4.0 + p * p * p / 27.0));
  cplx w1 = -q / 2.0 + D, w2 = -q / 2.0 - D;
  cplx w = std::abs(w1) >= std::abs(w2) ? w1 : w2;
  cplx u = std::pow(w, 1.0 / 3.0);
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<cplx, 3> roots;
  for (int j = 0; j < 3; ++j) {
    cplx uj = u;
    for (int i = 0; i < j; ++i) uj *= omega;
    cplx vj = std::abs(uj) > 0 ? -p / (3.0 * uj) : cplx(0);
    roots[j] = uj + vj - a / 3.0;
  }
  double scale = std::max({1.0, std::abs(roots[0]), std::abs(roots[1]), std::abs(roots[2])});
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      cplx d = dpoly(r);
      if (std::abs(d) < 1e-300) break;
      r -= poly(r) / d;
    }
    if (std::abs(r.imag()) < 1e-12 * scale) r = cplx(r.real(), 0.0);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(roots[i] - roots[j]) < 1e-8 * scale) throw RepeatedEigenvalue("momentum has a repeated eigenvalue");
  std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
    bool rx = x.imag() == 0.0, ry = y.imag() == 0.0;
    if (rx != ry) return rx;
    if (rx) return x.real() < y.real();
    return x.imag() > y.imag();
  });
  return roots;
}

namespace {

using CSeriesVec3 = std::array<ComplexSeries, 3>;

CSeriesVec3 cross(const CSeriesVec3& x, const CSeriesVec3& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

// Row r of (H - tau) as complex series.
CSeriesVec3 shifted_row(const SeriesMat3& H, int r, cplx tau) {
  CSeriesVec3 row;
  for (int c = 0; c < 3; ++c) {
    row[c] = to_complex(H[r][c]);
    if (c == r) row[c] -= tau;
  }
  return row;
}

CVec3 value(const CSeriesVec3& x) { return CVec3(x[0][0], x[1][0], x[2][0]); }
CVec3 slope(const CSeriesVec3& x) {
  return CVec3(x[0].derivative_at(1), x[1].derivative_at(1), x[2].derivative_at(1));
}

constexpr std::array<std::array<int, 2>, 3> kRowPairs = {{{0, 1}, {0, 2}, {1, 2}}};

struct SAtPoint {
  CMat3 S;
  CMat3 dS;
};

SAtPoint s_matrix(const Hamiltonian& H, double s, const std::array<cplx, 3>& taus,
                  const std::array<std::array<int, 2>, 3>& pairs) {
  SeriesMat3 Hs = H.series(s, 1);
  SAtPoint out;
  for (int j = 0; j < 3; ++j) {
    CSeriesVec3 Sj = cross(shifted_row(Hs, pairs[j][0], taus[j]), shifted_row(Hs, pairs[j][1], taus[j]));
    out.S.col(j) = value(Sj);
    out.dS.col(j) = slope(Sj);
  }
  return out;
}

std::array<cplx, 3> r_values(const Hamiltonian& H, double s, const std::array<cplx, 3>& taus,
                             const std::array<std::array<int, 2>, 3>& pairs, double* nonprop = nullptr) {
  SAtPoint P = s_matrix(H, s, taus, pairs);
  CMat3 K = frenet_matrix(H.curvature().value(s)).cast<cplx>();
  CMat3 W = P.dS + K * P.S;
  std::array<cplx, 3> r;
  for (int j = 0; j < 3; ++j) {
    CVec3 Sj = P.S.col(j), Wj = W.col(j);
    r[j] = Sj.dot(Wj) / Sj.squaredNorm();  // Eigen's dot conjugates the first argument
    if (nonprop) *nonprop = std::max(*nonprop, (Wj - r[j] * Sj).norm() / Sj.norm());
  }
  return r;
}

}  // namespace

QuadratureFrame quadrature_integrate(const CongruenceData& data, const std::vector<double>& grid,
                                     double panels_per_unit) {
  const Hamiltonian& H = data.H;
  QuadratureFrame out;
  out.grid = sorted_unique(grid);
  out.taus = eigen3(data.xi);

  // Row pairs: the pair with the largest |S_j(0)|, fixed for the run.
  Mat3 H0 = H(0.0);
  SeriesMat3 H0s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) H0s[i][j] = Series(0, H0(i, j));
  double ref = H0.norm() + std::abs(out.taus[2]);
  for (int j = 0; j < 3; ++j) {
    double best = -1;
    for (const auto& pr : kRowPairs) {
      double n = value(cross(shifted_row(H0s, pr[0], out.taus[j]), shifted_row(H0s, pr[1], out.taus[j]))).norm();
      if (n > best) {
        best = n;
        out.row_pairs[j] = pr;
      }
    }
    if (best < 1e-12 * ref * ref) throw SingularS("every row pair gives S_j(0) = 0");
  }

  SAtPoint P0 = s_matrix(H, 0.0, out.taus, out.row_pairs);
  out.M0inv = P0.S;

  auto log_rho_step = [&](double a, double b) {
    std::array<cplx, 3> acc{};
    int panels = panels_for(a, b, panels_per_unit);
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      double lo = a + p * h;
      std::array<cplx, 3> part{};
      for (int i = 0; i < 8; ++i) {
        auto r = r_values(H, lo + 0.5 * h * (1 + detail::kGL8x[i]), out.taus, out.row_pairs);
        for (int j = 0; j < 3; ++j) part[j] += detail::kGL8w[i] * r[j];
      }
      for (int j = 0; j < 3; ++j) acc[j] += 0.5 * h * part[j];
    }
    return acc;
  };

  std::size_t n = out.grid.size();
  std::vector<std::array<cplx, 3>> logrho(n);
  auto first_up = static_cast<std::ptrdiff_t>(std::lower_bound(out.grid.begin(), out.grid.end(), 0.0) - out.grid.begin());
  std::array<cplx, 3> acc{};
  double s = 0.0;
  for (auto i = first_up; i < static_cast<std::ptrdiff_t>(n); ++i) {
    auto d = log_rho_step(s, out.grid[i]);
    for (int j = 0; j < 3; ++j) acc[j] += d[j];
    logrho[i] = acc;
    s = out.grid[i];
  }
  acc = {};
  s = 0.0;
  for (auto i = first_up - 1; i >= 0; --i) {
    auto d = log_rho_step(s, out.grid[i]);
    for (int j = 0; j < 3; ++j) acc[j] += d[j];
    logrho[i] = acc;
    s = out.grid[i];
  }

  out.frames.resize(n);
  out.r.resize(n);
  out.rho.resize(n);
  out.S.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double si = out.grid[i];
    SAtPoint P = s_matrix(H, si, out.taus, out.row_pairs);
    double colprod = P.S.col(0).norm() * P.S.col(1).norm() * P.S.col(2).norm();
    if (!(std::abs(P.S.determinant()) > 1e-12 * colprod)) throw SingularS("S is singular at s = " + std::to_string(si));
    out.r[i] = r_values(H, si, out.taus, out.row_pairs, &out.max_nonproportional);
    CVec3 rho;
    for (int j = 0; j < 3; ++j) {
      out.rho[i][j] = std::exp(logrho[i][j]);
      rho[j] = out.rho[i][j];
    }
    out.S[i] = P.S;
    CMat3 F = P0.S * rho.asDiagonal() * P.S.inverse();
    out.max_imag = std::max(out.max_imag, F.imag().cwiseAbs().maxCoeff());
    out.frames[i] = F.real();
  }
  if (out.max_imag > 1e-6)
    throw NonRealFrame("quadrature frame has imaginary part " + std::to_string(out.max_imag));
  return out;
}

// ---------------------------------------------------------------------------
// Cnoidal example

CnoidalCongruence::CnoidalCongruence(double m) : m_(m), v_(-(1.0 - m + m * m)) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("cnoidal congruence needs 0 < m < 1");
  ProfileParams pp;
  pp.m = m;
  k_ = make_profile(Family::CnA, pp);
  xi_ << 1.5 * (m + 1), 9, 2.25 * (m - 1) * (m - 1), 0, -3 * (m + 1), 9, 9, 0, 1.5 * (m + 1);
  if (std::abs(delta()) < 1e-10) throw RepeatedEigenvalue("delta vanishes");
  taus_ = eigen3(xi_);
}

double CnoidalCongruence::delta() const { return -31 + m_ * (6 + m_ * (7 + (-6 + m_) * m_)); }

std::array<cplx, 3> CnoidalCongruence::closed_form_taus() const {
  double m = m_;
  cplx n1 = 3.0 * (std::sqrt(cplx(-3.0 * delta())) - 9.0);
  double n2 = (2 - m) * (m + 1) * (2 * m - 1), n3 = (m - 1) * m + 1;
  cplx c1 = std::pow(n1 + n2, 1.0 / 3.0), c2 = c1 * c1;
  const double r2 = std::cbrt(2.0), r4 = std::cbrt(4.0);
  const cplx i3(0.0, std::sqrt(3.0));
  cplx t0 = -3.0 * (r2 * c2 + 2.0 * n3) / (r4 * c1);
  cplx t1 = 3.0 * (r2 * (1.0 - i3) * c2 + 2.0 * (1.0 + i3) * n3) / (2.0 * r4 * c1);
  cplx t2 = 3.0 * (r2 * (1.0 + i3) * c2 + 2.0 * (1.0 - i3) * n3) / (2.0 * r4 * c1);
  return {t0, t1, t2};
}

Mat3 CnoidalCongruence::H(double s) const {
  JacobiValues J = jacobi(s, m_);
  double m = m_, dn2 = J.dn * J.dn, q = m * J.cn * J.dn * J.sn;
  double h11 = 1.5 * (3 * dn2 + m - 2);
  double h12 = 9 - 9 * q;
  double h13 = 2.25 * (-3 * dn2 * dn2 - 2 * (m - 2) * dn2 + m * m);
  double h23 = 9 * q + 9;
  Mat3 out;
  out << h11, h12, h13, 0, -2 * h11, h23, 9, 0, h11;
  return out;
}

CVec3 CnoidalCongruence::S(int j, double s) const {
  JacobiValues J = jacobi(s, m_);
  cplx tau = taus_.at(static_cast<std::size_t>(j));
  cplx X = 9 * J.dn * J.dn + 3 * (m_ - 2) + tau;
  return CVec3(-0.5 * (X - 3.0 * tau) * X, 81 * (m_ * J.cn * J.dn * J.sn + 1), 9.0 * X);
}

cplx CnoidalCongruence::r(int j, double s) const {
  JacobiValues J = jacobi(s, m_);
  cplx tau = taus_.at(static_cast<std::size_t>(j));
  return (9 - 9 * m_ * J.cn * J.dn * J.sn) / (9 * J.dn * J.dn + 3 * (m_ - 2) + tau);
}

cplx CnoidalCongruence::rho(int j, double s) const {
  JacobiValues J = jacobi(s, m_);
  cplx tau = taus_.at(static_cast<std::size_t>(j));
  cplx X = 9 * J.dn * J.dn + 3 * (m_ - 2) + tau;
  cplx den = 3 * (m_ + 1) + tau;
  cplx Pi = incomplete_Pi(9 * m_ / den, J.am, m_);
  return std::sqrt(2.0) * std::sqrt(X) * std::exp(9.0 * Pi / den);
}

CVec3 CnoidalCongruence::inverse_S_first_column() const {
  CVec3 out;
  for (int j = 0; j < 3; ++j) {
    cplx prod = 1.0;
    for (int h = 0; h < 3; ++h)
      if (h != j) prod *= taus_[j] - taus_[h];
    out[j] = 1.0 / prod;
  }
  return out;
}

CMat3 CnoidalCongruence::M_tilde() const {
  CMat3 M;
  double m = m_;
  for (int j = 0; j < 3; ++j) {
    cplx tau = taus_[j];
    cplx root = std::sqrt(6 * (m + 1) + 2.0 * tau);
    M(0, j) = (-9 * (m + 1) * (m + 1) + 3 * (m + 1) * tau + 2.0 * tau * tau) / (2.0 * root);
    M(1, j) = 81.0 / root;
    M(2, j) = 9.0 * std::sqrt(3 * (m + 1) + tau) / std::sqrt(2.0);
  }
  return M;
}

CVec3 CnoidalCongruence::curve(double s) const {
  CMat3 M = M_tilde();
  CVec3 w = inverse_S_first_column();
  CVec3 out = CVec3::Zero();
  for (int k = 0; k < 3; ++k) out += M.col(k) * (rho(k, s) * w[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Motion

Mat3 matrix_exp(const Mat3& A) { return A.exp(); }

std::vector<std::vector<Vec3>> motion_evolve(const Mat3& xi, double v, const std::function<Vec3(double)>& x,
                                             const std::vector<double>& s_grid, const std::vector<double>& t_grid) {
  std::vector<std::vector<Vec3>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    Mat3 E = matrix_exp(t * xi);
    std::vector<Vec3> row;
    row.reserve(s_grid.size());
    for (double s : s_grid) {
      Vec3 y = E * x(s + v * t);
      row.push_back(y / y.norm());
    }
    out.push_back(std::move(row));
  }
  return out;
}

StructureResiduals motion_structure_residual(const CongruenceData& data, const FrameField& frame,
                                             const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                                             double h) {
  const double v = data.H.v();
  const auto& k = data.H.curvature();
  auto F = [&](double s, double t) -> Mat3 { return matrix_exp(t * data.xi) * frame.frame_at(s + v * t); };
  auto fd = [h](const Mat3& m2, const Mat3& m1, const Mat3& p1, const Mat3& p2) -> Mat3 {
    return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h);
  };
  StructureResiduals out;
  for (double t : t_grid) {
    for (double s : s_grid) {
      double u = s + v * t;
      Mat3 F0 = F(s, t);
      Mat3 K = frenet_matrix(k.value(u));
      Mat3 Fs = fd(F(s - 2 * h, t), F(s - h, t), F(s + h, t), F(s + 2 * h, t));
      Mat3 Ft = fd(F(s, t - 2 * h), F(s, t - h), F(s, t + h), F(s, t + 2 * h));
      double scale = std::max(1.0, frobenius(F0));
      out.ds = std::max(out.ds, frobenius(Fs - F0 * K) / scale);
      out.dt = std::max(out.dt, frobenius(Ft - F0 * (data.H(u) + v * K)) / scale);
    }
  }
  return out;
}

}  // namespace kkflows
