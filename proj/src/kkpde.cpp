#include "kkflows/kkpde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "kkflows/errors.hpp"
#include "kkflows/fftw_lock.hpp"
#include "kkflows/hierarchy.hpp"
#include "kkflows/quadrature.hpp"

namespace kkflows {

namespace {

using cplx = std::complex<double>;

// Real-to-half-complex transforms of one fixed size. backward() divides by n.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n), real_(n), spec_(n / 2 + 1) {
    const int in = static_cast<int>(n);
    auto* sp = reinterpret_cast<fftw_complex*>(spec_.data());
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(in, real_.data(), sp, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(in, sp, real_.data(), FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t modes() const { return spec_.size(); }

  void forward(const std::vector<double>& in, std::vector<cplx>& out) {
    std::copy(in.begin(), in.end(), real_.begin());
    fftw_execute(fwd_);
    out = spec_;
  }
  void backward(const std::vector<cplx>& in, std::vector<double>& out) {
    std::copy(in.begin(), in.end(), spec_.begin());
    fftw_execute(bwd_);
    out.resize(n_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
  }

 private:
  std::size_t n_;
  std::vector<double> real_;
  std::vector<cplx> spec_;
  fftw_plan fwd_, bwd_;
};

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> xi(n / 2 + 1);
  for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
  return xi;
}

// (i xi)^j, with the Nyquist mode dropped for j >= 1.
cplx derivative_factor(double xi, int j, bool nyquist) {
  if (j == 0) return 1.0;
  if (nyquist) return 0.0;
  return std::pow(cplx(0.0, xi), j);
}

double tail_of(const std::vector<cplx>& v, std::size_t n) {
  double peak = 0, tail = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    double a = std::abs(v[k]);
    peak = std::max(peak, a);
    if (6 * k > n && 3 * k <= n) tail = std::max(tail, a);
  }
  return peak > 0 ? tail / peak : 0.0;
}

double sup_norm(const std::vector<double>& u) {
  double out = 0;
  for (double x : u) out = std::max(out, std::abs(x));
  return out;
}

const HierarchyLevel& cached_level(int n) {
  static std::mutex mutex;
  static std::map<int, HierarchyLevel> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, generate_hierarchy(n)[static_cast<std::size_t>(n)]).first;
  return it->second;
}

double five_point(double m2, double m1, double p1, double p2, double h) {
  return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h);
}

}  // namespace

void validate_grid(const Grid1D& grid) {
  std::size_t n = grid.n();
  if (n < 64 || (n & (n - 1)) != 0) throw InvalidInput("grid size must be a power of two >= 64");
  if (!(grid.length > 0) || !std::isfinite(grid.length)) throw InvalidInput("grid length must be positive");
  for (double v : grid.values)
    if (!std::isfinite(v)) throw InvalidInput("grid values must be finite");
}

Grid1D sample_grid(const std::function<double(double)>& f, std::size_t n, double length) {
  Grid1D g{length, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) g.values[i] = f(g.point(i));
  validate_grid(g);
  return g;
}

Grid1D sample_profile(const CurvatureProfile& k, std::size_t n) {
  if (!(k.period() > 0) || k.has_poles()) throw InvalidInput("sampling needs a periodic profile without poles");
  return sample_grid([&](double s) { return k.value(s); }, n, k.period());
}

std::vector<std::vector<double>> spectral_derivatives(const Grid1D& grid, int order) {
  validate_grid(grid);
  const std::size_t n = grid.n();
  Fft fft(n);
  std::vector<cplx> v, w(fft.modes());
  fft.forward(grid.values, v);
  auto xi = wavenumbers(n, grid.length);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(order + 1));
  for (int j = 0; j <= order; ++j) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = derivative_factor(xi[k], j, k == n / 2) * v[k];
    fft.backward(w, out[static_cast<std::size_t>(j)]);
  }
  return out;
}

double spectral_tail(const Grid1D& grid) {
  validate_grid(grid);
  Fft fft(grid.n());
  std::vector<cplx> v;
  fft.forward(grid.values, v);
  return tail_of(v, grid.n());
}

double Trajectory::mean_drift() const {
  if (mean.empty()) return 0;
  double ref = std::max(std::abs(mean[0]), sup_norm(snapshots[0]));
  double worst = 0;
  for (double m : mean) worst = std::max(worst, std::abs(m - mean[0]));
  return ref > 0 ? worst / ref : worst;
}

double Trajectory::h1_drift() const {
  if (h1.empty()) return 0;
  double worst = 0;
  for (double h : h1) worst = std::max(worst, std::abs(h - h1[0]));
  return h1[0] != 0 ? worst / std::abs(h1[0]) : worst;
}

Trajectory evolve_kk(const Grid1D& u0, int order, double T, double dt, const EvolveOptions& o) {
  validate_grid(u0);
  if (order != 1 && order != 2) throw InvalidInput("evolve_kk supports orders 1 and 2");
  if (!(T >= 0) || !(dt > 0) || !std::isfinite(T)) throw InvalidInput("need T >= 0 and dt > 0");
  if (o.snapshots < 1) throw InvalidInput("need at least one snapshot");

  const std::size_t n = u0.n();
  const double L = u0.length;
  Fft fft(n);
  const std::size_t modes = fft.modes();
  auto xi = wavenumbers(n, L);

  // Split kk_rhs into its linear part and a nonlinear flux q with D q = rest.
  DiffPoly rhs = kk_rhs(order), linear;
  for (const auto& [m, c] : rhs.terms())
    if (m.degree() == 1) linear += DiffPoly::term(c, m);
  CompiledPoly flux(antiderivative(rhs - linear));
  const int flux_order = std::max(flux.max_order(), 0);

  std::vector<cplx> Lk(modes, 0.0);
  for (const auto& [m, c] : linear.terms()) {
    int j = m.max_order();
    for (std::size_t k = 0; k < modes; ++k) Lk[k] -= c.get_d() * derivative_factor(xi[k], j, k == n / 2);
  }
  std::vector<double> mask(modes);
  for (std::size_t k = 0; k < modes; ++k) mask[k] = 3 * k <= n ? 1.0 : 0.0;

  long steps_per = std::max(1L, static_cast<long>(std::ceil(T / (dt * o.snapshots) - 1e-9)));
  long steps = steps_per * o.snapshots;
  double h = T > 0 ? T / static_cast<double>(steps) : 0.0;

  // Contour-integral ETDRK4 coefficients.
  constexpr int kContour = 32;
  std::vector<cplx> E(modes), E2(modes), Q(modes), f1(modes), f2(modes), f3(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    cplx z = h * Lk[k];
    E[k] = std::exp(z);
    E2[k] = std::exp(z / 2.0);
    cplx q = 0, a = 0, b = 0, c = 0;
    for (int j = 0; j < kContour; ++j) {
      cplx r = z + std::exp(cplx(0.0, 2.0 * std::numbers::pi * (j + 0.5) / kContour));
      cplx er = std::exp(r), r3 = r * r * r;
      q += (std::exp(r / 2.0) - 1.0) / r;
      a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      b += (2.0 + r + er * (r - 2.0)) / r3;
      c += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    Q[k] = h * q / double(kContour);
    f1[k] = h * a / double(kContour);
    f2[k] = h * b / double(kContour);
    f3[k] = h * c / double(kContour);
  }

  std::vector<std::vector<double>> jets(static_cast<std::size_t>(flux_order + 1));
  std::vector<double> qv(n), jet(static_cast<std::size_t>(flux_order + 1));
  std::vector<cplx> w(modes), qhat;
  double t_now = 0;
  auto nonlinear = [&](const std::vector<cplx>& v, std::vector<cplx>& out) {
    for (int j = 0; j <= flux_order; ++j) {
      for (std::size_t k = 0; k < modes; ++k) w[k] = derivative_factor(xi[k], j, k == n / 2) * v[k];
      fft.backward(w, jets[static_cast<std::size_t>(j)]);
    }
    double sup = sup_norm(jets[0]);
    if (!(sup <= o.blowup)) throw BlowUp(t_now);
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j <= flux_order; ++j) jet[static_cast<std::size_t>(j)] = jets[static_cast<std::size_t>(j)][i];
      qv[i] = flux(jet);
    }
    fft.forward(qv, qhat);
    out.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) out[k] = -cplx(0.0, xi[k]) * qhat[k] * mask[k];
  };

  Trajectory tr;
  tr.order = order;
  tr.length = L;
  tr.dt = h;
  tr.steps = steps;
  std::vector<cplx> v;
  fft.forward(u0.values, v);
  v[n / 2] = 0.0;
  double tail0 = tail_of(v, n);
  if (tail0 > o.initial_tail) throw ResolutionLoss(0.0, tail0);

  auto record = [&](double t) {
    std::vector<double> u;
    fft.backward(v, u);
    tr.times.push_back(t);
    tr.mean.push_back(v[0].real() / static_cast<double>(n));
    double sq = 0;
    for (double x : u) sq += x * x;
    tr.h1.push_back(4.0 * sq * L / static_cast<double>(n));
    tr.snapshots.push_back(std::move(u));
  };
  record(0.0);
  if (T == 0) return tr;

  std::vector<cplx> Nv, Na, Nb, Nc, a(modes), b(modes), c(modes);
  for (long step = 1; step <= steps; ++step) {
    t_now = (step - 1) * h;
    nonlinear(v, Nv);
    for (std::size_t k = 0; k < modes; ++k) a[k] = E2[k] * v[k] + Q[k] * Nv[k];
    nonlinear(a, Na);
    for (std::size_t k = 0; k < modes; ++k) b[k] = E2[k] * v[k] + Q[k] * Na[k];
    nonlinear(b, Nb);
    for (std::size_t k = 0; k < modes; ++k) c[k] = E2[k] * a[k] + Q[k] * (2.0 * Nb[k] - Nv[k]);
    nonlinear(c, Nc);
    for (std::size_t k = 0; k < modes; ++k)
      v[k] = E[k] * v[k] + f1[k] * Nv[k] + 2.0 * f2[k] * (Na[k] + Nb[k]) + f3[k] * Nc[k];
    if (o.check_every > 0 && step % o.check_every == 0) {
      double tail = tail_of(v, n);
      if (!(tail <= o.tail_tolerance)) throw ResolutionLoss(step * h, tail);
    }
    if (step % steps_per == 0) record(step * h);
  }
  return tr;
}

VelocityEstimate measure_velocity(const Trajectory& tr) {
  if (tr.snapshots.size() < 2) throw InvalidInput("velocity needs at least two snapshots");
  const std::size_t n = tr.snapshots[0].size();
  const double L = tr.length, dx = L / static_cast<double>(n);
  Fft fft(n);
  auto xi = wavenumbers(n, L);
  std::vector<cplx> v0, vi, W(fft.modes());
  fft.forward(tr.snapshots[0], v0);

  VelocityEstimate out;
  double prev = 0;
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    fft.forward(tr.snapshots[i], vi);
    for (std::size_t k = 0; k < W.size(); ++k) W[k] = k == n / 2 ? 0.0 : vi[k] * std::conj(v0[k]);
    std::vector<double> corr;
    fft.backward(W, corr);
    std::size_t best = static_cast<std::size_t>(std::max_element(corr.begin(), corr.end()) - corr.begin());
    double d = static_cast<double>(best) * dx;
    for (int it = 0; it < 30; ++it) {
      double c1 = 0, c2 = 0;
      for (std::size_t k = 1; k < W.size(); ++k) {
        cplx e = W[k] * std::exp(cplx(0.0, xi[k] * d));
        c1 += -2.0 * xi[k] * e.imag();
        c2 += -2.0 * xi[k] * xi[k] * e.real();
      }
      if (c2 >= 0) break;
      double step = std::clamp(-c1 / c2, -dx, dx);
      d += step;
      if (std::abs(step) < 1e-14 * L) break;
    }
    if (i > 0) d += L * std::round((prev - d) / L);
    prev = d;
    out.shifts.push_back(d);
  }
  // Least-squares line through (t, shift).
  const double m = static_cast<double>(tr.times.size());
  double st = 0, sd = 0, stt = 0, std_ = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    st += tr.times[i];
    sd += out.shifts[i];
    stt += tr.times[i] * tr.times[i];
    std_ += tr.times[i] * out.shifts[i];
  }
  double slope = (m * std_ - st * sd) / (m * stt - st * st);
  double icpt = (sd - slope * st) / m;
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    out.fit_residual = std::max(out.fit_residual, std::abs(out.shifts[i] - icpt - slope * tr.times[i]));
  out.velocity = -slope;
  return out;
}

JetFunction jet_function(const CurvatureProfile& k) {
  return [k](double s, int order) { return k.jet(s, order); };
}

double theta_numeric(const JetFunction& phi, const JetFunction& u, double s) {
  double I = 0;
  if (s != 0.0) {
    auto integrand = [&](double r) {
      double u0 = u(r, 0)[0];
      auto p = phi(r, 3);
      return u0 * p[3] + 4 * u0 * u0 * p[1];
    };
    int panels = panels_for(0.0, s, 2.0);
    double prev = gauss_legendre(integrand, 0.0, s, panels);
    for (int it = 0; it < 12; ++it) {
      panels *= 2;
      I = gauss_legendre(integrand, 0.0, s, panels);
      if (std::abs(I - prev) <= 1e-10 * std::max(1.0, std::abs(I))) break;
      prev = I;
    }
  }
  return theta(u(s, 5), phi(s, 7), I);
}

JetFunction potential_jets(const DiffPoly& p, const JetFunction& u) {
  auto derivs = std::make_shared<std::vector<CompiledPoly>>();
  auto base = std::make_shared<std::vector<DiffPoly>>(1, p);
  auto mutex = std::make_shared<std::mutex>();
  return [derivs, base, mutex, u](double s, int order) {
    std::vector<CompiledPoly> local;
    {
      std::lock_guard lock(*mutex);
      while (static_cast<int>(base->size()) <= order) base->push_back(total_derivative(base->back()));
      while (derivs->size() < base->size()) derivs->emplace_back((*base)[derivs->size()]);
      local.assign(derivs->begin(), derivs->begin() + order + 1);
    }
    int need = 0;
    for (const auto& c : local) need = std::max(need, c.max_order());
    auto jet = u(s, need);
    std::vector<double> out(static_cast<std::size_t>(order + 1));
    for (int j = 0; j <= order; ++j) out[static_cast<std::size_t>(j)] = local[static_cast<std::size_t>(j)](jet);
    return out;
  };
}

double prop1_numeric_residual(int n, const JetFunction& u, double s) {
  const HierarchyLevel& level = cached_level(n);
  DiffPoly rhs = kk_rhs(n);
  DiffPoly G = op_S_integral(level.v);
  int need = std::max({rhs.max_order(), G.max_order(), 1});
  auto js = u(s, need);
  auto j0 = u(0.0, std::max(G.max_order(), 0));
  double th = theta_numeric(potential_jets(level.v, u), u, s);
  double bridge = js[1] / 9.0 * eval_on_jet(G, j0);
  return eval_on_jet(rhs, js) - (th + bridge + level.lambda.get_d() * js[1]);
}

double curvature_flow_residual(const Trajectory& kappa, const DiffPoly& p, double lambda) {
  if (!in_P(p)) throw NotInP("curvature_flow_residual: potential is not in P");
  const std::size_t m = kappa.times.size();
  if (m < 5) throw InvalidInput("curvature_flow_residual needs at least five snapshots");
  const double ht = kappa.times[1] - kappa.times[0];
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(kappa.times[i] - kappa.times[i - 1] - ht) > 1e-9 * std::max(1.0, std::abs(ht)))
      throw InvalidInput("curvature_flow_residual needs equally spaced snapshots");
  CompiledPoly S(op_S(p));
  const int order = std::max(S.max_order(), 1);
  const std::size_t n = kappa.snapshots[0].size();
  double worst = 0;
  std::vector<double> jet(static_cast<std::size_t>(order + 1));
  for (std::size_t i = 2; i + 2 < m; ++i) {
    auto d = spectral_derivatives(kappa.grid(i), order);
    for (std::size_t x = 0; x < n; ++x) {
      double kt = five_point(kappa.snapshots[i - 2][x], kappa.snapshots[i - 1][x], kappa.snapshots[i + 1][x],
                             kappa.snapshots[i + 2][x], ht);
      for (int j = 0; j <= order; ++j) jet[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(j)][x];
      worst = std::max(worst, std::abs(kt + S(jet) + lambda * jet[1]));
    }
  }
  return worst;
}

double curvature_flow_residual(const SpaceTimeJet& kappa, const DiffPoly& p, double lambda,
                               const std::vector<double>& s_grid, const std::vector<double>& t_grid, double dt) {
  if (!in_P(p)) throw NotInP("curvature_flow_residual: potential is not in P");
  CompiledPoly S(op_S(p));
  const int order = std::max(S.max_order(), 1);
  double worst = 0;
  for (double t : t_grid) {
    for (double s : s_grid) {
      double kt = five_point(kappa(s, t - 2 * dt, 0)[0], kappa(s, t - dt, 0)[0], kappa(s, t + dt, 0)[0],
                             kappa(s, t + 2 * dt, 0)[0], dt);
      auto jet = kappa(s, t, order);
      worst = std::max(worst, std::abs(kt + S(jet) + lambda * jet[1]));
    }
  }
  return worst;
}

}  // namespace kkflows
