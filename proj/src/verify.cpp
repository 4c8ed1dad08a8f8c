#include "kkflows/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>

#include "kkflows/elliptic.hpp"
#include "kkflows/errors.hpp"
#include "kkflows/hierarchy.hpp"
#include "kkflows/projgeom.hpp"
#include "kkflows/quadrature.hpp"
#include "kkflows/waves.hpp"

namespace kkflows {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Mat3& A) { return A.cwiseAbs().maxCoeff(); }

const std::vector<HierarchyLevel>& levels() {
  static const std::vector<HierarchyLevel> L = generate_hierarchy(6);
  return L;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

class Suite {
 public:
  Suite(std::string name, const Tolerances& tol) : name_(std::move(name)), tol_(tol) {}

  // Passes when the symbolic residual has no terms.
  void exact(const std::string& check, const std::function<DiffPoly()>& residual) {
    run(check, 0.0, true, [&] {
      auto r = residual();
      return static_cast<double>(r.size());
    });
  }

  void numeric(const std::string& check, double tolerance, const std::function<double()>& residual) {
    run(check, tol_.get(name_, tolerance), false, residual);
  }

  // Counts and other discrete checks ignore overrides.
  void fixed(const std::string& check, double tolerance, const std::function<double()>& residual) {
    run(check, tolerance, false, residual);
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  void run(const std::string& check, double tolerance, bool exact, const std::function<double()>& f) {
    CheckResult r;
    r.suite = name_;
    r.name = check;
    r.tolerance = tolerance;
    r.exact = exact;
    auto start = std::chrono::steady_clock::now();
    try {
      r.residual = f();
      r.pass = exact ? r.residual == 0.0 : (std::isfinite(r.residual) && r.residual <= tolerance);
      if (exact && !r.pass) r.detail = format_double(r.residual) + " surviving terms";
    } catch (const std::exception& e) {
      r.residual = std::nan("");
      r.pass = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results_.push_back(std::move(r));
  }

  std::string name_;
  const Tolerances& tol_;
  std::vector<CheckResult> results_;
};

CurvatureProfile profile(Family f, double m) {
  ProfileParams p;
  p.m = m;
  return make_profile(f, p);
}

// int_a^b f by composite Gauss-Legendre, doubling panels until two estimates agree.
template <typename F>
auto converged_quadrature(F&& f, double a, double b) -> decltype(f(a)) {
  int panels = 4;
  auto prev = gauss_legendre(f, a, b, panels);
  for (int i = 0; i < 12; ++i) {
    panels *= 2;
    auto next = gauss_legendre(f, a, b, panels);
    if (std::abs(next - prev) <= 1e-15 * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  return prev;
}

std::vector<CheckResult> suite_lemma1(const Tolerances& tol) {
  Suite s("lemma1", tol);
  const auto& L = levels();
  s.exact("q = 1", [] { return verify_lemma1(DiffPoly(1L)).residual; });
  for (int n = 0; n <= 2; ++n)
    s.exact("q = q_" + std::to_string(n), [&, n] { return verify_lemma1(L[static_cast<std::size_t>(n)].q).residual; });
  return s.take();
}

std::vector<CheckResult> suite_prop1(const Tolerances& tol) {
  Suite s("prop1", tol);
  const auto& L = levels();
  for (int n = 1; n <= 4; ++n)
    s.exact("S(v_n) + lambda_n u_1 = op_D(h_n), n = " + std::to_string(n),
            [&, n] { return verify_prop1(L[static_cast<std::size_t>(n)]).residual; });
  s.exact("lambda_2 = -27", [&] { return DiffPoly(L[2].lambda) - DiffPoly(-27L); });
  s.exact("lambda_4 = 729", [&] { return DiffPoly(L[4].lambda) - DiffPoly(729L); });
  return s.take();
}

std::vector<CheckResult> suite_hamiltonian(const Tolerances& tol) {
  Suite s("hamiltonian", tol);
  const auto& L = levels();
  for (const auto& level : L) {
    std::string n = std::to_string(level.n);
    s.exact("euler(p_n) = h_n, n = " + n, [&] { return euler(level.p) - level.h; });
    s.exact("D q_n = op_D(h_n), n = " + n, [&] { return total_derivative(level.q) - op_D(level.h); });
  }
  return s.take();
}

std::vector<CheckResult> suite_elliptic(const Tolerances& tol, std::uint64_t seed) {
  Suite s("elliptic", tol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> M(0.0, 0.95), Phi(-3.0, 3.0), U(-6.0, 6.0), Z(-2.0, 0.8), Zi(-1.0, 1.0);
  const int n = 100;
  auto integrand_F = [](double m) { return [m](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); }; };

  s.numeric("K(m) against quadrature", 1e-10, [&] {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double m = M(rng);
      worst = std::max(worst, std::abs(complete_K(m) - converged_quadrature(integrand_F(m), 0.0, kPi / 2)));
    }
    return worst;
  });
  s.numeric("F(phi|m) against quadrature", 1e-10, [&] {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double m = M(rng), phi = Phi(rng);
      worst = std::max(worst, std::abs(incomplete_F(phi, m) - converged_quadrature(integrand_F(m), 0.0, phi)));
    }
    return worst;
  });
  s.numeric("Pi(zeta; phi|m) against quadrature", 1e-10, [&] {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double m = M(rng), phi = Phi(rng);
      cplx zeta(Z(rng), i % 2 ? Zi(rng) : 0.0);
      auto f = [&](double t) {
        double s2 = std::sin(t) * std::sin(t);
        return 1.0 / ((1.0 - zeta * s2) * std::sqrt(1.0 - m * s2));
      };
      worst = std::max(worst, std::abs(incomplete_Pi(zeta, phi, m) - converged_quadrature(f, 0.0, phi)));
    }
    return worst;
  });
  s.numeric("F(am(u|m)|m) = u", 1e-10, [&] {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double m = M(rng), u = U(rng);
      worst = std::max(worst, std::abs(converged_quadrature(integrand_F(m), 0.0, jacobi_am(u, m)) - u));
    }
    return worst;
  });
  s.numeric("Jacobi identities", 1e-12, [&] {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double m = M(rng), u = U(rng), v = U(rng);
      auto a = jacobi(u, m), b = jacobi(v, m), c = jacobi(u + v, m);
      worst = std::max(worst, std::abs(a.sn * a.sn + a.cn * a.cn - 1.0));
      worst = std::max(worst, std::abs(a.dn * a.dn + m * a.sn * a.sn - 1.0));
      double add = (a.sn * b.cn * b.dn + b.sn * a.cn * a.dn) / (1.0 - m * a.sn * a.sn * b.sn * b.sn);
      worst = std::max(worst, std::abs(c.sn - add));
    }
    return worst;
  });
  s.numeric("wp'^2 = 4 wp^3 - g2 wp - g3", 1e-10, [&] {
    std::uniform_real_distribution<double> G(-3.0, 3.0), X(0.05, 1.5);
    double worst = 0;
    int checked = 0;
    while (checked < n) {
      double g2 = G(rng), g3 = G(rng);
      if (std::abs(-g2 * g2 * g2 + 27 * g3 * g3) < 1e-3) continue;
      auto lat = weierstrass_lattice(g2, g3);
      double x = std::min(X(rng), 1.8 * lat.real_half_period);
      if (x < 0.05) continue;
      Series p = weierstrass_p_series(Series::variable(1, x), lat);
      double w = p.derivative_at(0), dw = p.derivative_at(1);
      double rhs = 4 * w * w * w - g2 * w - g3;
      worst = std::max(worst, std::abs(dw * dw - rhs) / std::max(1.0, std::abs(4 * w * w * w)));
      ++checked;
    }
    return worst;
  });
  return s.take();
}

std::vector<CheckResult> suite_waves(const Tolerances& tol, std::uint64_t seed) {
  Suite s("waves", tol);
  const Family type_a[] = {Family::CnA, Family::NsA, Family::CscA, Family::CothA, Family::SechA};
  const Family type_b[] = {Family::CnB, Family::NsB, Family::CscB, Family::CothB, Family::SechB};
  for (double m : {0.1, 0.5, 0.9}) {
    for (const auto* list : {type_a, type_b}) {
      std::string eq = list == type_a ? "k''' + 8 k k'" : "k''' + k k'";
      for (int i = 0; i < 5; ++i) {
        Family f = list[i];
        s.numeric(eq + ", " + family_name(f) + ", m = " + format_double(m), 1e-9,
                  [&] { return ode_residual(profile(f, m), 1000, seed); });
      }
    }
  }
  return s.take();
}

std::vector<CheckResult> suite_stationary(const Tolerances& tol, std::uint64_t seed) {
  Suite s("stationary", tol);
  for (double m : {0.1, 0.5, 0.9}) {
    s.numeric("cnA velocity + 1 - m + m^2, m = " + format_double(m), 1e-14,
              [&] { return std::abs(profile(Family::CnA, m).velocity() + (1 - m + m * m)); });
    s.numeric("|N(k) - v k'| for cnA, m = " + format_double(m), 1e-7,
              [&] { return k1_traveling_residual(profile(Family::CnA, m), 1000, seed); });
  }
  return s.take();
}

std::vector<CheckResult> suite_sextatic(const Tolerances& tol) {
  Suite s("sextatic", tol);
  std::vector<double> r;
  s.fixed("six roots on [0, 2 pi)", 0.0, [&] {
    r = exp_cos_sextatic_points();
    return std::abs(static_cast<double>(r.size()) - 6.0);
  });
  if (r.size() != 6) return s.take();
  s.numeric("root at 0", 1e-10, [&] { return std::abs(r[0]); });
  s.numeric("root at pi", 1e-10, [&] { return std::abs(r[3] - kPi); });
  s.numeric("reflection t -> 2 pi - t", 1e-8,
            [&] { return std::max(std::abs(r[4] - (2 * kPi - r[2])), std::abs(r[5] - (2 * kPi - r[1]))); });
  s.numeric("a - b'/2 vanishes at the roots", 1e-10, [&] {
    auto c = builtin_curve("exp-cos");
    double worst = 0;
    for (double t : r) worst = std::max(worst, std::abs(sextatic_function(c, t)));
    return worst;
  });
  return s.take();
}

std::vector<CheckResult> suite_frenet(const Tolerances& tol) {
  Suite s("frenet", tol);
  s.numeric("round trip of cnA(0.5) curvature on [0, 4]", 1e-5,
            [] { return frenet_round_trip_error(profile(Family::CnA, 0.5)); });
  s.numeric("round trip of constant curvature 0.3 on [0, 4]", 1e-5, [] {
    ProfileParams p;
    p.value = 0.3;
    return frenet_round_trip_error(make_profile(Family::Constant, p));
  });
  return s.take();
}

std::vector<CheckResult> suite_congruence(const Tolerances& tol, std::uint64_t seed) {
  Suite s("congruence", tol);
  for (double m : {0.3, 0.5, 0.7}) {
    std::string tag = ", m = " + format_double(m);
    CongruenceMeasures c;
    s.numeric("H against the closed form" + tag, 1e-12, [&] {
      c = congruence_measures(m, seed);
      return c.closed_form;
    });
    s.numeric("Lax residual" + tag, 1e-7, [&] { return c.lax; });
    s.numeric("conservation F H F^-1 = xi" + tag, 1e-7, [&] { return c.conservation; });
    s.numeric("quadrature frame against ODE frame" + tag, 1e-6, [&] { return c.frame; });
    s.numeric("eigenvector columns" + tag, 1e-7, [&] { return c.eigenvector; });
    s.numeric("constant eigenvector direction" + tag, 1e-7, [&] { return c.direction; });
  }
  return s.take();
}

std::vector<CheckResult> suite_motion(const Tolerances& tol) {
  Suite s("motion", tol);
  StructureResiduals r;
  s.numeric("F_s = F K on a 50 x 20 grid, m = 0.5", 1e-5, [&] {
    r = motion_measures(0.5);
    return r.ds;
  });
  s.numeric("F_t = F (H + v K) on a 50 x 20 grid, m = 0.5", 1e-5, [&] { return r.dt; });
  return s.take();
}

std::vector<CheckResult> suite_pde(const Tolerances& tol) {
  Suite s("pde", tol);
  PdeMeasures p;
  s.numeric("cnA(0.5) relative speed error, n = 256", 1e-2, [&] {
    p = pde_measures(Family::CnA, 0.5, 256, 1e-4);
    return std::abs(p.velocity - p.expected) / std::abs(p.expected);
  });
  s.numeric("mean drift", 1e-8, [&] { return p.mean_drift; });
  s.numeric("int (u_2s + 4 u^2) drift", 1e-6, [&] { return p.h1_drift; });
  s.numeric("constant data stays constant", 1e-14, [] {
    Grid1D g{2.0, std::vector<double>(64, 0.7)};
    EvolveOptions o;
    o.snapshots = 1;
    auto tr = evolve_kk(g, 1, 0.01, 1e-4, o);
    double worst = 0;
    for (double x : tr.snapshots.back()) worst = std::max(worst, std::abs(x - 0.7));
    return worst;
  });
  return s.take();
}

std::vector<CheckResult> suite_bridge(const Tolerances& tol, std::uint64_t seed) {
  Suite s("bridge", tol);
  for (int n = 0; n <= 3; ++n)
    s.numeric("kk_rhs(n) from Theta on 20 random functions, n = " + std::to_string(n), 1e-7,
              [&, n] { return bridge_measure(n, 20, seed); });
  const auto& L = levels();
  for (int n = 1; n <= 3; ++n)
    s.numeric("Theta(v_n) against op_S(v_n) on 20 random functions, n = " + std::to_string(n), 1e-8,
              [&, n] { return theta_symbolic_measure(L[static_cast<std::size_t>(n)].v, 20, seed); });
  return s.take();
}

}  // namespace

nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["name"] = r.name;
  if (std::isfinite(r.residual))
    j["residual"] = r.residual;
  else
    j["residual"] = nullptr;
  j["tolerance"] = r.tolerance;
  j["exact"] = r.exact;
  j["pass"] = r.pass;
  j["seconds"] = r.seconds;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

Tolerances::Tolerances(const std::string& text) : text_(text) {
  auto parse = [&](const std::string& v) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || !(x > 0) || !std::isfinite(x)) throw InvalidInput("tolerance override: bad value '" + v + "'");
    return x;
  };
  if (text.empty()) return;
  if (text.find('=') == std::string::npos) {
    all_ = parse(text);
    return;
  }
  std::stringstream ss(text);
  std::string item;
  const auto& names = suite_names();
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidInput("tolerance override: expected suite=value, got '" + item + "'");
    std::string suite = item.substr(0, eq);
    if (std::find(names.begin(), names.end(), suite) == names.end())
      throw InvalidInput("tolerance override: unknown suite '" + suite + "'");
    per_suite_[suite] = parse(item.substr(eq + 1));
  }
}

Tolerances Tolerances::from_env() {
  const char* v = std::getenv("KKFLOWS_TOL");
  return v ? Tolerances(v) : Tolerances();
}

double Tolerances::get(const std::string& suite, double fallback) const {
  if (auto it = per_suite_.find(suite); it != per_suite_.end()) return it->second;
  return all_ ? *all_ : fallback;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma1",     "prop1",  "hamiltonian", "elliptic",
                                              "waves",      "stationary", "sextatic", "frenet",
                                              "congruence", "motion", "pde",         "bridge"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const Tolerances& tol, std::uint64_t seed) {
  if (name == "lemma1") return suite_lemma1(tol);
  if (name == "prop1") return suite_prop1(tol);
  if (name == "hamiltonian") return suite_hamiltonian(tol);
  if (name == "elliptic") return suite_elliptic(tol, seed);
  if (name == "waves") return suite_waves(tol, seed);
  if (name == "stationary") return suite_stationary(tol, seed);
  if (name == "sextatic") return suite_sextatic(tol);
  if (name == "frenet") return suite_frenet(tol);
  if (name == "congruence") return suite_congruence(tol, seed);
  if (name == "motion") return suite_motion(tol);
  if (name == "pde") return suite_pde(tol);
  if (name == "bridge") return suite_bridge(tol, seed);
  throw InvalidInput("unknown suite '" + name + "'");
}

std::vector<CheckResult> run_suites(const std::vector<std::string>& names, const Tolerances& tol, std::uint64_t seed,
                                    bool concurrent) {
  for (const auto& n : names) {
    const auto& all = suite_names();
    if (std::find(all.begin(), all.end(), n) == all.end()) throw InvalidInput("unknown suite '" + n + "'");
  }
  std::vector<std::vector<CheckResult>> parts(names.size());
  if (concurrent) {
    levels();
    std::vector<std::future<std::vector<CheckResult>>> jobs;
    for (const auto& n : names) jobs.push_back(std::async(std::launch::async, [&, n] { return run_suite(n, tol, seed); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) parts[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < names.size(); ++i) parts[i] = run_suite(names[i], tol, seed);
  }
  std::vector<CheckResult> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

CurvatureProfile random_periodic_profile(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double c0 = amplitude * U(rng);
  double a[5], b[5];
  for (int k = 1; k <= 4; ++k) {
    a[k] = amplitude * U(rng) / k;
    b[k] = amplitude * U(rng) / k;
  }
  const int n = 64;
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    double s = 2 * kPi * i / n;
    double x = c0;
    for (int k = 1; k <= 4; ++k) x += a[k] * std::cos(k * s) + b[k] * std::sin(k * s);
    values[static_cast<std::size_t>(i)] = x;
  }
  return make_sampled(0.0, 2 * kPi, values);
}

double frenet_round_trip_error(const CurvatureProfile& k, double s1, int samples) {
  auto F = integrate_frenet(k, constant_function(1.0), 0.0, s1, std::max(samples / 2, 1));
  Curve c = F.as_curve();
  double worst = 0;
  for (int i = 0; i <= samples; ++i) {
    double s = s1 * i / samples;
    worst = std::max(worst, std::abs(curvature(c, s) - k.value(s)));
  }
  return worst;
}

CongruenceMeasures congruence_measures(double m, std::uint64_t seed) {
  CongruenceMeasures out;
  CnoidalCongruence cc(m);
  auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  out.closed_form = max_abs(data.xi - cc.xi());
  for (int i = 0; i < 20; ++i) {
    double s = U(rng);
    out.closed_form = std::max(out.closed_form, max_abs(data.H(s) - cc.H(s)));
  }

  double K2 = 2 * complete_K(m);
  auto F = integrate_frenet(cc.curvature(), constant_function(1.0), 0.0, K2, 50);
  std::vector<double> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(-3.0 + 9.0 * i / 49);
  auto lax = lax_residual(data, samples, &F);
  out.lax = lax.lax;
  out.conservation = lax.conservation;

  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(K2 * i / 40);
  auto Q = quadrature_integrate(data, grid);
  auto Fq = integrate_frenet(cc.curvature(), constant_function(1.0), Q.grid, 0.0);
  std::array<CVec3, 3> sigma0;
  for (int j = 0; j < 3; ++j) sigma0[j] = Q.S[0].col(j).normalized();
  for (std::size_t i = 0; i < Q.grid.size(); ++i) {
    out.frame = std::max(out.frame, max_abs(Q.frames[i] - Fq.frames()[i]));
    CMat3 Sigma = Fq.frames()[i].cast<cplx>() * Q.S[i];
    for (int j = 0; j < 3; ++j) {
      CVec3 col = Sigma.col(j);
      out.eigenvector =
          std::max(out.eigenvector, (data.xi.cast<cplx>() * col - Q.taus[j] * col).norm() / col.norm());
      CVec3 u = col.normalized();
      out.direction = std::max(out.direction, std::sqrt(std::max(0.0, 1.0 - std::norm(u.dot(sigma0[j])))));
    }
  }
  return out;
}

StructureResiduals motion_measures(double m, int ns, int nt) {
  CnoidalCongruence cc(m);
  auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
  const double speed = std::abs(cc.v());
  // The frame must cover s + v t and the difference stencils around it.
  std::vector<double> grid;
  double lo = -speed - 1.0, hi = 5.0 + speed;
  int n = static_cast<int>(std::ceil((hi - lo) / 0.1));
  for (int i = 0; i <= n; ++i) grid.push_back(lo + (hi - lo) * i / n);
  auto F = integrate_frenet(cc.curvature(), constant_function(1.0), grid, 0.0);
  std::vector<double> S, T;
  for (int i = 0; i < ns; ++i) S.push_back(4.0 * i / (ns - 1));
  for (int i = 0; i < nt; ++i) T.push_back(1.0 * i / (nt - 1));
  return motion_structure_residual(data, F, S, T);
}

PdeMeasures pde_measures(Family family, double m, std::size_t n, double dt, int snapshots) {
  auto k = profile(family, m);
  auto g = sample_profile(k, n);
  EvolveOptions o;
  o.snapshots = snapshots;
  auto start = std::chrono::steady_clock::now();
  auto tr = evolve_kk(g, 1, g.length / std::abs(k.velocity()), dt, o);
  PdeMeasures out;
  out.velocity = measure_velocity(tr).velocity;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.expected = k.velocity();
  out.mean_drift = tr.mean_drift();
  out.h1_drift = tr.h1_drift();
  return out;
}

double bridge_measure(int n, int functions, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1000 * static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> S(0.0, 2 * kPi);
  double worst = 0;
  for (int i = 0; i < functions; ++i) {
    auto u = random_periodic_profile(rng);
    worst = std::max(worst, std::abs(prop1_numeric_residual(n, jet_function(u), S(rng))));
  }
  return worst;
}

double theta_symbolic_measure(const DiffPoly& p, int functions, std::uint64_t seed) {
  DiffPoly S = op_S(p), G = op_S_integral(p);
  const int order = std::max({S.max_order(), G.max_order(), 1});
  std::mt19937_64 rng(seed + 7);
  std::uniform_real_distribution<double> U(0.0, 2 * kPi);
  double worst = 0;
  for (int i = 0; i < functions; ++i) {
    auto u = random_periodic_profile(rng);
    JetFunction uj = jet_function(u);
    double s = U(rng);
    auto js = uj(s, order);
    double symbolic = eval_on_jet(S, js);
    double numeric = theta_numeric(potential_jets(p, uj), uj, s) + js[1] / 9.0 * eval_on_jet(G, uj(0.0, order));
    worst = std::max(worst, std::abs(numeric - symbolic) / std::max(1.0, std::abs(symbolic)));
  }
  return worst;
}

std::vector<double> exp_cos_sextatic_points() {
  return find_sextatic(builtin_curve("exp-cos"), 0.0, 2 * kPi).roots;
}

}  // namespace kkflows
