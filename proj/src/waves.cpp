#include "kkflows/waves.hpp"

#include <fftw3.h>

#include "kkflows/fftw_lock.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

namespace kkflows {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct NamedFamily {
  Family family;
  const char* name;
};

const NamedFamily kNames[] = {
    {Family::CnA, "cnA"},         {Family::NsA, "nsA"},         {Family::WpA, "wpA"},
    {Family::CnB, "cnB"},         {Family::NsB, "nsB"},         {Family::WpB, "wpB"},
    {Family::CscA, "cscA"},       {Family::CothA, "cothA"},     {Family::SechA, "sechA"},
    {Family::CscB, "cscB"},       {Family::CothB, "cothB"},     {Family::SechB, "sechB"},
    {Family::Soliton, "soliton"}, {Family::Constant, "constant"}, {Family::Sampled, "sampled"},
};

std::string fold(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (ch != '_' && ch != '-') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return out;
}

double cubic_speed(double m) { return 1.0 - m + m * m; }

}  // namespace

std::string family_name(Family f) {
  for (const auto& n : kNames)
    if (n.family == f) return n.name;
  return "unknown";
}

Family family_from_name(const std::string& name) {
  std::string key = fold(name);
  for (const auto& n : kNames)
    if (fold(n.name) == key) return n.family;
  throw InvalidInput("unknown profile family '" + name + "'");
}

WaveType wave_type(Family f) {
  switch (f) {
    case Family::CnA:
    case Family::NsA:
    case Family::WpA:
    case Family::CscA:
    case Family::CothA:
    case Family::SechA:
      return WaveType::A;
    case Family::CnB:
    case Family::NsB:
    case Family::WpB:
    case Family::CscB:
    case Family::CothB:
    case Family::SechB:
      return WaveType::B;
    default:
      return WaveType::None;
  }
}

CurvatureProfile make_profile(Family family, const ProfileParams& params) {
  CurvatureProfile P;
  P.family_ = family;
  P.params_ = params;
  const double m = params.m, c = params.c;
  const WaveType type = wave_type(family);
  const double vscale = (type == WaveType::B) ? 176.0 : 1.0;
  if (!std::isfinite(c)) throw DomainError("profile phase must be finite");

  auto jacobi_invariants = [&](double mm) {
    double g2 = 4.0 / 3.0 * cubic_speed(mm);
    double g3 = -4.0 / 27.0 * (2.0 - mm) * (2.0 * mm - 1.0) * (1.0 + mm);
    return std::make_pair(g2, g3);
  };

  switch (family) {
    case Family::CnA:
    case Family::CnB:
    case Family::NsA:
    case Family::NsB: {
      if (!(m >= 0.0 && m < 1.0)) throw DomainError("Jacobi parameter must lie in [0, 1)");
      P.velocity_ = -vscale * cubic_speed(m);
      P.period_ = 2.0 * complete_K(m);
      P.invariants_ = jacobi_invariants(m);
      if (family == Family::NsA || family == Family::NsB) {
        P.has_poles_ = true;
        P.pole_offset_ = -c;
      }
      break;
    }
    case Family::WpA:
    case Family::WpB: {
      if (!std::isfinite(params.g2) || !std::isfinite(params.g3)) throw DomainError("invariants must be finite");
      P.lattice_ = weierstrass_lattice(params.g2, params.g3);
      if (params.bounded && !P.lattice_->three_real_roots)
        throw DomainError("bounded Weierstrass branch needs g2^3 > 27 g3^2");
      P.velocity_ = (type == WaveType::B) ? -132.0 * params.g2 : -0.75 * params.g2;
      P.period_ = 2.0 * P.lattice_->real_half_period;
      P.invariants_ = std::make_pair(params.g2, params.g3);
      P.has_poles_ = !params.bounded;
      P.pole_offset_ = -c;
      break;
    }
    case Family::CscA:
    case Family::CscB:
      P.velocity_ = -vscale;
      P.period_ = kPi;
      P.invariants_ = jacobi_invariants(0.0);
      P.has_poles_ = true;
      P.pole_offset_ = -c;
      break;
    case Family::CothA:
    case Family::CothB:
      P.velocity_ = -vscale;
      P.invariants_ = jacobi_invariants(1.0);
      P.has_poles_ = true;
      P.pole_offset_ = -c;
      break;
    case Family::SechA:
    case Family::SechB:
      P.velocity_ = -vscale;
      P.invariants_ = jacobi_invariants(1.0);
      break;
    case Family::Soliton:
      if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("soliton width must be positive");
      if (!std::isfinite(params.alpha)) throw DomainError("soliton amplitude must be finite");
      P.velocity_ = -m * m * m * m;
      break;
    case Family::Constant:
      if (!std::isfinite(params.value)) throw DomainError("constant profile value must be finite");
      P.velocity_ = 0.0;
      break;
    case Family::Sampled:
      throw InvalidInput("sampled profiles are built with make_sampled");
  }
  return P;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

CurvatureProfile make_sampled(double s0, double period, const std::vector<double>& values, double velocity) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw InvalidInput("a sampled profile needs at least two samples");
  if (!(period > 0.0) || !std::isfinite(period) || !std::isfinite(s0)) throw DomainError("bad sampling window");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("sampled profile values must be finite");

  std::vector<double> in(values);
  std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  CurvatureProfile P;
  P.family_ = Family::Sampled;
  P.velocity_ = velocity;
  P.period_ = period;
  P.s0_ = s0;
  const int half = n / 2;
  P.cos_.assign(static_cast<std::size_t>(half + 1), 0.0);
  P.sin_.assign(static_cast<std::size_t>(half + 1), 0.0);
  for (int k = 0; k <= half; ++k) {
    double re = out[static_cast<std::size_t>(k)][0] / n, im = out[static_cast<std::size_t>(k)][1] / n;
    bool edge = (k == 0) || (n % 2 == 0 && k == half);
    P.cos_[static_cast<std::size_t>(k)] = edge ? re : 2.0 * re;
    P.sin_[static_cast<std::size_t>(k)] = edge ? 0.0 : -2.0 * im;
  }
  return P;
}

double CurvatureProfile::pole_distance(double s) const {
  if (!has_poles_) return kInf;
  double r = s - pole_offset_;
  if (period_ > 0.0) r -= period_ * std::nearbyint(r / period_);
  return std::abs(r);
}

bool CurvatureProfile::in_domain(double s) const {
  if (!std::isfinite(s)) return false;
  return pole_distance(s) > 1e-8 * std::max(1.0, period_);
}

Interval CurvatureProfile::domain_interval(double s) const {
  if (!in_domain(s)) throw OutOfDomain("s = " + std::to_string(s) + " is a singular point of the profile");
  if (!has_poles_) return {-kInf, kInf};
  if (period_ == 0.0) return s < pole_offset_ ? Interval{-kInf, pole_offset_} : Interval{pole_offset_, kInf};
  double n = std::floor((s - pole_offset_) / period_);
  double lo = pole_offset_ + n * period_;
  return {lo, lo + period_};
}

Interval CurvatureProfile::sample_window() const {
  const double c = params_.c;
  switch (family_) {
    case Family::Sampled:
      return {s0_, s0_ + period_};
    case Family::Soliton:
      return {-c - 20.0, -c + 20.0};
    case Family::Constant:
      return {-1.0, 1.0};
    case Family::CothA:
    case Family::CothB:
    case Family::SechA:
    case Family::SechB:
      return {-c - 10.0, -c + 10.0};
    default:
      return {-c, -c + period_};
  }
}

Series CurvatureProfile::series(const Series& s) const {
  if (!in_domain(s[0])) throw OutOfDomain("s = " + std::to_string(s[0]) + " is a singular point of the profile");
  const double m = params_.m;
  const Series x = s + params_.c;
  const double b = (wave_type(family_) == WaveType::B) ? 8.0 : 1.0;
  switch (family_) {
    case Family::CnA:
    case Family::CnB: {
      Series cn = jacobi_series(x, m).cn;
      return b * (0.5 * (1.0 - 2.0 * m) + (1.5 * m) * (cn * cn));
    }
    case Family::NsA:
    case Family::NsB: {
      Series sn = jacobi_series(x, m).sn;
      return b * (0.5 * (1.0 + m) - 1.5 / (sn * sn));
    }
    case Family::WpA:
    case Family::WpB: {
      Series wp = params_.bounded ? weierstrass_p_bounded_series(x, *lattice_) : weierstrass_p_series(x, *lattice_);
      return (-1.5 * b) * wp;
    }
    case Family::CscA:
    case Family::CscB: {
      Series sn = sin(x);
      return b * (0.5 - 1.5 / (sn * sn));
    }
    case Family::CothA:
    case Family::CothB: {
      Series sh(x.order()), ch(x.order());
      sinh_cosh(x, sh, ch);
      return b * (1.0 - 1.5 * (ch * ch) / (sh * sh));
    }
    case Family::SechA:
    case Family::SechB: {
      Series sh(x.order()), ch(x.order());
      sinh_cosh(x, sh, ch);
      return b * (-0.5 + 1.5 / (ch * ch));
    }
    case Family::Soliton: {
      Series sh(x.order()), ch(x.order());
      sinh_cosh(m * x, sh, ch);
      Series den = 2.0 + ch;
      return (params_.alpha * m * m) * (1.0 + 2.0 * ch) / (2.0 * (den * den));
    }
    case Family::Constant:
      return Series(s.order(), params_.value);
    case Family::Sampled: {
      const double w = 2.0 * kPi / period_;
      Series theta = w * (s - s0_);
      Series out(s.order(), cos_[0]);
      for (std::size_t k = 1; k < cos_.size(); ++k) {
        Series sk(s.order()), ck(s.order());
        sin_cos(static_cast<double>(k) * theta, sk, ck);
        out = out + cos_[k] * ck + sin_[k] * sk;
      }
      return out;
    }
  }
  return Series(s.order(), 0.0);
}

std::vector<double> CurvatureProfile::jet(double s, int order) const {
  if (order < 0) throw InvalidInput("jet order must be non-negative");
  return series(Series::variable(order, s)).derivatives();
}

namespace {

template <typename F>
double max_over_samples(const CurvatureProfile& k, int samples, std::uint64_t seed, double margin, F&& f) {
  if (samples <= 0) throw InvalidInput("sample count must be positive");
  Interval w = k.sample_window();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(w.lo, w.hi);
  double worst = 0.0;
  int taken = 0, tries = 0;
  while (taken < samples) {
    if (++tries > 1000 * samples) throw DomainError("sample window has no points away from the poles");
    double s = U(rng);
    if (k.pole_distance(s) < margin) continue;
    worst = std::max(worst, std::abs(f(s)));
    ++taken;
  }
  return worst;
}

}  // namespace

double ode_residual(const CurvatureProfile& k, int samples, std::uint64_t seed, double pole_margin) {
  WaveType t = wave_type(k.family());
  if (t == WaveType::None) throw InvalidInput("profile family has no third-order equation");
  const double c = (t == WaveType::A) ? 8.0 : 1.0;
  return max_over_samples(k, samples, seed, pole_margin, [&](double s) {
    auto j = k.jet(s, 3);
    return j[3] + c * j[0] * j[1];
  });
}

double first_integral(const CurvatureProfile& k, double s, double g2, double g3) {
  WaveType t = wave_type(k.family());
  if (t == WaveType::None) throw InvalidInput("profile family has no first integral");
  auto j = k.jet(s, 1);
  double u = j[0], u1 = j[1];
  if (t == WaveType::A) return u1 * u1 + 8.0 / 3.0 * u * u * u - 1.5 * g2 * u + 2.25 * g3;
  return u1 * u1 + u * u * u / 3.0 - 12.0 * g2 * u + 144.0 * g3;
}

std::pair<double, double> recovered_invariants(const CurvatureProfile& k, double s) {
  WaveType t = wave_type(k.family());
  if (t == WaveType::None) throw InvalidInput("profile family has no first integral");
  auto j = k.jet(s, 2);
  double u = j[0], u1 = j[1], u2 = j[2];
  if (t == WaveType::A) {
    double g2 = 4.0 / 3.0 * (u2 + 4.0 * u * u);
    double g3 = 4.0 / 9.0 * (-u1 * u1 - 8.0 / 3.0 * u * u * u + 1.5 * g2 * u);
    return {g2, g3};
  }
  double g2 = (u2 + 0.5 * u * u) / 6.0;
  double g3 = (-u1 * u1 - u * u * u / 3.0 + 12.0 * g2 * u) / 144.0;
  return {g2, g3};
}

double k1_operator(const CurvatureProfile& k, double s) {
  auto j = k.jet(s, 5);
  return j[5] + 10.0 * j[0] * j[3] + 25.0 * j[1] * j[2] + 20.0 * j[0] * j[0] * j[1];
}

double k1_traveling_residual(const CurvatureProfile& k, double v, int samples, std::uint64_t seed,
                             double pole_margin) {
  return max_over_samples(k, samples, seed, pole_margin, [&](double s) {
    auto j = k.jet(s, 5);
    return v * j[1] + j[5] + 10.0 * j[0] * j[3] + 25.0 * j[1] * j[2] + 20.0 * j[0] * j[0] * j[1];
  });
}

double k1_traveling_residual(const CurvatureProfile& k, int samples, std::uint64_t seed, double pole_margin) {
  return k1_traveling_residual(k, k.velocity(), samples, seed, pole_margin);
}

std::vector<SolitonScanEntry> soliton_alpha_scan(double m, const std::vector<double>& alphas) {
  std::vector<SolitonScanEntry> out;
  for (double a : alphas) {
    ProfileParams p;
    p.m = m;
    p.alpha = a;
    out.push_back({a, k1_traveling_residual(make_profile(Family::Soliton, p))});
  }
  return out;
}

}  // namespace kkflows
