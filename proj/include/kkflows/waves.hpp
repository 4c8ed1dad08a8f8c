// Traveling-wave curvature profiles of the fifth-order Kaup-Kupershmidt equation.
//
// Type A profiles solve k''' + 8 k k' = 0 and type B profiles solve
// k''' + k k' = 0. Each profile generates the traveling wave
// u(s, t) = k(s + v t), with v the profile velocity.

#ifndef KKFLOWS_WAVES_HPP
#define KKFLOWS_WAVES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kkflows/elliptic.hpp"
#include "kkflows/series.hpp"

namespace kkflows {

enum class Family {
  CnA,
  NsA,
  WpA,
  CnB,
  NsB,
  WpB,
  CscA,
  CothA,
  SechA,
  CscB,
  CothB,
  SechB,
  Soliton,
  Constant,
  Sampled
};

enum class WaveType { A, B, None };

std::string family_name(Family f);
// Accepts the names printed by family_name, case-insensitively (cnA, nsB, sech_a, ...).
Family family_from_name(const std::string& name);
WaveType wave_type(Family f);

struct ProfileParams {
  double m = 0.5;      // Jacobi parameter, or soliton width
  double c = 0.0;      // phase
  double g2 = 0.0, g3 = 0.0;  // Weierstrass families
  bool bounded = false;       // Weierstrass: use the bounded branch wp(s + omega_3 + c)
  double alpha = 3.0;  // soliton amplitude prefactor
  double value = 0.0;  // Constant family
};

struct Interval {
  double lo, hi;  // open; may be infinite
};

class CurvatureProfile {
 public:
  Family family() const { return family_; }
  const ProfileParams& params() const { return params_; }
  double velocity() const { return velocity_; }
  // Period of k, or 0 for non-periodic profiles.
  double period() const { return period_; }
  bool has_poles() const { return has_poles_; }

  // (g2, g3) of the underlying cubic, when the profile is elliptic or a limit.
  std::optional<std::pair<double, double>> invariants() const { return invariants_; }

  bool in_domain(double s) const;
  // The maximal open interval of the domain containing s. Throws OutOfDomain.
  Interval domain_interval(double s) const;
  // Distance from s to the nearest pole (infinity without poles).
  double pole_distance(double s) const;

  double value(double s) const { return jet(s, 0)[0]; }
  // (k, k', ..., k^(order)). Throws OutOfDomain outside the domain.
  std::vector<double> jet(double s, int order) const;
  // k composed with a series argument s(t).
  Series series(const Series& s) const;

  // A default window for sampling: one period, or a bounded window for
  // non-periodic profiles.
  Interval sample_window() const;

 private:
  friend CurvatureProfile make_profile(Family, const ProfileParams&);
  friend CurvatureProfile make_sampled(double, double, const std::vector<double>&, double);

  Family family_ = Family::Constant;
  ProfileParams params_;
  double velocity_ = 0;
  double period_ = 0;
  bool has_poles_ = false;
  double pole_offset_ = 0;  // poles at pole_offset_ + n period_ (single pole if period_ == 0)
  std::optional<std::pair<double, double>> invariants_;
  std::optional<WeierstrassLattice> lattice_;
  // Sampled profiles: real Fourier data on [s0, s0 + period).
  double s0_ = 0;
  std::vector<double> cos_, sin_;
};

// Throws DomainError for parameters out of range.
CurvatureProfile make_profile(Family family, const ProfileParams& params = {});
// Periodic trigonometric interpolant of uniform samples on [s0, s0 + period).
CurvatureProfile make_sampled(double s0, double period, const std::vector<double>& values, double velocity = 0.0);

// Max |k''' + 8 k k'| (type A) or |k''' + k k'| (type B) over random samples of
// the sample window that stay at least pole_margin away from poles.
double ode_residual(const CurvatureProfile& k, int samples = 200, std::uint64_t seed = 1, double pole_margin = 0.25);

// First integral k'^2 + 8/3 k^3 - 3/2 g2 k + 9/4 g3 (type A) or
// k'^2 + 1/3 k^3 - 12 g2 k + 144 g3 (type B) at s.
double first_integral(const CurvatureProfile& k, double s, double g2, double g3);

// (g2, g3) recovered from the jet at s through the first integral.
std::pair<double, double> recovered_invariants(const CurvatureProfile& k, double s);

// Fifth-order operator N(k) = k5 + 10 k k3 + 25 k1 k2 + 20 k^2 k1 at s.
double k1_operator(const CurvatureProfile& k, double s);

// Max |v k' + N(k)| over random samples; zero for traveling waves k(s + v t).
double k1_traveling_residual(const CurvatureProfile& k, int samples = 200, std::uint64_t seed = 1,
                             double pole_margin = 0.25);
// Same with an explicit velocity.
double k1_traveling_residual(const CurvatureProfile& k, double v, int samples, std::uint64_t seed,
                             double pole_margin);

struct SolitonScanEntry {
  double alpha;
  double residual;
};
// K1 residual of the soliton profile for each amplitude prefactor.
std::vector<SolitonScanEntry> soliton_alpha_scan(double m, const std::vector<double>& alphas = {1.0, 1.5, 2.0, 3.0});

}  // namespace kkflows

#endif  // KKFLOWS_WAVES_HPP
