// Invariant suites and the measurements behind them.
//
// A suite is a named list of checks. Exact checks compare symbolic objects and
// report the number of surviving terms; numeric checks report a residual and
// the tolerance it was held to.

#ifndef KKFLOWS_VERIFY_HPP
#define KKFLOWS_VERIFY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "kkflows/kkpde.hpp"
#include "kkflows/motion.hpp"

namespace kkflows {

struct CheckResult {
  std::string suite;
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool exact = false;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

nlohmann::json to_json(const CheckResult& r);

// Tolerance overrides. The text is either a bare number, which replaces every
// numeric tolerance, or a comma-separated list "suite=value,...".
// Exact checks are never relaxed.
class Tolerances {
 public:
  Tolerances() = default;
  // Throws InvalidInput on malformed text.
  explicit Tolerances(const std::string& text);
  // Reads KKFLOWS_TOL; empty when unset.
  static Tolerances from_env();

  double get(const std::string& suite, double fallback) const;
  bool empty() const { return !all_ && per_suite_.empty(); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::optional<double> all_;
  std::map<std::string, double> per_suite_;
};

// lemma1, prop1, hamiltonian, elliptic, waves, stationary, sextatic, frenet,
// congruence, motion, pde, bridge.
const std::vector<std::string>& suite_names();

// Throws InvalidInput for unknown names. Exceptions raised inside a check are
// reported as a failed check.
std::vector<CheckResult> run_suite(const std::string& name, const Tolerances& tol = {}, std::uint64_t seed = 1);
// Suites run on separate threads when concurrent is set; results keep the order of names.
std::vector<CheckResult> run_suites(const std::vector<std::string>& names, const Tolerances& tol = {},
                                    std::uint64_t seed = 1, bool concurrent = true);

// ---------------------------------------------------------------------------
// Measurements

// A random trigonometric polynomial with modes 0..4 on [0, 2 pi), as a sampled profile.
CurvatureProfile random_periodic_profile(std::mt19937_64& rng, double amplitude = 0.5);

// Integrate the frame for (v = 1, k) on [0, s1], read the curvature back through
// the projective invariants and return the sup error over samples + 1 points.
double frenet_round_trip_error(const CurvatureProfile& k, double s1 = 4.0, int samples = 80);

// The cnoidal congruence example with potential 9.
struct CongruenceMeasures {
  double closed_form = 0;   // max |H - H_closed| at 20 random points of [-5, 5]
  double lax = 0;           // max |H' - [H, K]| on [-3, 6]
  double conservation = 0;  // max |F H F^-1 - xi| along the frame on [0, 2K]
  double frame = 0;         // max |F_quadrature - F_ode| on [0, 2K]
  double eigenvector = 0;   // max |xi sigma - tau sigma| / |sigma| for the columns of F S
  double direction = 0;     // max sqrt(1 - |<sigma(s), sigma(0)>|^2) for unit columns
};
CongruenceMeasures congruence_measures(double m, std::uint64_t seed = 1);

// Structure residuals of gamma(s, t) = Exp(t xi) gamma~(s + v t) for the cnoidal
// example on an ns x nt grid of [0, 4] x [0, 1].
StructureResiduals motion_measures(double m, int ns = 50, int nt = 20);

struct PdeMeasures {
  double velocity = 0;  // measured
  double expected = 0;  // profile velocity
  double mean_drift = 0;
  double h1_drift = 0;
  double seconds = 0;
};
// One profile period crossed once under the order-1 flow.
PdeMeasures pde_measures(Family family, double m, std::size_t n, double dt, int snapshots = 40);

// max |prop1_numeric_residual(n, u, s)| over random periodic u and s.
double bridge_measure(int n, int functions = 20, std::uint64_t seed = 1);

// max |Theta(p, u) + (u_s/9) G(j(u)(0)) - S(p)| / max(1, |S(p)|) over random
// periodic u and s, with G = op_S_integral(p): the numeric quadrature starts at
// s = 0 while the symbolic antiderivative is normalized to vanish there.
double theta_symbolic_measure(const DiffPoly& p, int functions = 20, std::uint64_t seed = 1);

// Sextatic points of the exp-cos curve on [0, 2 pi).
std::vector<double> exp_cos_sextatic_points();

}  // namespace kkflows

#endif  // KKFLOWS_VERIFY_HPP
