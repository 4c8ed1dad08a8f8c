// Projective differential geometry of plane curves: normalized lift, projective
// speed and curvature, sextatic points, canonical frame and osculating conic.

#ifndef KKFLOWS_PROJGEOM_HPP
#define KKFLOWS_PROJGEOM_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kkflows/errors.hpp"
#include "kkflows/series.hpp"

namespace kkflows {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using SeriesVec3 = std::array<Series, 3>;

// A lift G: I -> R^3 \ {0} of a plane projective curve.
class Curve {
 public:
  enum class Mode { ClosedForm, RichardsonFD };

  // Closed form: the callback maps a Taylor series t(x) to G(t(x)).
  static Curve closed_form(std::function<SeriesVec3(const Series&)> g, std::string name = "");
  // Values only: jets come from central differences with Richardson
  // extrapolation over `levels` step halvings starting at `step`.
  static constexpr double kDefaultStep = 0.4;
  static Curve finite_difference(std::function<Vec3(double)> g, double step = kDefaultStep, int levels = 4,
                                 std::string name = "");

  Mode mode() const { return mode_; }
  const std::string& name() const { return name_; }
  double step() const { return step_; }
  int levels() const { return levels_; }

  Vec3 operator()(double t) const;
  // Taylor expansion of G at t to the given order.
  SeriesVec3 jet(double t, int order) const;

  // The curve A G for a 3x3 matrix A.
  Curve transformed(const Mat3& A) const;
  // The curve G(phi(t)) for a reparameterization phi given on series.
  Curve reparameterized(std::function<Series(const Series&)> phi) const;
  // The curve lambda(t) G(t).
  Curve rescaled(std::function<Series(const Series&)> lambda) const;

 private:
  Mode mode_ = Mode::ClosedForm;
  std::string name_;
  std::function<SeriesVec3(const Series&)> series_;
  std::function<Vec3(double)> values_;
  double step_ = 0;
  int levels_ = 4;
};

// exp-cos: (cos t, sin t, exp(-cos t / 4)); conic: (1, t, t^2/2); cubic: (1, t, t^3).
// Throws InvalidInput for other names.
Curve builtin_curve(const std::string& name);

struct NormalizedLift {
  std::array<Vec3, 4> gamma;  // Gamma, Gamma', Gamma'', Gamma'''
  double det_G = 0;           // det(G, G', G'')
};

// Throws InflectionPoint when |det(G, G', G'')| < 1e-10 |G| |G'| |G''|.
NormalizedLift normalized_lift(const Curve& curve, double t);

struct ABCoefficients {
  double a = 0, b = 0;
  double c = 0;         // det(Gamma, Gamma', Gamma'''), zero in exact arithmetic
  double residual = 0;  // |Gamma''' - a Gamma - b Gamma' - c Gamma''|
};
ABCoefficients ab_coefficients(const Curve& curve, double t);

struct Speed {
  double radicand = 0;  // a - b'/2
  double v = 0;         // signed real cube root of the radicand
  double scale = 0;     // |a| + |b'|/2 + |b|^(3/2), the reference for the sextatic threshold
};
// With require_nonzero, throws SextaticPoint when |a - b'/2| <= 1e-12 scale.
Speed speed_and_arc(const Curve& curve, double t, bool require_nonzero = false);

// a - b'/2 at t.
double sextatic_function(const Curve& curve, double t);

struct SextaticScan {
  std::vector<double> roots;  // sorted
  bool degenerate = false;    // a - b'/2 vanishes on the whole grid
  double max_abs = 0;         // max |a - b'/2| over the grid
};
// Zeros of a - b'/2 on [lo, hi): grid sign changes refined by the Illinois
// variant of regula falsi (at most 60 iterations) to |f| < 1e-12 max_abs.
SextaticScan find_sextatic(const Curve& curve, double lo, double hi, int grid = 720);

// k = -(S(s) + b/2)/v^2 with S the Schwarzian of a projective parameter.
// Throws SextaticPoint where v vanishes.
double curvature(const Curve& curve, double t);

// (F0 | F1 | F2) with F0 = v Gamma, F1 = (v'/v) Gamma + Gamma',
// F2 = (1/2v)(v'^2/v^2 - b) Gamma + (v'/v^2) Gamma' + Gamma''/v.
Mat3 canonical_frame(const Curve& curve, double t);

// The Frenet matrix K(k) = [[0, -k, 1], [1, 0, -k], [0, 1, 0]].
Mat3 frenet_matrix(double k);

// Symmetric matrix C of the osculating conic x^T C x = 0, unit Frobenius
// norm, first entry above 1e-12 in absolute value positive.
Mat3 osculating_conic(const Curve& curve, double t);

// Projective arc length int_t0^t1 v dt.
double arc_length(const Curve& curve, double t0, double t1, int panels = 64);

struct ProjectiveData {
  double t = 0;
  Vec3 gamma = Vec3::Zero();
  double a = 0, b = 0;
  double v = 0;
  double sigma = 0;  // int_t0^t v dt
  double k = 0;
  Mat3 frame = Mat3::Identity();
};
// Everything at t; sigma is measured from t0. Throws like canonical_frame.
ProjectiveData analyze(const Curve& curve, double t, double t0 = 0.0);

// Series of the projective invariants around t, for callers that need jets.
struct ProjectiveJets {
  SeriesVec3 gamma;  // order N - 2
  Series a, b, c;    // order N - 5
  Series radicand;   // order N - 6
  Series v;          // order N - 6
};
ProjectiveJets projective_jets(const Curve& curve, double t, int order = 10);

}  // namespace kkflows

#endif  // KKFLOWS_PROJGEOM_HPP
