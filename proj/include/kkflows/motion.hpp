// Motions of projective curves.
//
// A frame field F(s) solves F' = v F K(k) with K(k) the Frenet matrix; the
// curve is the first column of F. A motion F(s, t) also satisfies F_t = F Phi.
// Here Phi = Phi~(upsilon, kappa) - lambda K(kappa), which makes the curvature
// evolve by kappa_t + Theta(upsilon, kappa) + lambda kappa_s = 0.
//
// The congruence part covers the Hamiltonian H = Phi~ - (lambda + v) K of a
// traveling wave k(s + v t), its momentum xi = H(0), the Lax equation
// H' = [H, K], integration of the frame by quadratures and the motion
// gamma(s, t) = Exp(t xi) gamma~(s + v t).

#ifndef KKFLOWS_MOTION_HPP
#define KKFLOWS_MOTION_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kkflows/diffpoly.hpp"
#include "kkflows/projgeom.hpp"
#include "kkflows/series.hpp"
#include "kkflows/waves.hpp"

namespace kkflows {

using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using SeriesMat3 = std::array<std::array<Series, 3>, 3>;

// A scalar function of s given on series arguments, so that values and jets
// come from the same callback.
using ScalarFunction = std::function<Series(const Series&)>;
ScalarFunction constant_function(double value);

// ---------------------------------------------------------------------------
// Frenet integration

struct FrenetOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-2;
  int renormalize_every = 100;  // F <- F / det(F)^(1/3) every this many accepted steps, while |F|^3 < 1e5
  long max_steps = 2000000;
};

struct FrenetStats {
  long accepted = 0;
  long rejected = 0;
};

// F(s1) from F(s0) by Dormand-Prince 5(4) on F' = v F K(k). Either direction.
// Throws StepFailure when the step size underflows.
Mat3 propagate_frenet(const CurvatureProfile& k, const ScalarFunction& v, const Mat3& F0, double s0, double s1,
                      const FrenetOptions& options = {}, FrenetStats* stats = nullptr);

class FrameField {
 public:
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<Mat3>& frames() const { return frames_; }
  const CurvatureProfile& curvature() const { return k_; }
  double anchor() const { return anchor_; }
  const FrenetStats& stats() const { return stats_; }

  // First column of F at sample i, scaled to the unit sphere.
  Vec3 curve(std::size_t i) const;
  // F at any s, integrated from the nearest sample.
  Mat3 frame_at(double s) const;
  // Taylor series of F around s, from F' = v F K(k) applied recursively.
  SeriesMat3 frame_jet(double s, int order) const;
  // The first column of F as a curve with closed-form jets.
  Curve as_curve() const;

 private:
  friend FrameField integrate_frenet(const CurvatureProfile&, const ScalarFunction&, const std::vector<double>&,
                                     double, const Mat3&, const FrenetOptions&);
  std::vector<double> grid_;
  std::vector<Mat3> frames_;
  CurvatureProfile k_;
  ScalarFunction v_;
  double anchor_ = 0;
  FrenetOptions options_;
  FrenetStats stats_;
};

// Frames at every grid point (sorted ascending) with F(anchor) = F_anchor.
FrameField integrate_frenet(const CurvatureProfile& k, const ScalarFunction& v, const std::vector<double>& grid,
                            double anchor = 0.0, const Mat3& F_anchor = Mat3::Identity(),
                            const FrenetOptions& options = {});
// n + 1 equally spaced samples on [lo, hi], anchored at lo.
FrameField integrate_frenet(const CurvatureProfile& k, const ScalarFunction& v, double lo, double hi, int n,
                            const FrenetOptions& options = {});

// Series of F' = F A solved around the base point of A with F(0) = F0.
SeriesMat3 linear_ode_jet(const Mat3& F0, const SeriesMat3& A);

// ---------------------------------------------------------------------------
// Phi-matrix and zero curvature

// The nine entries of Phi~(upsilon, kappa) as series, with I the series of
// int_0^s (kappa upsilon_3s + 4 kappa^2 upsilon_s). The result has order
// min(order(kappa) - 4, order(upsilon) - 6, order(I)).
SeriesMat3 phi_tilde_series(const Series& kappa, const Series& upsilon, const Series& integral);

struct PhiMatrix {
  Mat3 phi = Mat3::Zero();
  double lambda = 0;
  double upsilon() const { return phi(2, 0); }
};
// Phi~ - lambda K at a point. kappa_jet needs 5 entries, upsilon_jet 7.
PhiMatrix phi_tilde(std::span<const double> kappa_jet, std::span<const double> upsilon_jet, double integral_term,
                    double lambda = 0.0);

// Theta(upsilon, kappa) at a point. kappa_jet needs 6 entries, upsilon_jet 8.
double theta(std::span<const double> kappa_jet, std::span<const double> upsilon_jet, double integral_term);

// Jets (f, f_s, ..., f^(order)) of a space-time field at (s, t).
using SpaceTimeJet = std::function<std::vector<double>(double s, double t, int order)>;

// int_0^s (kappa upsilon_3s + 4 kappa^2 upsilon_s) dr at time t.
double integral_term(const SpaceTimeJet& kappa, const SpaceTimeJet& upsilon, double s, double t);

// Max Frobenius norm of Phi_s - K_t + [K, Phi] over the grid, with Phi_s from
// series, the integral term by quadrature and K_t by a five-point central
// difference with step dt.
double zero_curvature_residual(const SpaceTimeJet& kappa, const SpaceTimeJet& upsilon, double lambda,
                               const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                               double dt = 1e-3);

// ---------------------------------------------------------------------------
// Congruence curves

class Hamiltonian {
 public:
  // Throws NotInP when p is not a potential.
  Hamiltonian(CurvatureProfile k, const DiffPoly& p, double v, double lambda = 0.0);

  const CurvatureProfile& curvature() const { return k_; }
  const DiffPoly& potential() const { return p_; }
  double v() const { return v_; }
  double lambda() const { return lambda_; }

  // (upsilon, upsilon', ..., upsilon^(order)) at s, upsilon = p on the jets of k.
  std::vector<double> upsilon_jet(double s, int order) const;
  double integral_term(double s) const;

  Mat3 operator()(double s) const;
  SeriesMat3 series(double s, int order) const;
  Mat3 derivative(double s) const;

  // Theta(upsilon, k) + (lambda + v) k' at s: zero for congruence curves.
  double congruence_residual(double s) const;

 private:
  CurvatureProfile k_;
  DiffPoly p_;
  std::vector<CompiledPoly> dp_;  // D^j p
  int p_order_ = -1;
  bool constant_ = false;
  double v_, lambda_;
};

struct CongruenceData {
  Hamiltonian H;
  Mat3 xi;  // H(0)
};

// Checks the congruence equation at 64 points of the sample window (pole
// margin 0.25) and throws NotCongruence when the residual exceeds tol.
CongruenceData hamiltonian(const CurvatureProfile& k, const DiffPoly& p, double v, double lambda = 0.0,
                           double tol = 1e-6);

struct LaxResiduals {
  double lax = 0;           // max |H' - [H, K]|
  double conservation = 0;  // max |F H F^-1 - xi| along the frame (0 without a frame)
};
LaxResiduals lax_residual(const CongruenceData& data, const std::vector<double>& samples,
                          const FrameField* frame = nullptr);

// Eigenvalues of a trace-free 3x3 matrix by Cardano's formula with Newton
// polishing. Order: real eigenvalues ascending, then the complex pair with
// positive imaginary part first. Throws RepeatedEigenvalue when two
// eigenvalues agree to 1e-8 relative.
std::array<std::complex<double>, 3> eigen3(const Mat3& xi);

struct QuadratureFrame {
  std::vector<double> grid;
  std::vector<Mat3> frames;               // real part of M(0)^-1 M
  std::array<std::complex<double>, 3> taus;
  std::array<std::array<int, 2>, 3> row_pairs;
  std::vector<std::array<std::complex<double>, 3>> r;    // r_j at each sample
  std::vector<std::array<std::complex<double>, 3>> rho;  // rho_j at each sample
  std::vector<CMat3> S;
  CMat3 M0inv;
  double max_imag = 0;             // largest imaginary part discarded from F
  double max_nonproportional = 0;  // largest |S' + K S - r S| / |S|
};

// Frame F with F(0) = Id from the Hamiltonian by linear algebra and the
// quadratures rho_j = exp(int_0^s r_j). The grid must contain 0.
// Throws RepeatedEigenvalue, SingularS or NonRealFrame.
QuadratureFrame quadrature_integrate(const CongruenceData& data, const std::vector<double>& grid,
                                     double panels_per_unit = 8.0);

// The cnoidal example k(s) = (1 - 2m + 3m cn(s|m)^2)/2 with potential 9 and
// v = -(1 - m + m^2), through closed-form expressions.
class CnoidalCongruence {
 public:
  explicit CnoidalCongruence(double m);

  double m() const { return m_; }
  double v() const { return v_; }
  const CurvatureProfile& curvature() const { return k_; }
  const Mat3& xi() const { return xi_; }
  const std::array<std::complex<double>, 3>& taus() const { return taus_; }
  // -31 + m(6 + m(7 + (m - 6) m)).
  double delta() const;
  // Eigenvalues from the closed cubic formulas. tau_1 is the real one; tau_0
  // and tau_2 form the complex pair.
  std::array<std::complex<double>, 3> closed_form_taus() const;

  Mat3 H(double s) const;
  // Column j of S for rows 2 and 3 of H - tau_j.
  CVec3 S(int j, double s) const;
  std::complex<double> r(int j, double s) const;
  // sqrt(2) sqrt(X) exp(9 Pi(9m/(3(m+1)+tau); am(s)|m)/(3(m+1)+tau)),
  // X = 9 dn^2 + 3(m-2) + tau. Throws PoleOnPath where the Pi integrand has a pole.
  std::complex<double> rho(int j, double s) const;
  // First column of S^-1: 1/prod_{h != j}(tau_j - tau_h).
  CVec3 inverse_S_first_column() const;
  // Coefficients of M(0)^-1, column j using tau_j.
  CMat3 M_tilde() const;
  // Homogeneous coordinates sum_k M~_k rho_k / prod(tau_k - tau_h); real up to round-off.
  CVec3 curve(double s) const;

 private:
  double m_, v_;
  CurvatureProfile k_;
  Mat3 xi_;
  std::array<std::complex<double>, 3> taus_;
};

// ---------------------------------------------------------------------------
// Motion of a congruence curve

// Exp(t xi) by scaling and squaring with a Pade approximant.
Mat3 matrix_exp(const Mat3& A);

// gamma(s, t) = Exp(t xi) x(s + v t) on the unit sphere, indexed [t][s].
std::vector<std::vector<Vec3>> motion_evolve(const Mat3& xi, double v, const std::function<Vec3(double)>& x,
                                             const std::vector<double>& s_grid, const std::vector<double>& t_grid);

struct StructureResiduals {
  double ds = 0;  // max |F_s - F K| / max(1, |F|)
  double dt = 0;  // max |F_t - F (H + v K)| / max(1, |F|)
};
// F(s, t) = Exp(t xi) F~(s + v t) checked against F_s = F K and F_t = F (H + v K)
// by five-point central differences with step h.
StructureResiduals motion_structure_residual(const CongruenceData& data, const FrameField& frame,
                                             const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                                             double h = 1e-3);

}  // namespace kkflows

#endif  // KKFLOWS_MOTION_HPP
