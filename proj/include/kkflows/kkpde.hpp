// Periodic pseudo-spectral evolution of the Kaup-Kupershmidt equations
// u_t + D q_n(u) = 0 (n = 1, 2) and numerical evaluation of Theta.

#ifndef KKFLOWS_KKPDE_HPP
#define KKFLOWS_KKPDE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "kkflows/diffpoly.hpp"
#include "kkflows/motion.hpp"
#include "kkflows/waves.hpp"

namespace kkflows {

// Uniform samples of a function on [0, length). n is a power of two, n >= 64.
struct Grid1D {
  double length = 0;
  std::vector<double> values;

  std::size_t n() const { return values.size(); }
  double dx() const { return length / static_cast<double>(values.size()); }
  double point(std::size_t i) const { return static_cast<double>(i) * dx(); }
};

// Throws InvalidInput unless n is a power of two >= 64 and length > 0.
void validate_grid(const Grid1D& grid);
Grid1D sample_grid(const std::function<double(double)>& f, std::size_t n, double length);
// One period of a periodic profile, sampled from s = 0. Throws InvalidInput for non-periodic profiles.
Grid1D sample_profile(const CurvatureProfile& k, std::size_t n);

// Spectral derivatives: entry j holds d^j u / ds^j at the grid points, j = 0..order.
std::vector<std::vector<double>> spectral_derivatives(const Grid1D& grid, int order);

// max_{n/6 < |k| <= n/3} |u_k| / max_k |u_k| for the Fourier coefficients of the samples.
double spectral_tail(const Grid1D& grid);

struct EvolveOptions {
  int snapshots = 10;               // snapshots after t = 0, equally spaced in time
  double blowup = 1e6;              // sup-norm bound
  double initial_tail = 1e-10;      // spectral tail allowed at t = 0
  double tail_tolerance = 1e-8;     // spectral tail allowed during the run
  int check_every = 100;            // steps between tail checks
};

struct Trajectory {
  int order = 1;
  double length = 0;
  double dt = 0;  // step actually used: T / steps
  long steps = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  std::vector<double> mean;  // (1/L) int u ds per snapshot
  std::vector<double> h1;    // int (u_2s + 4 u^2) ds per snapshot

  Grid1D grid(std::size_t i) const { return {length, snapshots[i]}; }
  double mean_drift() const;  // max |mean - mean(0)| / max(|mean(0)|, sup |u(0)|)
  double h1_drift() const;    // max |h1 - h1(0)| / |h1(0)|
};

// ETDRK4 (contour-integral coefficients) on the linear part of kk_rhs(order)
// with the remaining flux in conservation form and 2/3-rule dealiasing.
// The step is shortened so that it divides T. Throws BlowUp and ResolutionLoss.
//
// Low modes whose |dt L| lies roughly in [10, 100] while the explicit coupling
// is still strong can grow. On one cnoidal period dt <= 4e-4 (order 1) and
// dt = 1e-5 (order 2) are stable; order 2 fails for dt near 2.5e-6 to 5e-6.
Trajectory evolve_kk(const Grid1D& u0, int order, double T, double dt, const EvolveOptions& options = {});

struct VelocityEstimate {
  double velocity = 0;          // v in u(s, t) = u(s + v t, 0)
  std::vector<double> shifts;   // unwrapped shift of each snapshot to the right
  double fit_residual = 0;      // max deviation of the shifts from the fitted line
};
// Shifts from the cross-correlation peak (Newton-refined on the trigonometric
// interpolant), unwrapped across snapshots and fitted by least squares.
VelocityEstimate measure_velocity(const Trajectory& trajectory);

// Jets (f, f_s, ..., f^(order)) of a function of s.
using JetFunction = std::function<std::vector<double>(double s, int order)>;
JetFunction jet_function(const CurvatureProfile& k);

// Theta(phi, u) at s with the integral term int_0^s (u phi_3s + 4 u^2 phi_s) by
// composite Gauss-Legendre, doubling the panels until two estimates agree to 1e-10.
double theta_numeric(const JetFunction& phi, const JetFunction& u, double s);
// phi = p evaluated on the jets of u.
JetFunction potential_jets(const DiffPoly& p, const JetFunction& u);

// kk_rhs(n) - (Theta(v_n, u) + (u_s/9) G(j(u)(0)) + lambda_n u_s) at s, with
// G = D^-1 (u D^3 v_n + 4 u^2 D v_n). Zero for every u.
double prop1_numeric_residual(int n, const JetFunction& u, double s);

// max |kappa_t + S(p) + lambda kappa_s| over the grid points of the interior
// snapshots (five-point differences in time; needs equally spaced snapshots,
// at least five). Throws NotInP.
double curvature_flow_residual(const Trajectory& kappa, const DiffPoly& p, double lambda);
// The same for an analytic field with time step dt.
double curvature_flow_residual(const SpaceTimeJet& kappa, const DiffPoly& p, double lambda,
                               const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                               double dt = 1e-3);

}  // namespace kkflows

#endif  // KKFLOWS_KKPDE_HPP
