// Jacobi and Weierstrass elliptic functions and Carlson symmetric integrals.
//
// Jacobi functions use the parameter convention m = k^2 with 0 <= m < 1.
// The Weierstrass discriminant reported here is delta = -g2^3 + 27 g3^2, which
// is the negative of the classical modular discriminant: delta < 0 means the
// cubic 4t^3 - g2 t - g3 has three real roots.

#ifndef KKFLOWS_ELLIPTIC_HPP
#define KKFLOWS_ELLIPTIC_HPP

#include <complex>

#include "kkflows/errors.hpp"
#include "kkflows/series.hpp"

namespace kkflows {

using cplx = std::complex<double>;

// Complete integral of the first kind, by the arithmetic-geometric mean.
double complete_K(double m);

struct JacobiValues {
  double sn = 0, cn = 1, dn = 1;
  double am = 0;  // continuous in u: am(u + 2K) = am(u) + pi
};

JacobiValues jacobi(double u, double m);
inline double jacobi_am(double u, double m) { return jacobi(u, m).am; }

// Taylor series of sn, cn, dn and am composed with a series argument u(t).
struct JacobiSeries {
  Series sn, cn, dn, am;
};
JacobiSeries jacobi_series(const Series& u, double m);

// Carlson symmetric integrals for complex arguments.
cplx carlson_rf(cplx x, cplx y, cplx z);
cplx carlson_rc(cplx x, cplx y);
cplx carlson_rj(cplx x, cplx y, cplx z, cplx p);
cplx carlson_rd(cplx x, cplx y, cplx z);

// Incomplete integral of the first kind F(phi|m), for every real phi.
double incomplete_F(double phi, double m);

// Pi(zeta; phi | m) = int_0^phi dtheta / ((1 - zeta sin^2 theta) sqrt(1 - m sin^2 theta)).
// Valid for all real phi. Throws PoleOnPath when a real zeta makes the
// denominator vanish on [0, phi].
cplx incomplete_Pi(cplx zeta, double phi, double m);
cplx complete_Pi(cplx zeta, double m);

struct WeierstrassLattice {
  double g2 = 0, g3 = 0;
  double delta = 0;          // -g2^3 + 27 g3^2
  bool three_real_roots = false;
  double e1 = 0, e2 = 0, e3 = 0;  // e1 > e2 > e3 when real; otherwise e2 is the real root
  double m = 0;              // Jacobi parameter of the reduction
  double scale = 0;          // sqrt(e1 - e3), or 2 sqrt(H2) in the one-root case
  double real_half_period = 0;  // omega_1 (three roots) or omega_2 (one root)
};

// Throws DegenerateInvariants when delta vanishes (relative to g2^3, g3^2).
WeierstrassLattice weierstrass_lattice(double g2, double g3);

// The real-axis branch with a pole at x = 0. Throws NearPole near lattice points.
double weierstrass_p(double x, double g2, double g3);
double weierstrass_p(double x, const WeierstrassLattice& lat);
// wp(x + omega_3), the bounded real branch that exists when delta < 0.
double weierstrass_p_bounded(double x, const WeierstrassLattice& lat);

// Series versions, composed with a series argument.
Series weierstrass_p_series(const Series& x, const WeierstrassLattice& lat);
Series weierstrass_p_bounded_series(const Series& x, const WeierstrassLattice& lat);

}  // namespace kkflows

#endif  // KKFLOWS_ELLIPTIC_HPP
