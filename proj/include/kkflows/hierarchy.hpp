// The Kaup-Kupershmidt hierarchy generated from the recursion h_{n+2} = J(D(h_n)).

#ifndef KKFLOWS_HIERARCHY_HPP
#define KKFLOWS_HIERARCHY_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "kkflows/diffpoly.hpp"

namespace kkflows {

struct HierarchyLevel {
  int n = 0;
  DiffPoly h;  // Euler image of p
  DiffPoly q;  // conserved flux: D q = op_D(h)
  DiffPoly p;  // Hamiltonian potential
  DiffPoly v;  // normal velocity inducing the n-th flow
  Rational lambda;
  long ell = 0;
};

// lambda_n = ((1 + (-1)^n)/2) (-27)^floor(n/2).
Rational hierarchy_lambda(int n);
// ell_n = floor(n/2) - (1 + (-1)^n)/2.
long hierarchy_ell(int n);

// Levels 0..n_max. Even and odd chains are built concurrently.
std::vector<HierarchyLevel> generate_hierarchy(int n_max = 6);

// op_D(h_n): the n-th equation reads u_t + kk_rhs(n) = 0.
DiffPoly kk_rhs(int n);

struct Verification {
  bool ok = false;
  DiffPoly residual;
};

// S(v_n) + lambda_n u_(1) - op_D(h_n).
Verification verify_prop1(const HierarchyLevel& level);
Verification verify_prop1(int n);

// op_D(op_J(D q)) - 18 op_S(D^-1 D q) + 27 D q. D^-1 D q differs from q only by
// its constant term, which keeps q = 1 meaningful. Throws NotInP.
Verification verify_lemma1(const DiffPoly& q);

// Equation text in subscript notation, e.g. "u_t + u_5s + 10 u u_3s + ... = 0".
std::string equation_text(const DiffPoly& rhs);
// A DiffPoly in the same subscript notation.
std::string subscript_text(const DiffPoly& p);

nlohmann::json to_json(const HierarchyLevel& level);
HierarchyLevel hierarchy_level_from_json(const nlohmann::json& j);

}  // namespace kkflows

#endif  // KKFLOWS_HIERARCHY_HPP
