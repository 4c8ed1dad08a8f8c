// Polynomial differential functions of one dependent variable u(s).
//
// A DiffPoly is a polynomial with exact rational coefficients in the jet
// coordinates u_(0), u_(1), ..., where u_(k) stands for the k-th derivative of
// u. Terms are kept fully combined in a canonical order, so two polynomials are
// equal exactly when their term maps are equal.

#ifndef KKFLOWS_DIFFPOLY_HPP
#define KKFLOWS_DIFFPOLY_HPP

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kkflows/errors.hpp"

namespace kkflows {

using Rational = mpq_class;

// Exponents of a monomial: entry k is the power of u_(k). Trailing zeros are
// never stored, so the empty vector is the constant monomial.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<unsigned> exps);

  // u_(k)^power.
  static Monomial jet(int k, unsigned power = 1);

  const std::vector<unsigned>& exponents() const { return e_; }
  unsigned exponent(int k) const {
    return k < static_cast<int>(e_.size()) ? e_[static_cast<std::size_t>(k)] : 0u;
  }
  // Highest jet order present, or -1 for the constant monomial.
  int max_order() const { return static_cast<int>(e_.size()) - 1; }
  unsigned degree() const;

  Monomial operator*(const Monomial& other) const;
  // Monomial with the power of u_(k) changed by delta (result must stay >= 0).
  Monomial shifted(int k, int delta) const;

  bool operator==(const Monomial& o) const { return e_ == o.e_; }

 private:
  void trim();
  std::vector<unsigned> e_;
};

// Graded order: total degree, then highest jet order, then exponents read from
// the highest jet order downwards.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class DiffPoly {
 public:
  using TermMap = std::map<Monomial, Rational, MonomialOrder>;

  DiffPoly() = default;
  DiffPoly(long c);  // NOLINT(google-explicit-constructor): constants embed naturally
  DiffPoly(const Rational& c);  // NOLINT(google-explicit-constructor)

  // u_(k)^power.
  static DiffPoly u(int k, unsigned power = 1);
  static DiffPoly term(const Rational& c, const Monomial& m);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }
  int max_order() const;
  unsigned degree() const;
  Rational coefficient(const Monomial& m) const;
  // Value on the zero jet.
  Rational constant_term() const { return coefficient(Monomial()); }

  // Human-readable form such as "u_(5) + 10 u_(0) u_(3) + 20 u_(0)^2 u_(1)".
  std::string to_string() const;

  DiffPoly operator-() const;
  DiffPoly& operator+=(const DiffPoly& o);
  DiffPoly& operator-=(const DiffPoly& o);
  DiffPoly& operator*=(const DiffPoly& o);
  DiffPoly& operator*=(const Rational& c);

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(DiffPoly a, const Rational& c) { return a *= c; }
  friend DiffPoly operator*(const Rational& c, DiffPoly a) { return a *= c; }
  friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Monomial& m, const Rational& c);
  TermMap terms_;
};

// p is not a total derivative; residual() holds euler(p).
class NotExact : public Error {
 public:
  NotExact(const std::string& what, DiffPoly residual) : Error(what), residual_(std::move(residual)) {}
  const DiffPoly& residual() const { return residual_; }

 private:
  DiffPoly residual_;
};

// Homotopy integration produced a potential whose Euler image differs from h.
class HomotopyFailed : public Error {
 public:
  HomotopyFailed(const std::string& what, DiffPoly residual) : Error(what), residual_(std::move(residual)) {}
  const DiffPoly& residual() const { return residual_; }

 private:
  DiffPoly residual_;
};

DiffPoly total_derivative(const DiffPoly& p);
DiffPoly total_derivative(const DiffPoly& p, int times);
// Partial derivative with respect to u_(k).
DiffPoly partial(const DiffPoly& p, int k);
DiffPoly euler(const DiffPoly& p);

// The unique q with D q = p and no constant term. Throws NotExact.
DiffPoly antiderivative(const DiffPoly& p);

// euler(u_(0) D^3 p + 4 u_(0)^2 D p); zero exactly when p lies in P[u].
DiffPoly membership_residual(const DiffPoly& p);
bool in_P(const DiffPoly& p);

// D^3 w + 2 u_(0) D w + u_(1) w.
DiffPoly op_D(const DiffPoly& w);
// D^3 q + 8 u_(0) D q + 7 u_(1) q + 2 (u_(2) + 4 u_(0)^2) D^-1 q + 2 D^-1 (u_(0) D^2 q + 4 u_(0)^2 q).
DiffPoly op_J(const DiffPoly& q);
// The integro-differential operator whose values give the curvature flow.
// Throws NotInP when the inner antiderivative does not exist.
DiffPoly op_S(const DiffPoly& p);
// The nonlocal part of op_S before the 1/9 u_(1) factor:
// D^-1 (u_(0) D^3 p + 4 u_(0)^2 D p).
DiffPoly op_S_integral(const DiffPoly& p);

// Sum over monomials m of h of coeff(m)/(deg(m)+1) * m * u_(0).
// Throws HomotopyFailed when euler(result) != h.
DiffPoly homotopy_integral(const DiffPoly& h);

// Evaluates p with u_(k) = jet[k]. Throws MissingJetOrder when jet is short.
double eval_on_jet(const DiffPoly& p, std::span<const double> jet);

// Double-precision copy of a DiffPoly for repeated evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const DiffPoly& p);
  double operator()(std::span<const double> jet) const;
  int max_order() const { return max_order_; }

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<int, unsigned>> factors;
  };
  std::vector<Term> terms_;
  int max_order_ = -1;
};

// "num/den" with den > 0, always including the denominator.
std::string rational_to_string(const Rational& r);
Rational rational_from_string(const std::string& s);

nlohmann::json to_json(const DiffPoly& p);
DiffPoly diffpoly_from_json(const nlohmann::json& j);

}  // namespace kkflows

#endif  // KKFLOWS_DIFFPOLY_HPP
