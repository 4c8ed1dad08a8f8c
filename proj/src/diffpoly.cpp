#include "kkflows/diffpoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kkflows {

Monomial::Monomial(std::vector<unsigned> exps) : e_(std::move(exps)) { trim(); }

Monomial Monomial::jet(int k, unsigned power) {
  if (k < 0) throw InvalidInput("negative jet order");
  std::vector<unsigned> e(static_cast<std::size_t>(k) + 1, 0u);
  e[static_cast<std::size_t>(k)] = power;
  return Monomial(std::move(e));
}

void Monomial::trim() {
  while (!e_.empty() && e_.back() == 0) e_.pop_back();
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (unsigned x : e_) d += x;
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  std::vector<unsigned> e(std::max(e_.size(), other.e_.size()), 0u);
  for (std::size_t k = 0; k < e_.size(); ++k) e[k] += e_[k];
  for (std::size_t k = 0; k < other.e_.size(); ++k) e[k] += other.e_[k];
  return Monomial(std::move(e));
}

Monomial Monomial::shifted(int k, int delta) const {
  std::vector<unsigned> e = e_;
  if (static_cast<int>(e.size()) <= k) e.resize(static_cast<std::size_t>(k) + 1, 0u);
  long v = static_cast<long>(e[static_cast<std::size_t>(k)]) + delta;
  if (v < 0) throw InvalidInput("negative exponent in monomial");
  e[static_cast<std::size_t>(k)] = static_cast<unsigned>(v);
  return Monomial(std::move(e));
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  unsigned da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  int oa = a.max_order(), ob = b.max_order();
  if (oa != ob) return oa < ob;
  for (int k = oa; k >= 0; --k) {
    unsigned ea = a.exponent(k), eb = b.exponent(k);
    if (ea != eb) return ea < eb;
  }
  return false;
}

DiffPoly::DiffPoly(long c) {
  if (c != 0) terms_.emplace(Monomial(), Rational(c));
}

namespace {

// mpq_class built from a numerator/denominator pair is not reduced, and GMP
// arithmetic requires reduced operands.
Rational canonical(const Rational& c) {
  Rational r = c;
  r.canonicalize();
  return r;
}

}  // namespace

DiffPoly::DiffPoly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial(), canonical(c));
}

DiffPoly DiffPoly::u(int k, unsigned power) { return term(Rational(1), Monomial::jet(k, power)); }

DiffPoly DiffPoly::term(const Rational& c, const Monomial& m) {
  DiffPoly p;
  p.add_term(m, canonical(c));
  return p;
}

bool DiffPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.max_order() < 0);
}

int DiffPoly::max_order() const {
  int n = -1;
  for (const auto& [m, c] : terms_) n = std::max(n, m.max_order());
  return n;
}

unsigned DiffPoly::degree() const { return terms_.empty() ? 0u : terms_.rbegin()->first.degree(); }

Rational DiffPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void DiffPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly r(*this);
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& o) { return *this = *this * o; }

DiffPoly& DiffPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  Rational cc = canonical(c);
  for (auto& [m, x] : terms_) x *= cc;
  return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

namespace {

std::string jet_name(int k) { return "u_(" + std::to_string(k) + ")"; }

}  // namespace

std::string DiffPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Monomial& m = it->first;
    Rational c = it->second;
    bool negative = c < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    bool unit = (c == 1);
    if (!unit || m.max_order() < 0) {
      os << c.get_str();
      if (m.max_order() >= 0) os << " ";
    }
    bool sep = false;
    for (int k = 0; k <= m.max_order(); ++k) {
      unsigned e = m.exponent(k);
      if (e == 0) continue;
      if (sep) os << " ";
      os << jet_name(k);
      if (e > 1) os << "^" << e;
      sep = true;
    }
  }
  return os.str();
}

DiffPoly total_derivative(const DiffPoly& p) {
  DiffPoly r;
  for (const auto& [m, c] : p.terms()) {
    for (int k = 0; k <= m.max_order(); ++k) {
      unsigned e = m.exponent(k);
      if (e == 0) continue;
      r += DiffPoly::term(c * e, m.shifted(k, -1).shifted(k + 1, 1));
    }
  }
  return r;
}

DiffPoly total_derivative(const DiffPoly& p, int times) {
  DiffPoly r = p;
  for (int i = 0; i < times; ++i) r = total_derivative(r);
  return r;
}

DiffPoly partial(const DiffPoly& p, int k) {
  DiffPoly r;
  for (const auto& [m, c] : p.terms()) {
    unsigned e = m.exponent(k);
    if (e == 0) continue;
    r += DiffPoly::term(c * e, m.shifted(k, -1));
  }
  return r;
}

DiffPoly euler(const DiffPoly& p) {
  DiffPoly r;
  int n = p.max_order();
  for (int l = 0; l <= n; ++l) {
    DiffPoly d = total_derivative(partial(p, l), l);
    if (l % 2 == 0)
      r += d;
    else
      r -= d;
  }
  return r;
}

DiffPoly antiderivative(const DiffPoly& p) {
  DiffPoly rest = p;
  DiffPoly result;
  while (!rest.is_zero()) {
    int n = rest.max_order();
    if (n <= 0) throw NotExact("antiderivative: input is not a total derivative", euler(p));
    // The top jet order of a total derivative appears linearly; integrate its
    // coefficient with respect to the next lower order.
    DiffPoly step;
    for (const auto& [m, c] : rest.terms()) {
      unsigned e = m.exponent(n);
      if (e == 0) continue;
      if (e > 1) throw NotExact("antiderivative: input is not a total derivative", euler(p));
      Monomial a = m.shifted(n, -1);
      unsigned lower = a.exponent(n - 1);
      step += DiffPoly::term(c / Rational(lower + 1), a.shifted(n - 1, 1));
    }
    result += step;
    rest -= total_derivative(step);
    if (rest.max_order() >= n) throw NotExact("antiderivative: input is not a total derivative", euler(p));
  }
  if (!(total_derivative(result) == p))
    throw NotExact("antiderivative: postcondition D(result) = p failed", euler(p));
  return result;
}

DiffPoly membership_residual(const DiffPoly& p) {
  DiffPoly u0 = DiffPoly::u(0);
  return euler(u0 * total_derivative(p, 3) + Rational(4) * u0 * u0 * total_derivative(p));
}

bool in_P(const DiffPoly& p) { return membership_residual(p).is_zero(); }

DiffPoly op_D(const DiffPoly& w) {
  DiffPoly u0 = DiffPoly::u(0), u1 = DiffPoly::u(1);
  return total_derivative(w, 3) + Rational(2) * u0 * total_derivative(w) + u1 * w;
}

DiffPoly op_J(const DiffPoly& q) {
  DiffPoly u0 = DiffPoly::u(0), u1 = DiffPoly::u(1), u2 = DiffPoly::u(2);
  DiffPoly u0sq = u0 * u0;
  DiffPoly r = total_derivative(q, 3) + Rational(8) * u0 * total_derivative(q) + Rational(7) * u1 * q;
  r += Rational(2) * (u2 + Rational(4) * u0sq) * antiderivative(q);
  r += Rational(2) * antiderivative(u0 * total_derivative(q, 2) + Rational(4) * u0sq * q);
  return r;
}

DiffPoly op_S_integral(const DiffPoly& p) {
  DiffPoly u0 = DiffPoly::u(0);
  DiffPoly inner = u0 * total_derivative(p, 3) + Rational(4) * u0 * u0 * total_derivative(p);
  try {
    return antiderivative(inner);
  } catch (const NotExact&) {
    throw NotInP("op_S: argument is not in P[u]: " + p.to_string());
  }
}

DiffPoly op_S(const DiffPoly& p) {
  auto u = [](int k) { return DiffPoly::u(k); };
  auto q = [](long n, long d) { return Rational(n, d); };
  std::vector<DiffPoly> d(8);
  d[0] = p;
  for (int k = 1; k < 8; ++k) d[k] = total_derivative(d[k - 1]);
  DiffPoly u0 = u(0), u1 = u(1), u2 = u(2), u3 = u(3), u4 = u(4), u5 = u(5);
  DiffPoly r = q(1, 9) * u1 * op_S_integral(p);
  r += q(1, 9) * (Rational(20) * u0 * u0 * u1 + Rational(25) * u1 * u2 + Rational(10) * u0 * u3 + u5) * d[0];
  r += (DiffPoly(q(3, 2)) + q(16, 9) * u0 * u0 * u0 + q(71, 18) * u1 * u1 + q(41, 9) * u0 * u2 + q(13, 18) * u4) *
       d[1];
  r += (q(59, 9) * u0 * u1 + q(35, 18) * u3) * d[2];
  r += (Rational(2) * u0 * u0 + q(49, 18) * u2) * d[3];
  r += Rational(2) * u1 * d[4];
  r += q(2, 3) * u0 * d[5];
  r += q(1, 18) * d[7];
  return r;
}

DiffPoly homotopy_integral(const DiffPoly& h) {
  DiffPoly r;
  for (const auto& [m, c] : h.terms())
    r += DiffPoly::term(c / Rational(m.degree() + 1), m.shifted(0, 1));
  DiffPoly residual = euler(r) - h;
  if (!residual.is_zero()) throw HomotopyFailed("homotopy_integral: euler(result) != h", residual);
  return r;
}

CompiledPoly::CompiledPoly(const DiffPoly& p) {
  for (const auto& [m, c] : p.terms()) {
    Term t{c.get_d(), {}};
    for (int k = 0; k <= m.max_order(); ++k)
      if (m.exponent(k) > 0) t.factors.emplace_back(k, m.exponent(k));
    terms_.push_back(std::move(t));
    max_order_ = std::max(max_order_, m.max_order());
  }
}

double CompiledPoly::operator()(std::span<const double> jet) const {
  if (static_cast<int>(jet.size()) <= max_order_)
    throw MissingJetOrder("jet has " + std::to_string(jet.size()) + " entries, polynomial needs order " +
                          std::to_string(max_order_));
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (const auto& [k, e] : t.factors) {
      double x = jet[static_cast<std::size_t>(k)];
      for (unsigned i = 0; i < e; ++i) v *= x;
    }
    sum += v;
  }
  return sum;
}

double eval_on_jet(const DiffPoly& p, std::span<const double> jet) { return CompiledPoly(p)(jet); }

std::string rational_to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational rational_from_string(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw InvalidInput("malformed rational: " + s);
  if (r.get_den() == 0) throw InvalidInput("zero denominator: " + s);
  r.canonicalize();
  return r;
}

nlohmann::json to_json(const DiffPoly& p) {
  nlohmann::json monomials = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) {
    nlohmann::json factors = nlohmann::json::array();
    for (int k = 0; k <= m.max_order(); ++k)
      if (m.exponent(k) > 0) factors.push_back({k, m.exponent(k)});
    monomials.push_back({{"coeff", rational_to_string(c)}, {"factors", factors}});
  }
  return {{"monomials", monomials}};
}

DiffPoly diffpoly_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("monomials") || !j["monomials"].is_array())
    throw InvalidInput("DiffPoly JSON must be an object with a \"monomials\" array");
  DiffPoly p;
  for (const auto& t : j["monomials"]) {
    if (!t.contains("coeff") || !t["coeff"].is_string() || !t.contains("factors") || !t["factors"].is_array())
      throw InvalidInput("malformed DiffPoly monomial");
    Rational c = rational_from_string(t["coeff"].get<std::string>());
    if (c == 0) throw InvalidInput("stored monomial with zero coefficient");
    std::vector<unsigned> e;
    for (const auto& f : t["factors"]) {
      if (!f.is_array() || f.size() != 2) throw InvalidInput("factor must be [order, exponent]");
      long k = f[0].get<long>();
      long x = f[1].get<long>();
      if (k < 0 || x <= 0) throw InvalidInput("factor needs order >= 0 and exponent > 0");
      if (static_cast<long>(e.size()) <= k) e.resize(static_cast<std::size_t>(k) + 1, 0u);
      if (e[static_cast<std::size_t>(k)] != 0) throw InvalidInput("repeated jet order in monomial");
      e[static_cast<std::size_t>(k)] = static_cast<unsigned>(x);
    }
    p += DiffPoly::term(c, Monomial(std::move(e)));
  }
  return p;
}

}  // namespace kkflows
