#include "kkflows/hierarchy.hpp"

#include <algorithm>
#include <future>
#include <sstream>

namespace kkflows {

Rational hierarchy_lambda(int n) {
  if (n % 2 != 0) return Rational(0);
  Rational r(1);
  for (int i = 0; i < n / 2; ++i) r *= -27;
  return r;
}

long hierarchy_ell(int n) { return n / 2 - (n % 2 == 0 ? 1 : 0); }

namespace {

// h_start, h_{start+2}, ... up to n_max.
std::vector<DiffPoly> chain(DiffPoly first, int start, int n_max) {
  std::vector<DiffPoly> out;
  if (start > n_max) return out;
  out.push_back(std::move(first));
  for (int n = start + 2; n <= n_max; n += 2) out.push_back(op_J(op_D(out.back())));
  return out;
}

}  // namespace

std::vector<HierarchyLevel> generate_hierarchy(int n_max) {
  if (n_max < 0) throw InvalidInput("n_max must be non-negative");
  DiffPoly h0(1L);
  DiffPoly h1 = DiffPoly::u(2) + Rational(4) * DiffPoly::u(0, 2);
  auto odd = std::async(std::launch::async, chain, h1, 1, n_max);
  std::vector<DiffPoly> even = chain(h0, 0, n_max);
  std::vector<DiffPoly> odds = odd.get();

  std::vector<HierarchyLevel> levels(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    HierarchyLevel& L = levels[static_cast<std::size_t>(n)];
    L.n = n;
    L.h = (n % 2 == 0) ? even[static_cast<std::size_t>(n / 2)] : odds[static_cast<std::size_t>(n / 2)];
    L.q = antiderivative(op_D(L.h));
    L.p = homotopy_integral(L.h);
    L.lambda = hierarchy_lambda(n);
    L.ell = hierarchy_ell(n);
  }
  // v_n = 18 sum_{h=0}^{ell_n} (-27)^h w_{n-2h} with w_0 = 0, w_1 = 1/2, w_n = q_{n-2}.
  auto w = [&](int k) -> DiffPoly {
    if (k == 0) return DiffPoly();
    if (k == 1) return DiffPoly(Rational(1, 2));
    return levels[static_cast<std::size_t>(k - 2)].q;
  };
  for (int n = 0; n <= n_max; ++n) {
    DiffPoly v;
    Rational power(1);
    for (long h = 0; h <= levels[static_cast<std::size_t>(n)].ell; ++h) {
      v += power * w(n - 2 * static_cast<int>(h));
      power *= -27;
    }
    levels[static_cast<std::size_t>(n)].v = Rational(18) * v;
  }
  return levels;
}

DiffPoly kk_rhs(int n) {
  if (n < 0) throw InvalidInput("hierarchy index must be non-negative");
  DiffPoly h = (n % 2 == 0) ? DiffPoly(1L) : DiffPoly::u(2) + Rational(4) * DiffPoly::u(0, 2);
  for (int k = n % 2; k < n; k += 2) h = op_J(op_D(h));
  return op_D(h);
}

Verification verify_prop1(const HierarchyLevel& level) {
  Verification r;
  r.residual = op_S(level.v) + level.lambda * DiffPoly::u(1) - op_D(level.h);
  r.ok = r.residual.is_zero();
  return r;
}

Verification verify_prop1(int n) {
  auto levels = generate_hierarchy(n);
  return verify_prop1(levels[static_cast<std::size_t>(n)]);
}

Verification verify_lemma1(const DiffPoly& q) {
  DiffPoly dq = total_derivative(q);
  Verification r;
  r.residual = op_D(op_J(dq)) - Rational(18) * op_S(antiderivative(dq)) + Rational(27) * dq;
  r.ok = r.residual.is_zero();
  return r;
}

namespace {

std::string subscript_factor(int k) {
  if (k == 0) return "u";
  if (k == 1) return "u_s";
  return "u_" + std::to_string(k) + "s";
}

struct PrintedTerm {
  Monomial m;
  Rational c;
};

std::vector<PrintedTerm> print_order(const DiffPoly& p) {
  std::vector<PrintedTerm> t;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) t.push_back({it->first, it->second});
  std::stable_sort(t.begin(), t.end(), [](const PrintedTerm& a, const PrintedTerm& b) {
    if (a.m.degree() != b.m.degree()) return a.m.degree() < b.m.degree();
    return a.m.max_order() > b.m.max_order();
  });
  return t;
}

void append_terms(std::ostringstream& os, const DiffPoly& p, bool leading) {
  bool first = leading;
  for (const auto& [m, coeff] : print_order(p)) {
    Rational c = coeff;
    bool negative = c < 0;
    if (negative) c = -c;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    bool wrote = false;
    if (c != 1 || m.max_order() < 0) {
      os << c.get_str();
      wrote = true;
    }
    for (int k = 0; k <= m.max_order(); ++k) {
      unsigned e = m.exponent(k);
      if (e == 0) continue;
      if (wrote) os << " ";
      os << subscript_factor(k);
      if (e > 1) os << "^" << e;
      wrote = true;
    }
  }
}

}  // namespace

std::string subscript_text(const DiffPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  append_terms(os, p, true);
  return os.str();
}

std::string equation_text(const DiffPoly& rhs) {
  std::ostringstream os;
  os << "u_t";
  if (!rhs.is_zero()) append_terms(os, rhs, false);
  os << " = 0";
  return os.str();
}

nlohmann::json to_json(const HierarchyLevel& level) {
  return {{"n", level.n},
          {"h", to_json(level.h)},
          {"q", to_json(level.q)},
          {"p", to_json(level.p)},
          {"v", to_json(level.v)},
          {"lambda", rational_to_string(level.lambda)},
          {"ell", level.ell}};
}

HierarchyLevel hierarchy_level_from_json(const nlohmann::json& j) {
  try {
    HierarchyLevel L;
    L.n = j.at("n").get<int>();
    L.h = diffpoly_from_json(j.at("h"));
    L.q = diffpoly_from_json(j.at("q"));
    L.p = diffpoly_from_json(j.at("p"));
    L.v = diffpoly_from_json(j.at("v"));
    L.lambda = rational_from_string(j.at("lambda").get<std::string>());
    L.ell = j.at("ell").get<long>();
    return L;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed hierarchy level: ") + e.what());
  }
}

}  // namespace kkflows
