// Truncated power series in one variable.
//
// A Series of order n stores the Taylor coefficients c_0..c_n of a function
// around some base point, so derivative k at the base point is k! c_k.
// Arithmetic drops every term beyond the order of the shorter operand.

#ifndef KKFLOWS_SERIES_HPP
#define KKFLOWS_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kkflows {

template <typename T>
class BasicSeries {
 public:
  BasicSeries() : c_(1, T(0)) {}
  explicit BasicSeries(int order, T value = T(0)) : c_(static_cast<std::size_t>(order) + 1, T(0)) {
    c_[0] = value;
  }
  explicit BasicSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(T(0));
  }

  // The identity map t -> t0 + t truncated at the given order.
  static BasicSeries variable(int order, T t0) {
    BasicSeries s(order, t0);
    if (order >= 1) s.c_[1] = T(1);
    return s;
  }

  // Series whose k-th derivative at the base point is jets[k].
  static BasicSeries from_derivatives(const std::vector<T>& jets) {
    std::vector<T> c(jets.size());
    double fact = 1.0;
    for (std::size_t k = 0; k < jets.size(); ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      c[k] = jets[k] / fact;
    }
    return BasicSeries(std::move(c));
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](std::size_t k) const { return c_[k]; }
  T& operator[](std::size_t k) { return c_[k]; }
  const std::vector<T>& coeffs() const { return c_; }
  T value() const { return c_[0]; }

  // k-th derivative at the base point.
  T derivative_at(int k) const {
    if (k > order()) return T(0);
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    return c_[static_cast<std::size_t>(k)] * fact;
  }

  std::vector<T> derivatives() const {
    std::vector<T> out(c_.size());
    for (int k = 0; k <= order(); ++k) out[static_cast<std::size_t>(k)] = derivative_at(k);
    return out;
  }

  // d/dt, lowering the order by one.
  BasicSeries derivative() const {
    if (order() == 0) return BasicSeries(0);
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return BasicSeries(std::move(d));
  }

  // Antiderivative with constant term c0, raising the order by one.
  BasicSeries integral(T c0 = T(0)) const {
    std::vector<T> d(c_.size() + 1);
    d[0] = c0;
    for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / static_cast<double>(k + 1);
    return BasicSeries(std::move(d));
  }

  BasicSeries truncated(int order) const {
    std::vector<T> d(c_.begin(), c_.begin() + std::min<std::size_t>(c_.size(), order + 1));
    d.resize(static_cast<std::size_t>(order) + 1, T(0));
    return BasicSeries(std::move(d));
  }

  BasicSeries operator-() const {
    BasicSeries r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }
  BasicSeries& operator+=(const BasicSeries& o) { return *this = *this + o; }
  BasicSeries& operator-=(const BasicSeries& o) { return *this = *this - o; }
  BasicSeries& operator*=(const BasicSeries& o) { return *this = *this * o; }
  BasicSeries& operator/=(const BasicSeries& o) { return *this = *this / o; }
  BasicSeries& operator+=(T a) { c_[0] += a; return *this; }
  BasicSeries& operator-=(T a) { c_[0] -= a; return *this; }
  BasicSeries& operator*=(T a) { for (auto& x : c_) x *= a; return *this; }
  BasicSeries& operator/=(T a) { for (auto& x : c_) x /= a; return *this; }

  friend BasicSeries operator+(const BasicSeries& a, const BasicSeries& b) {
    int n = std::min(a.order(), b.order());
    BasicSeries r(n);
    for (int k = 0; k <= n; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend BasicSeries operator-(const BasicSeries& a, const BasicSeries& b) {
    int n = std::min(a.order(), b.order());
    BasicSeries r(n);
    for (int k = 0; k <= n; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend BasicSeries operator*(const BasicSeries& a, const BasicSeries& b) {
    int n = std::min(a.order(), b.order());
    BasicSeries r(n);
    for (int k = 0; k <= n; ++k) {
      T acc(0);
      for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
      r.c_[k] = acc;
    }
    return r;
  }
  friend BasicSeries operator/(const BasicSeries& a, const BasicSeries& b) {
    if (b.c_[0] == T(0)) throw std::domain_error("series division by a series vanishing at the base point");
    int n = std::min(a.order(), b.order());
    BasicSeries r(n);
    for (int k = 0; k <= n; ++k) {
      T acc = a.c_[k];
      for (int j = 1; j <= k; ++j) acc -= b.c_[j] * r.c_[k - j];
      r.c_[k] = acc / b.c_[0];
    }
    return r;
  }
  friend BasicSeries operator+(BasicSeries a, T s) { a.c_[0] += s; return a; }
  friend BasicSeries operator+(T s, BasicSeries a) { a.c_[0] += s; return a; }
  friend BasicSeries operator-(BasicSeries a, T s) { a.c_[0] -= s; return a; }
  friend BasicSeries operator-(T s, const BasicSeries& a) { BasicSeries r = -a; r.c_[0] += s; return r; }
  friend BasicSeries operator*(BasicSeries a, T s) { a *= s; return a; }
  friend BasicSeries operator*(T s, BasicSeries a) { a *= s; return a; }
  friend BasicSeries operator/(BasicSeries a, T s) { a /= s; return a; }
  friend BasicSeries operator/(T s, const BasicSeries& a) { return BasicSeries(a.order(), s) / a; }

 private:
  std::vector<T> c_;
};

using Series = BasicSeries<double>;
using ComplexSeries = BasicSeries<std::complex<double>>;

template <typename T>
BasicSeries<T> exp(const BasicSeries<T>& a) {
  using std::exp;
  int n = a.order();
  BasicSeries<T> r(n, exp(a[0]));
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * r[k - j];
    r[k] = acc / static_cast<double>(k);
  }
  return r;
}

template <typename T>
BasicSeries<T> log(const BasicSeries<T>& a) {
  using std::log;
  int n = a.order();
  BasicSeries<T> r(n, log(a[0]));
  for (int k = 1; k <= n; ++k) {
    T acc = static_cast<double>(k) * a[k];
    for (int j = 1; j < k; ++j) acc -= static_cast<double>(j) * r[j] * a[k - j];
    r[k] = acc / (static_cast<double>(k) * a[0]);
  }
  return r;
}

// a^alpha for a real exponent; a(0) must be nonzero.
template <typename T>
BasicSeries<T> pow(const BasicSeries<T>& a, double alpha) {
  using std::pow;
  if (a[0] == T(0)) throw std::domain_error("series power of a series vanishing at the base point");
  int n = a.order();
  BasicSeries<T> r(n, pow(a[0], alpha));
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j)
      acc += (alpha * static_cast<double>(j) - static_cast<double>(k - j)) * a[j] * r[k - j];
    r[k] = acc / (static_cast<double>(k) * a[0]);
  }
  return r;
}

template <typename T>
BasicSeries<T> sqrt(const BasicSeries<T>& a) {
  return pow(a, 0.5);
}

// Real cube root that keeps the sign of a(0).
inline Series cbrt(const Series& a) {
  if (a[0] < 0) return -pow(-a, 1.0 / 3.0);
  return pow(a, 1.0 / 3.0);
}

template <typename T>
void sin_cos(const BasicSeries<T>& a, BasicSeries<T>& s, BasicSeries<T>& c) {
  using std::cos;
  using std::sin;
  int n = a.order();
  s = BasicSeries<T>(n, sin(a[0]));
  c = BasicSeries<T>(n, cos(a[0]));
  for (int k = 1; k <= n; ++k) {
    T as(0), ac(0);
    for (int j = 1; j <= k; ++j) {
      as += static_cast<double>(j) * a[j] * c[k - j];
      ac -= static_cast<double>(j) * a[j] * s[k - j];
    }
    s[k] = as / static_cast<double>(k);
    c[k] = ac / static_cast<double>(k);
  }
}

template <typename T>
void sinh_cosh(const BasicSeries<T>& a, BasicSeries<T>& s, BasicSeries<T>& c) {
  using std::cosh;
  using std::sinh;
  int n = a.order();
  s = BasicSeries<T>(n, sinh(a[0]));
  c = BasicSeries<T>(n, cosh(a[0]));
  for (int k = 1; k <= n; ++k) {
    T as(0), ac(0);
    for (int j = 1; j <= k; ++j) {
      as += static_cast<double>(j) * a[j] * c[k - j];
      ac += static_cast<double>(j) * a[j] * s[k - j];
    }
    s[k] = as / static_cast<double>(k);
    c[k] = ac / static_cast<double>(k);
  }
}

template <typename T>
BasicSeries<T> sin(const BasicSeries<T>& a) {
  BasicSeries<T> s, c;
  sin_cos(a, s, c);
  return s;
}

template <typename T>
BasicSeries<T> cos(const BasicSeries<T>& a) {
  BasicSeries<T> s, c;
  sin_cos(a, s, c);
  return c;
}

// Converts a real series to a complex one.
inline ComplexSeries to_complex(const Series& a) {
  std::vector<std::complex<double>> c(a.coeffs().begin(), a.coeffs().end());
  return ComplexSeries(std::move(c));
}

}  // namespace kkflows

#endif  // KKFLOWS_SERIES_HPP
