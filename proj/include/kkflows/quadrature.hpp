// Composite Gauss-Legendre quadrature.

#ifndef KKFLOWS_QUADRATURE_HPP
#define KKFLOWS_QUADRATURE_HPP

#include <cmath>

namespace kkflows {

namespace detail {
// Eight-point rule on [-1, 1].
inline constexpr double kGL8x[8] = {-0.960289856497536231683561, -0.796666477413626739591554,
                                    -0.525532409916328985817739, -0.183434642495649804939476,
                                    0.183434642495649804939476,  0.525532409916328985817739,
                                    0.796666477413626739591554,  0.960289856497536231683561};
inline constexpr double kGL8w[8] = {0.101228536290376259152531, 0.222381034453374470544356,
                                    0.313706645877887287337962, 0.362683783378361982965150,
                                    0.362683783378361982965150, 0.313706645877887287337962,
                                    0.222381034453374470544356, 0.101228536290376259152531};
}  // namespace detail

// int_a^b f over `panels` equal panels (b < a gives the negated integral).
template <typename F>
auto gauss_legendre(F&& f, double a, double b, int panels = 1) -> decltype(f(a)) {
  using R = decltype(f(a));
  R total{};
  if (panels < 1) panels = 1;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = a + (p + 0.5) * h;
    R acc{};
    for (int i = 0; i < 8; ++i) acc += detail::kGL8w[i] * f(mid + 0.5 * h * detail::kGL8x[i]);
    total += acc * (0.5 * h);
  }
  return total;
}

// Panel count giving roughly `per_unit` panels per unit length.
inline int panels_for(double a, double b, double per_unit = 4.0) {
  return 1 + static_cast<int>(std::ceil(std::abs(b - a) * per_unit));
}

}  // namespace kkflows

#endif  // KKFLOWS_QUADRATURE_HPP
